#include "voltra/majorants.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "voltra/quadrature.hpp"

namespace voltra {

namespace {

constexpr double kRelTol = 1e-8;
constexpr int kLevelCap = 40;
constexpr double kGrowFraction = 0.01;
constexpr double kClosableRatio = 0.95;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Core of the dyadic scheme, parameterized over the per-shell integral so
// the truncation-tail variant can reuse the convergence logic.
DyadicIntegral dyadic_core(const std::function<double(double, double)>& shell, double upper) {
    if (!(upper > 0.0) || !std::isfinite(upper))
        throw InvalidInputError("dyadic integral needs a finite positive upper limit");
    DyadicIntegral out;
    out.running.reserve(kLevelCap);
    std::vector<double> pieces;
    pieces.reserve(kLevelCap);
    double total = 0.0;
    double hi = upper;
    for (int k = 0; k < kLevelCap; ++k) {
        double lo = hi / 2.0;
        double piece = shell(lo, hi);
        if (!std::isfinite(piece)) {
            out.running.push_back(kInf);
            out.levels = k + 1;
            out.finite = false;
            out.value = kInf;
            return out;
        }
        total += piece;
        pieces.push_back(piece);
        out.running.push_back(total);
        // A zero total means no mass seen yet (indicator tails start with
        // empty shells); only a settled nonzero total counts as converged.
        if (total != 0.0 && std::abs(piece) <= kRelTol * std::abs(total)) {
            out.levels = k + 1;
            out.finite = true;
            out.value = total;
            return out;
        }
        hi = lo;
    }
    out.levels = kLevelCap;
    if (total == 0.0) {
        out.finite = true;
        out.value = 0.0;
        return out;
    }
    // Cap reached.  Steady growth means divergence; a cleanly decaying shell
    // sequence gets a geometric tail; anything murkier is not certified.
    bool all_grow = true;
    for (int k = kLevelCap - 5; k < kLevelCap; ++k)
        if (!(pieces[k] > kGrowFraction * std::abs(out.running[k - 1]))) all_grow = false;
    if (!all_grow) {
        double worst_ratio = 0.0;
        bool ratios_ok = true;
        for (int k = kLevelCap - 5; k < kLevelCap; ++k) {
            if (!(pieces[k - 1] > 0.0 && pieces[k] > 0.0)) {
                ratios_ok = false;
                break;
            }
            worst_ratio = std::max(worst_ratio, pieces[k] / pieces[k - 1]);
        }
        if (ratios_ok && worst_ratio <= kClosableRatio) {
            double last = pieces.back();
            out.finite = true;
            out.value = total + last * worst_ratio / (1.0 - worst_ratio);
            return out;
        }
        if (!ratios_ok && std::abs(pieces.back()) <= 1e-6 * std::max(std::abs(total), 1e-300)) {
            out.finite = true;
            out.value = total;
            return out;
        }
    }
    out.finite = false;
    out.value = kInf;
    return out;
}

}  // namespace

ConvolutionMajorant make_convolution_majorant(std::function<double(double)> q) {
    ConvolutionMajorant m;
    m.q = std::move(q);
    return m;
}

DyadicIntegral dyadic_integral(const std::function<double(double)>& f, double upper) {
    return dyadic_core(
        [&f](double lo, double hi) { return integrate_gauss(f, lo, hi, 16); }, upper);
}

double schur_bound(ConvolutionMajorant& q, double a, double b) {
    if (!(b > a)) throw InvalidInputError("schur_bound needs an interval with a < b");
    DyadicIntegral r = dyadic_integral(q.q, b - a);
    q.integrable = r.finite;
    q.l1_norm = r.value;
    return r.value;
}

MajorantCheck convolution_majorant_check(const KernelOperator& w, const ConvolutionMajorant& q) {
    const Grid& g = w.grid();
    const int n = g.size();
    const double h = g.spacing();
    auto sample = [&q](double lag) {
        double y;
        try {
            y = q.q(lag);
        } catch (const std::exception& e) {
            throw SamplingError("majorant profile threw at lag " + std::to_string(lag) + ": " +
                                e.what());
        }
        if (!std::isfinite(y))
            throw SamplingError("majorant profile is not finite at lag " + std::to_string(lag));
        return y;
    };
    // Equal kernels reached through different expression trees land a few ulps
    // apart, so domination is tested with relative slack; worst_margin stays raw.
    const double slack = 16.0 * std::numeric_limits<double>::epsilon();
    bool ok = true;
    double worst = -kInf;
    auto check = [&](double entry, double bound) {
        worst = std::max(worst, entry - bound);
        if (entry > bound + slack * std::max(std::abs(entry), std::abs(bound))) ok = false;
    };
    if (w.entry_mode() == EntryMode::NodeSample) {
        // Entries on a uniform grid depend on the lag only, through q.
        std::vector<double> qlag(n);
        for (int d = 1; d < n; ++d) qlag[d] = sample(d * h);
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < i; ++j) check(w.kernel()(i, j), qlag[i - j]);
    } else {
        // Cell-averaged operators carry stencil means, so q gets the same
        // stencil, sampled with the same argument arithmetic.
        const double d = h / 3.0;
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < i; ++j) {
                double s = 0.0;
                for (int p = -1; p <= 1; ++p)
                    for (int r = -1; r <= 1; ++r)
                        s += sample((g.node(i) + p * d) - (g.node(j) + r * d));
                check(w.kernel()(i, j), s / 9.0);
            }
    }
    return {ok, worst};
}

namespace {

// Integral of q over {tau in (lo, hi): q(tau) > m}.  Shells that straddle
// the threshold are bisected; below the resolution floor the indicator is
// applied pointwise at the quadrature nodes.
double indicator_shell(const std::function<double(double)>& q, double m, double lo, double hi,
                       int depth) {
    const GaussRule& rule = gauss_legendre(16);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    int above = 0;
    double vals[16];
    for (int i = 0; i < 16; ++i) {
        vals[i] = q(mid + half * rule.nodes[i]);
        if (!std::isfinite(vals[i])) return kInf;
        if (vals[i] > m) ++above;
    }
    if (above == 16) {
        double s = 0.0;
        for (int i = 0; i < 16; ++i) s += rule.weights[i] * vals[i];
        return half * s;
    }
    if (above == 0) return 0.0;
    if (depth >= 48) {
        double s = 0.0;
        for (int i = 0; i < 16; ++i)
            if (vals[i] > m) s += rule.weights[i] * vals[i];
        return half * s;
    }
    return indicator_shell(q, m, lo, mid, depth + 1) +
           indicator_shell(q, m, mid, hi, depth + 1);
}

}  // namespace

Truncation truncate_kernel(const KernelOperator& w, const ConvolutionMajorant& q, double m) {
    if (!(m > 0.0)) throw InvalidInputError("truncation level must be positive");
    const Grid& g = w.grid();
    const int n = g.size();
    const double h = g.spacing();
    Eigen::MatrixXd t = w.kernel();
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j)
            if (q.q((i - j) * h) > m) t(i, j) = 0.0;
    DyadicIntegral tail = dyadic_core(
        [&](double lo, double hi) { return indicator_shell(q.q, m, lo, hi, 0); },
        g.b() - g.a());
    return {KernelOperator(g, std::move(t), w.entry_mode()), tail.value};
}

ModulusCondition modulus_condition(const std::function<double(double)>& om1,
                                   const std::function<double(double)>& om2, double upper) {
    auto f = [&](double tau) { return om1(tau) * om2(tau) / tau; };
    DyadicIntegral r = dyadic_integral(f, upper);
    return {r.finite ? IntegralVerdict::Finite : IntegralVerdict::Divergent, r.value,
            std::move(r.running)};
}

KernelOperator derive_w(const std::function<double(double, double)>& v,
                        const std::function<double(double)>& phi, const Grid& grid,
                        EntryMode mode) {
    auto w = [&](double x, double t) {
        double d = phi(x) - phi(t);
        if (!(d > 0.0) || !std::isfinite(d))
            throw SingularDivisionError("symbol is not increasing between t=" +
                                        std::to_string(t) + " and x=" + std::to_string(x));
        return std::abs(v(x, t)) / d;
    };
    return from_kernel_fn(w, grid, mode);
}

KernelOperator derive_w(const KernelOperator& v, const MultiplicationOperator& s) {
    return commutator_solve(s, abs_op(v));
}

double holder_norm(const std::function<double(double, double)>& v, double alpha,
                   const Grid& grid) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidInputError("holder_norm needs alpha in (0, 1]");
    double best = 0.0;
    for (int i = 1; i < grid.size(); ++i)
        for (int j = 0; j < i; ++j) {
            double lag = grid.node(i) - grid.node(j);
            double y = std::pow(lag, 1.0 - alpha) * std::abs(v(grid.node(i), grid.node(j)));
            if (!std::isfinite(y))
                throw SamplingError("kernel is not finite at (x=" + std::to_string(grid.node(i)) +
                                    ", t=" + std::to_string(grid.node(j)) + ")");
            best = std::max(best, y);
        }
    return best;
}

}  // namespace voltra
