#include "voltra/friedrichs.hpp"

#include <cmath>
#include <limits>

namespace voltra {

namespace {

constexpr double kChainSlack = 1e-12;
constexpr int kChainDepth = 6;
constexpr int kDivergenceRun = 5;
constexpr double kNeumannTermTol = 1e-12;
constexpr double kCrossCheckCap = 1e-6;

}  // namespace

SimilarityTransform friedrichs_iterate(const MultiplicationOperator& s,
                                       const KernelOperator& v, const KernelOperator& w,
                                       double tol, int n_cap) {
    if (!(tol > 0.0)) throw InvalidInputError("friedrichs_iterate needs tol > 0");
    if (n_cap < 1) throw InvalidInputError("friedrichs_iterate needs n_cap >= 1");
    if (s.grid() != v.grid() || v.grid() != w.grid())
        throw GridMismatchError("friedrichs_iterate needs S, V, W on the same grid");

    std::vector<double> norms;
    std::vector<double> ratios;
    std::vector<KernelOperator> leading;

    KernelOperator term = commutator_solve(s, -1.0 * v);
    Eigen::MatrixXd sum = term.kernel();
    norms.push_back(op_norm(term));
    leading.push_back(term);
    int used = 1;
    int growth_run = 0;

    bool done = norms[0] <= tol;  // rho = 0 with a single term
    for (int n = 2; n <= n_cap && !done; ++n) {
        term = commutator_solve(s, -1.0 * compose(v, term));
        double norm_n = op_norm(term);
        double rho = norms.back() > 0.0 ? norm_n / norms.back() : 0.0;
        norms.push_back(norm_n);
        ratios.push_back(rho);
        growth_run = rho >= 1.0 ? growth_run + 1 : 0;
        if (growth_run >= kDivergenceRun)
            throw DivergenceError(
                "successive approximation is growing: " + std::to_string(kDivergenceRun) +
                    " consecutive term ratios >= 1 (last ratio " + std::to_string(rho) + ")",
                norms, ratios);
        sum += term.kernel();
        if (int(leading.size()) < kChainDepth) leading.push_back(term);
        used = n;
        done = rho < 1.0 && norm_n <= tol * (1.0 - rho);
    }

    SimilarityTransform out{KernelOperator(v.grid(), std::move(sum), v.entry_mode()),
                            used,
                            std::move(norms),
                            std::move(ratios),
                            0.0,
                            false,
                            0,
                            0.0,
                            std::move(leading)};
    ChainCheck chain = check_chain(out.leading_terms, w);
    out.chain_ok = chain.holds;
    out.chain_checked = int(out.leading_terms.size());
    out.residual = intertwining_residual(s, v, out.K);
    out.spr_K_estimate = gelfand_spr(out.K, 12).estimate;
    return out;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::SimilarByThm1: return "similar-by-thm1";
        case Verdict::SimilarByCor1: return "similar-by-cor1";
        default: return "inconclusive";
    }
}

Certificate spr_certificate(const KernelOperator& w, ConvolutionMajorant* q,
                            double spr_margin, int gelfand_terms,
                            const std::vector<double>* w_diag) {
    if (!(spr_margin > 0.0)) throw InvalidInputError("spr_certificate needs a positive margin");
    for (int i = 1; i < w.grid().size(); ++i)
        for (int j = 0; j < i; ++j)
            if (w.kernel()(i, j) < 0.0)
                throw InvalidInputError("spr_certificate needs a nonnegative majorant kernel");

    Certificate cert;
    cert.spr_margin = spr_margin;
    cert.grid_n = w.grid().size();
    cert.gelfand_terms = gelfand_terms;

    if (q) {
        cert.has_schur = true;
        MajorantCheck check = convolution_majorant_check(w, *q);
        cert.majorant_check_ok = check.holds;
        cert.majorant_margin = check.worst_margin;
        cert.schur_value = schur_bound(*q, w.grid().a(), w.grid().b());
        cert.schur_integrable = q->integrable;
        cert.volterra_flag = check.holds && q->integrable;
    }

    GelfandEstimate gelfand = w_diag ? gelfand_spr(w, *w_diag, gelfand_terms)
                                     : gelfand_spr(w, gelfand_terms);
    cert.gelfand_estimate = gelfand.estimate;
    cert.gelfand_corner = w_diag != nullptr;
    cert.eigenvalue_spr = gelfand.eigenvalue_spr;

    if (cert.volterra_flag)
        cert.verdict = Verdict::SimilarByCor1;
    else if (cert.gelfand_estimate < spr_margin)
        cert.verdict = Verdict::SimilarByThm1;
    else
        cert.verdict = Verdict::Inconclusive;
    return cert;
}

Inversion invert_transform_checked(const KernelOperator& k) {
    const int n = k.grid().size();
    const double h = k.grid().spacing();
    const Eigen::MatrixXd q = k.action_matrix();

    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) + q;
    Eigen::MatrixXd direct = a.triangularView<Eigen::UnitLower>().solve((-q).eval());

    // Neumann route: sum of (-Q)^p, p >= 1, with a contraction ratio guard.
    // Strict triangularity makes the series finite, but a non-contracting
    // prefix signals spr(K) >= 1 and invalidates the precondition.
    Eigen::MatrixXd neumann = -q;
    Eigen::MatrixXd p_term = -q;
    double prev_norm = spectral_norm(p_term);
    int terms = 1;
    int growth_run = 0;
    for (int p = 2; p <= n && prev_norm > kNeumannTermTol; ++p) {
        p_term = (-q * p_term).eval();
        double norm_p = spectral_norm(p_term);
        if (!std::isfinite(norm_p))
            throw InversionError("Neumann series for (I+K)^-1 overflowed; spectral radius "
                                 "of K is not below 1");
        growth_run = norm_p >= prev_norm && norm_p >= 1.0 ? growth_run + 1 : 0;
        if (growth_run >= kDivergenceRun)
            throw InversionError("Neumann series for (I+K)^-1 is not contracting (term " +
                                 std::to_string(p) + " has norm " + std::to_string(norm_p) +
                                 "); spectral radius estimate >= 1");
        neumann += p_term;
        prev_norm = norm_p;
        terms = p;
    }

    double gap = spectral_norm(Eigen::MatrixXd(direct - neumann));
    if (gap > kCrossCheckCap)
        throw InversionError("inversion routes disagree by " + std::to_string(gap) +
                             " in operator norm; I+K is too ill conditioned to invert");
    return {KernelOperator(k.grid(), direct / h, k.entry_mode()), gap, terms};
}

KernelOperator invert_transform(const KernelOperator& k) {
    return invert_transform_checked(k).M;
}

double intertwining_residual(const MultiplicationOperator& s, const KernelOperator& v,
                             const KernelOperator& k) {
    KernelOperator remainder = commutator(s, k) + compose(v, k) + v;
    return op_norm(remainder) / std::max(op_norm(v), 1e-300);
}

ChainCheck check_chain(const std::vector<KernelOperator>& terms, const KernelOperator& w) {
    ChainCheck out;
    if (terms.empty()) return out;
    const Grid& g = w.grid();
    out.worst_violation = -std::numeric_limits<double>::infinity();
    KernelOperator w_power = w;
    const KernelOperator* prev = nullptr;
    for (size_t n = 0; n < terms.size(); ++n) {
        if (terms[n].grid() != g)
            throw GridMismatchError("check_chain needs all terms on the grid of W");
        if (n > 0) w_power = compose(w_power, w);
        // Sharper link |K_n| <= W |K_{n-1}|; |K_0| = I collapses the n = 1
        // case onto |K_1| <= W, which coincides with the power bound.
        KernelOperator sharper = prev ? compose(w, abs_op(*prev)) : w;
        bool failed = false;
        for (int i = 1; i < g.size(); ++i)
            for (int j = 0; j < i; ++j) {
                double lhs = std::abs(terms[n].kernel()(i, j));
                for (double bound : {w_power.kernel()(i, j), sharper.kernel()(i, j)}) {
                    double excess = lhs - bound;
                    out.worst_violation = std::max(out.worst_violation, excess);
                    if (excess > kChainSlack * std::max(1.0, std::abs(bound))) failed = true;
                }
            }
        if (failed && out.first_failure < 0) {
            out.holds = false;
            out.first_failure = int(n) + 1;
        }
        prev = &terms[n];
    }
    if (!std::isfinite(out.worst_violation)) out.worst_violation = 0.0;
    return out;
}

}  // namespace voltra
