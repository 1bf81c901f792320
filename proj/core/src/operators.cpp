#include "voltra/operators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "voltra/quadrature.hpp"

namespace voltra {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* op) {
    if (a != b) throw GridMismatchError(std::string(op) + " needs operands on the same grid");
}

std::string at_entry(int i, int j) {
    return " at entry (" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

constexpr double kPowerTol = 1e-10;
constexpr int kPowerCap = 10000;

// Shared power-iteration core for real and complex matrices.
template <typename Matrix>
double power_spectral_norm(const Matrix& m) {
    using Vector = Eigen::Matrix<typename Matrix::Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = m.cols();
    if (n == 0 || m.rows() == 0) return 0.0;
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 1e-3 * std::cos(double(i));
    x /= x.norm();
    Vector y(m.rows());
    double sigma = 0.0, sigma_prev = -1.0;
    for (int it = 0; it < kPowerCap; ++it) {
        y.noalias() = m * x;
        sigma = y.norm();
        if (sigma == 0.0) return 0.0;
        if (std::abs(sigma - sigma_prev) <= kPowerTol * sigma) return sigma;
        sigma_prev = sigma;
        x.noalias() = m.adjoint() * y;
        double nx = x.norm();
        if (nx == 0.0) return sigma;
        x /= nx;
    }
    throw ConvergenceError("power iteration for the spectral norm did not reach relative "
                           "tolerance 1e-10 within 10000 rounds; last estimate " +
                               std::to_string(sigma),
                           sigma);
}

}  // namespace

KernelOperator::KernelOperator(Grid grid, Eigen::MatrixXd kernel, EntryMode mode)
    : grid_(std::move(grid)), kernel_(std::move(kernel)), entry_mode_(mode) {
    const int n = grid_.size();
    if (kernel_.rows() != n || kernel_.cols() != n)
        throw GridMismatchError("kernel matrix is " + std::to_string(kernel_.rows()) + "x" +
                                std::to_string(kernel_.cols()) + " on a grid of size " +
                                std::to_string(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (j >= i && kernel_(i, j) != 0.0)
                throw InvalidInputError("kernel matrix must be strictly lower triangular; "
                                        "nonzero" + at_entry(i, j));
            if (!std::isfinite(kernel_(i, j)))
                throw InvalidInputError("kernel matrix has a non-finite value" + at_entry(i, j));
        }
}

KernelOperator KernelOperator::zero(const Grid& grid) {
    return KernelOperator(grid, Eigen::MatrixXd::Zero(grid.size(), grid.size()));
}

KernelOperator operator+(const KernelOperator& a, const KernelOperator& b) {
    require_same_grid(a.grid_, b.grid_, "operator sum");
    return KernelOperator(a.grid_, a.kernel_ + b.kernel_, a.entry_mode_);
}

KernelOperator operator-(const KernelOperator& a, const KernelOperator& b) {
    require_same_grid(a.grid_, b.grid_, "operator difference");
    return KernelOperator(a.grid_, a.kernel_ - b.kernel_, a.entry_mode_);
}

KernelOperator operator*(double c, const KernelOperator& a) {
    return KernelOperator(a.grid_, c * a.kernel_, a.entry_mode_);
}

MultiplicationOperator::MultiplicationOperator(Grid grid, Eigen::VectorXd phi)
    : grid_(std::move(grid)), phi_(std::move(phi)) {
    if (phi_.size() != grid_.size())
        throw GridMismatchError("symbol vector has " + std::to_string(phi_.size()) +
                                " values on a grid of size " + std::to_string(grid_.size()));
    for (int i = 0; i < phi_.size(); ++i)
        if (!std::isfinite(phi_[i]))
            throw InvalidInputError("symbol is not finite at node " + std::to_string(i));
    for (int i = 0; i + 1 < phi_.size(); ++i)
        if (!(phi_[i] < phi_[i + 1]))
            throw InvalidInputError("symbol must be strictly increasing; violated between "
                                    "nodes " + std::to_string(i) + " and " +
                                    std::to_string(i + 1));
}

MultiplicationOperator MultiplicationOperator::from_function(
    const std::function<double(double)>& phi, const Grid& grid) {
    return MultiplicationOperator(grid, sample_function(phi, grid).values());
}

MultiplicationOperator MultiplicationOperator::coordinate(const Grid& grid) {
    return MultiplicationOperator(grid, grid.nodes());
}

KernelOperator from_kernel_fn(const std::function<double(double, double)>& k, const Grid& grid,
                              EntryMode mode) {
    const int n = grid.size();
    const double h = grid.spacing();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    auto eval = [&](double x, double t, int i, int j) {
        double y;
        try {
            y = k(x, t);
        } catch (const std::exception& e) {
            throw SamplingError("kernel function threw" + at_entry(i, j) + ": " + e.what());
        }
        if (!std::isfinite(y))
            throw SamplingError("kernel function is not finite" + at_entry(i, j) + " (x=" +
                                std::to_string(x) + ", t=" + std::to_string(t) + ")");
        return y;
    };
    if (mode == EntryMode::NodeSample) {
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < i; ++j) m(i, j) = eval(grid.node(i), grid.node(j), i, j);
    } else {
        // 3x3 sub-cell midpoints: offsets -h/3, 0, +h/3 around each node.
        const double d = h / 3.0;
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < i; ++j) {
                double s = 0.0;
                for (int p = -1; p <= 1; ++p)
                    for (int q = -1; q <= 1; ++q)
                        s += eval(grid.node(i) + p * d, grid.node(j) + q * d, i, j);
                m(i, j) = s / 9.0;
            }
    }
    return KernelOperator(grid, std::move(m), mode);
}

GridFunction apply(const KernelOperator& a, const GridFunction& f) {
    require_same_grid(a.grid(), f.grid(), "apply");
    return GridFunction(f.grid(), a.grid().spacing() * (a.kernel() * f.values()));
}

GridFunction apply(const MultiplicationOperator& s, const GridFunction& f) {
    require_same_grid(s.grid(), f.grid(), "apply");
    return GridFunction(f.grid(), s.phi().cwiseProduct(f.values()));
}

KernelOperator compose(const KernelOperator& a, const KernelOperator& b) {
    require_same_grid(a.grid(), b.grid(), "compose");
    Eigen::MatrixXd prod(a.grid().size(), a.grid().size());
    prod.noalias() = a.kernel() * b.kernel();
    prod *= a.grid().spacing();
    return KernelOperator(a.grid(), std::move(prod), a.entry_mode());
}

double spectral_norm(const Eigen::MatrixXd& m) { return power_spectral_norm(m); }
double spectral_norm(const Eigen::MatrixXcd& m) { return power_spectral_norm(m); }

double op_norm(const KernelOperator& a) {
    return a.grid().spacing() * spectral_norm(a.kernel());
}

namespace {

GelfandEstimate gelfand_of_action(const Eigen::MatrixXd& q, int n_max) {
    if (n_max < 2) throw InvalidInputError("gelfand_spr needs n_max >= 2");
    GelfandEstimate out;
    out.iterates.reserve(n_max);
    out.eigenvalue_spr = q.diagonal().cwiseAbs().maxCoeff();
    Eigen::MatrixXd p = q, next(q.rows(), q.cols());
    for (int m = 1; m <= n_max; ++m) {
        if (m > 1) {
            next.noalias() = p * q;
            p.swap(next);
        }
        out.iterates.push_back(std::pow(spectral_norm(p), 1.0 / m));
    }
    out.estimate = out.iterates.back();
    return out;
}

}  // namespace

GelfandEstimate gelfand_spr(const KernelOperator& a, int n_max) {
    return gelfand_of_action(a.action_matrix(), n_max);
}

GelfandEstimate gelfand_spr(const KernelOperator& a, const std::vector<double>& diag,
                            int n_max) {
    const int n = a.grid().size();
    if (int(diag.size()) != n)
        throw GridMismatchError("gelfand_spr: diagonal completion has " +
                                std::to_string(diag.size()) + " entries for a grid of " +
                                std::to_string(n));
    Eigen::MatrixXd q = a.action_matrix();
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(diag[i]))
            throw InvalidInputError("gelfand_spr: diagonal completion entry " +
                                    std::to_string(i) + " is not finite");
        q(i, i) = a.grid().spacing() * diag[i];
    }
    return gelfand_of_action(q, n_max);
}

KernelOperator abs_op(const KernelOperator& a) {
    return KernelOperator(a.grid(), a.kernel().cwiseAbs(), a.entry_mode());
}

MajorizationCheck majorizes(const KernelOperator& b, const KernelOperator& a) {
    require_same_grid(b.grid(), a.grid(), "majorizes");
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < a.grid().size(); ++i)
        for (int j = 0; j < i; ++j)
            worst = std::max(worst, std::abs(a.kernel()(i, j)) - b.kernel()(i, j));
    return {worst <= 0.0, worst};
}

KernelOperator commutator(const MultiplicationOperator& s, const KernelOperator& a) {
    require_same_grid(s.grid(), a.grid(), "commutator");
    const int n = a.grid().size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) m(i, j) = (s.phi()[i] - s.phi()[j]) * a.kernel()(i, j);
    return KernelOperator(a.grid(), std::move(m), a.entry_mode());
}

KernelOperator commutator_solve(const MultiplicationOperator& s, const KernelOperator& v) {
    require_same_grid(s.grid(), v.grid(), "commutator_solve");
    const int n = v.grid().size();
    const double floor = 1e-14 * s.phi_span();
    // phi is increasing, so the smallest divisor over the strict lower
    // triangle is the smallest consecutive increment.
    for (int i = 0; i + 1 < n; ++i) {
        double d = s.phi()[i + 1] - s.phi()[i];
        if (d <= 0.0 || d < floor)
            throw SingularDivisionError(
                "symbol increment " + std::to_string(d) + " between nodes " + std::to_string(i) +
                " and " + std::to_string(i + 1) + " is below the divisor floor " +
                std::to_string(floor));
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) m(i, j) = v.kernel()(i, j) / (s.phi()[i] - s.phi()[j]);
    return KernelOperator(v.grid(), std::move(m), v.entry_mode());
}

namespace {

double bump_normalizer() {
    // integral of exp(-1/(x(1-x))) over (0,1), composite Gauss.
    static const double value = [] {
        auto f = [](double x) { return std::exp(-1.0 / (x * (1.0 - x))); };
        double s = 0.0;
        for (int k = 0; k < 8; ++k) s += integrate_gauss(f, k / 8.0, (k + 1) / 8.0, 32);
        return s;
    }();
    return value;
}

}  // namespace

KernelOperator mollifier(const Grid& grid, double eps) {
    if (!(eps > 0.0)) throw InvalidInputError("mollifier width must be positive");
    const double c = 1.0 / bump_normalizer();
    const int n = grid.size();
    const double h = grid.spacing();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            double u = (i - j) * h / eps;
            if (u < 1.0) m(i, j) = c / eps * std::exp(-1.0 / (u * (1.0 - u)));
        }
    return KernelOperator(grid, std::move(m));
}

KernelOperator mollify(const KernelOperator& a, double eps) {
    KernelOperator r = mollifier(a.grid(), eps);
    return compose(r, compose(a, r));
}

bool check_triangular(const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i; j < m.cols(); ++j)
            if (m(i, j) != 0.0) return false;
    return true;
}

}  // namespace voltra
