#include "voltra/evolution.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "voltra/friedrichs.hpp"

namespace voltra {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

VectorXcd pack(const ComplexGridFunction& f) {
    VectorXcd z(f.real.size());
    z.real() = f.real;
    z.imag() = f.imag;
    return z;
}

ComplexGridFunction unpack(const Grid& g, const VectorXcd& z) {
    return {g, z.real(), z.imag()};
}

VectorXcd phase_vector(const MultiplicationOperator& s, double t) {
    VectorXcd d(s.grid().size());
    for (int i = 0; i < s.grid().size(); ++i) {
        double arg = t * s.phi()[i];
        d[i] = std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return d;
}

MatrixXcd generator(const MultiplicationOperator& s, const KernelOperator& v, double t) {
    MatrixXcd a = std::complex<double>(0.0, t) * v.action_matrix();
    a.diagonal() += (std::complex<double>(0.0, t) * s.phi()).eval();
    return a;
}

void check_time(double t, double t_cap) {
    if (!std::isfinite(t)) throw InvalidInputError("evolution time must be finite");
    if (std::abs(t) > t_cap)
        throw InvalidInputError("evolution time " + std::to_string(t) +
                                " exceeds the cap " + std::to_string(t_cap));
}

}  // namespace

ComplexGridFunction to_complex(const GridFunction& f) {
    return {f.grid(), f.values(), Eigen::VectorXd::Zero(f.grid().size())};
}

double norm_2(const ComplexGridFunction& f) {
    double s = f.real.squaredNorm() + f.imag.squaredNorm();
    return std::sqrt(f.grid.spacing() * s);
}

Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& a) {
    if (!a.allFinite()) throw OverflowError("matrix exponential of a non-finite matrix");
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const Eigen::Index n = a.rows();
    const MatrixXcd id = MatrixXcd::Identity(n, n);

    double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5) squarings = int(std::ceil(std::log2(norm1 / 0.5)));
    MatrixXcd as = a / std::pow(2.0, squarings);

    MatrixXcd a2 = as * as;
    MatrixXcd a4 = a2 * a2;
    MatrixXcd a6 = a2 * a4;
    MatrixXcd u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                        b[3] * a2 + b[1] * id);
    MatrixXcd w = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                  b[2] * a2 + b[0] * id;
    MatrixXcd e = (w - u).partialPivLu().solve(w + u);
    for (int k = 0; k < squarings; ++k) {
        e = (e * e).eval();
        if (!e.allFinite())
            throw OverflowError("matrix exponential overflowed while squaring");
    }
    if (!e.allFinite()) throw OverflowError("matrix exponential produced non-finite values");
    return e;
}

ComplexGridFunction evolve_S(const MultiplicationOperator& s, double t,
                             const ComplexGridFunction& f) {
    if (s.grid() != f.grid) throw GridMismatchError("evolve_S needs f on the grid of S");
    check_time(t, std::numeric_limits<double>::infinity());
    return unpack(f.grid, phase_vector(s, t).cwiseProduct(pack(f)));
}

ComplexGridFunction evolve_S(const MultiplicationOperator& s, double t,
                             const GridFunction& f) {
    return evolve_S(s, t, to_complex(f));
}

ComplexGridFunction evolve_T(const MultiplicationOperator& s, const KernelOperator& v,
                             double t, const ComplexGridFunction& f, double t_cap) {
    if (s.grid() != v.grid() || s.grid() != f.grid)
        throw GridMismatchError("evolve_T needs S, V, f on one grid");
    check_time(t, t_cap);
    MatrixXcd e = matrix_exponential(generator(s, v, t));
    return unpack(f.grid, e * pack(f));
}

ComplexGridFunction evolve_T(const MultiplicationOperator& s, const KernelOperator& v,
                             double t, const GridFunction& f, double t_cap) {
    return evolve_T(s, v, t, to_complex(f), t_cap);
}

ComplexGridFunction conjugated_evolution(const KernelOperator& k,
                                         const MultiplicationOperator& s, double t,
                                         const GridFunction& f) {
    if (k.grid() != s.grid() || s.grid() != f.grid())
        throw GridMismatchError("conjugated_evolution needs K, S, f on one grid");
    KernelOperator m = invert_transform(k);
    const Eigen::MatrixXd qk = k.action_matrix();
    const Eigen::MatrixXd qm = m.action_matrix();
    VectorXcd z = pack(to_complex(f));
    z += qm * z;                                      // (I+M) f
    z = phase_vector(s, t).cwiseProduct(z).eval();    // e^{itS} ...
    z += (qk * z).eval();                             // (I+K) ...
    return unpack(f.grid(), z);
}

StabilityReport stability_scan(const MultiplicationOperator& s, const KernelOperator& v,
                               const KernelOperator* k, const std::vector<double>& t_grid,
                               double t_cap) {
    if (t_grid.empty()) throw InvalidInputError("stability_scan needs a nonempty t grid");
    if (s.grid() != v.grid()) throw GridMismatchError("stability_scan needs S, V on one grid");
    const int n = s.grid().size();
    StabilityReport report;
    report.t_grid = t_grid;
    report.has_transform = k != nullptr;

    Eigen::MatrixXd ik, im;
    if (k) {
        KernelOperator m = invert_transform(*k);
        ik = Eigen::MatrixXd::Identity(n, n) + k->action_matrix();
        im = Eigen::MatrixXd::Identity(n, n) + m.action_matrix();
        report.cond_bound = spectral_norm(ik) * spectral_norm(im);
    }

    for (double t : t_grid) {
        check_time(t, t_cap);
        MatrixXcd e = matrix_exponential(generator(s, v, t));
        double norm_direct = spectral_norm(e);
        report.norms.push_back(norm_direct);
        if (k) {
            MatrixXcd conj = ik * phase_vector(s, t).asDiagonal() * im;
            report.norms_conjugated.push_back(spectral_norm(conj));
            double gap = spectral_norm(MatrixXcd(e - conj)) / std::max(norm_direct, 1e-300);
            report.gaps.push_back(gap);
        }
    }
    report.sup_norm = *std::max_element(report.norms.begin(), report.norms.end());
    if (!report.gaps.empty())
        report.conjugation_gap = *std::max_element(report.gaps.begin(), report.gaps.end());
    return report;
}

}  // namespace voltra
