#pragma once

#include <Eigen/Core>
#include <vector>

#include "voltra/operators.hpp"

namespace voltra {

// Complex node values as paired real vectors; complex arithmetic stays an
// implementation detail of this module.
struct ComplexGridFunction {
    Grid grid;
    Eigen::VectorXd real;
    Eigen::VectorXd imag;
};

ComplexGridFunction to_complex(const GridFunction& f);
double norm_2(const ComplexGridFunction& f);

// Degree-13 rational approximant with scaling and squaring; the input is
// scaled until its 1-norm is at most 0.5.  Throws OverflowError on
// non-finite intermediates.
Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& a);

// e^{itS} f: exact multiplication by exp(i t phi(x)).
ComplexGridFunction evolve_S(const MultiplicationOperator& s, double t,
                             const GridFunction& f);
ComplexGridFunction evolve_S(const MultiplicationOperator& s, double t,
                             const ComplexGridFunction& f);

// e^{itT} f with T = S + V, through the matrix exponential of the action
// matrix i t (diag(phi) + h V).  |t| beyond the cap is refused.
ComplexGridFunction evolve_T(const MultiplicationOperator& s, const KernelOperator& v,
                             double t, const GridFunction& f, double t_cap = 100.0);
ComplexGridFunction evolve_T(const MultiplicationOperator& s, const KernelOperator& v,
                             double t, const ComplexGridFunction& f, double t_cap = 100.0);

// (I+K) e^{itS} (I+K)^{-1} f; the inverse factor comes from
// invert_transform, so inversion errors propagate.
ComplexGridFunction conjugated_evolution(const KernelOperator& k,
                                         const MultiplicationOperator& s, double t,
                                         const GridFunction& f);

struct StabilityReport {
    std::vector<double> t_grid;
    std::vector<double> norms;             // ||e^{itT}|| per t
    std::vector<double> norms_conjugated;  // empty without a transform
    std::vector<double> gaps;              // relative direct-vs-conjugated gap per t
    double sup_norm = 0.0;
    double conjugation_gap = 0.0;
    double cond_bound = 0.0;               // ||I+K|| ||(I+K)^-1||
    bool has_transform = false;
};

// Operator norms of the group along t_grid; with a transform K the scan
// also compares against the conjugated form and reports the similarity
// bound cond(I+K).
StabilityReport stability_scan(const MultiplicationOperator& s, const KernelOperator& v,
                               const KernelOperator* k, const std::vector<double>& t_grid,
                               double t_cap = 100.0);

}  // namespace voltra
