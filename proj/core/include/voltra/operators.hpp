#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "voltra/grid.hpp"

namespace voltra {

// How kernel matrix entries are produced from a kernel function k(x, t).
//   NodeSample:  k_ij = k(x_i, x_j) at the cell midpoints.
//   CellAverage: k_ij = mean of k over a 3x3 sub-cell midpoint stencil,
//                which tames integrable singularities near the diagonal.
enum class EntryMode { NodeSample, CellAverage };

// Discretized Volterra integral operator (A f)(x) = int_a^x k(x, t) f(t) dt.
// The kernel matrix is strictly lower triangular: entry (i, j) is only
// nonzero for j < i, mirroring the causal support t < x.
class KernelOperator {
public:
    KernelOperator(Grid grid, Eigen::MatrixXd kernel, EntryMode mode = EntryMode::NodeSample);

    static KernelOperator zero(const Grid& grid);

    const Grid& grid() const { return grid_; }
    const Eigen::MatrixXd& kernel() const { return kernel_; }
    EntryMode entry_mode() const { return entry_mode_; }

    // Action matrix on node-value vectors: h * kernel.
    Eigen::MatrixXd action_matrix() const { return grid_.spacing() * kernel_; }

    friend KernelOperator operator+(const KernelOperator& a, const KernelOperator& b);
    friend KernelOperator operator-(const KernelOperator& a, const KernelOperator& b);
    friend KernelOperator operator*(double c, const KernelOperator& a);

private:
    Grid grid_;
    Eigen::MatrixXd kernel_;
    EntryMode entry_mode_;
};

// Multiplication operator (S f)(x) = phi(x) f(x) with strictly increasing
// symbol phi, sampled at the nodes.
class MultiplicationOperator {
public:
    MultiplicationOperator(Grid grid, Eigen::VectorXd phi);

    static MultiplicationOperator from_function(const std::function<double(double)>& phi,
                                                const Grid& grid);
    static MultiplicationOperator coordinate(const Grid& grid);  // phi(x) = x

    const Grid& grid() const { return grid_; }
    const Eigen::VectorXd& phi() const { return phi_; }
    // phi(b)-side minus phi(a)-side spread over the sampled nodes.
    double phi_span() const { return phi_[phi_.size() - 1] - phi_[0]; }

private:
    Grid grid_;
    Eigen::VectorXd phi_;
};

// Builds a kernel operator by sampling k(x, t) on the causal part j < i.
// Throws SamplingError when k throws or returns a non-finite value there.
KernelOperator from_kernel_fn(const std::function<double(double, double)>& k, const Grid& grid,
                              EntryMode mode = EntryMode::NodeSample);

GridFunction apply(const KernelOperator& a, const GridFunction& f);
GridFunction apply(const MultiplicationOperator& s, const GridFunction& f);

// Composition A o B; again a strictly lower triangular kernel operator with
// kernel matrix h * (A_kernel * B_kernel).
KernelOperator compose(const KernelOperator& a, const KernelOperator& b);

// Largest singular value of a matrix by power iteration on M^T M.
// Deterministic start vector, relative tolerance 1e-10, at most 10000
// rounds; past the cap throws ConvergenceError carrying the last estimate.
double spectral_norm(const Eigen::MatrixXd& m);
double spectral_norm(const Eigen::MatrixXcd& m);

// Discrete L_2 -> L_2 operator norm, i.e. the largest singular value of the
// scaled action matrix h * kernel.
double op_norm(const KernelOperator& a);

struct GelfandEstimate {
    std::vector<double> iterates;   // ||A^m||^(1/m), m = 1 .. n_max
    double estimate;                // last iterate
    double eigenvalue_spr;          // max |lambda| of the action matrix: 0 here
};

// Spectral radius bound via the norms of iterated compositions.  The
// eigenvalues of a strictly triangular matrix are all zero, so the honest
// spectral quantity of the discretization is reported separately and the
// Gelfand sequence is what carries information about the limit operator.
GelfandEstimate gelfand_spr(const KernelOperator& a, int n_max);

// Closed-triangle variant: completes the action matrix with diagonal
// entries h * diag[i], the kernel's diagonal-limit values at the nodes.
// Dropping the diagonal cells costs O(h) for kernels bounded near the
// diagonal, but a corner singularity like the Cesaro majorant c/x keeps
// its entire spectral radius in the first diagonal cell, so certification
// supplies the completion whenever the limit is known and finite.
GelfandEstimate gelfand_spr(const KernelOperator& a, const std::vector<double>& diag,
                            int n_max);

// Entrywise absolute value |A|: the minimal majorant of A.
KernelOperator abs_op(const KernelOperator& a);

struct MajorizationCheck {
    bool holds;
    double worst_violation;  // max over entries of |a_ij| - b_ij, <= 0 when holds
};

// Does B majorize A, i.e. |a_ij| <= b_ij for every entry?
MajorizationCheck majorizes(const KernelOperator& b, const KernelOperator& a);

// Commutator [S, A]: kernel entry (phi(x_i) - phi(x_j)) k_ij.  Exact at the
// discrete level, no quadrature error on top of the kernel's own.
KernelOperator commutator(const MultiplicationOperator& s, const KernelOperator& a);

// Unique strictly triangular X with [S, X] = V: kernel v_ij / (phi_i - phi_j).
// Throws SingularDivisionError when a divisor is below 1e-14 * phi_span.
KernelOperator commutator_solve(const MultiplicationOperator& s, const KernelOperator& v);

// Convolution smoothing by the bump r_eps(x) = eps^-1 r(x/eps), where r is
// the standard bump C exp(-1/(x(1-x))) on (0,1).  The support of r_eps sits
// in (0, eps), so R_eps looks strictly backward and stays inside the
// triangular algebra; the convolution is truncated at the interval ends.
KernelOperator mollifier(const Grid& grid, double eps);

// Two-sided smoothing R_eps A R_eps.
KernelOperator mollify(const KernelOperator& a, double eps);

// True when the matrix is strictly lower triangular (exact zeros on and
// above the diagonal).
bool check_triangular(const Eigen::MatrixXd& m);

}  // namespace voltra
