#pragma once

#include <functional>
#include <vector>

#include "voltra/operators.hpp"

namespace voltra {

// Nonnegative profile q on (0, b-a) dominating the majorant kernel along
// diagonals: w(x, t) <= q(x - t).  l1_norm and integrable are filled in by
// schur_bound; until then the majorant is unclassified.
struct ConvolutionMajorant {
    std::function<double(double)> q;
    double l1_norm = std::numeric_limits<double>::infinity();
    bool integrable = false;
};

ConvolutionMajorant make_convolution_majorant(std::function<double(double)> q);

// Adaptive dyadic integral of f over (0, upper): shells (upper 2^-k-1,
// upper 2^-k) are accumulated until the running total stabilizes to 1e-8
// relative, with a 40-level cap.  At the cap, steadily growing totals are
// classified divergent (last five shells each add more than 1%); decaying
// shell sequences with ratio <= 0.95 are closed with a geometric tail;
// anything else is declared divergent.
struct DyadicIntegral {
    double value;                 // +infinity when not finite
    bool finite;
    std::vector<double> running;  // running totals, one per shell level
    int levels;
};

DyadicIntegral dyadic_integral(const std::function<double(double)>& f, double upper);

// ||q||_1 over (0, b-a).  Fills q.l1_norm and q.integrable; returns the
// value, +infinity when the integral diverges (a legitimate outcome).
double schur_bound(ConvolutionMajorant& q, double a, double b);

struct MajorantCheck {
    bool holds;
    double worst_margin;  // max over entries of w_ij - q(x_i - t_j)
};

// Does q dominate W along diagonals, entry by entry?
MajorantCheck convolution_majorant_check(const KernelOperator& w, const ConvolutionMajorant& q);

struct Truncation {
    KernelOperator truncated;  // W^(m): entries zeroed where q(lag) > m
    double tail_bound;         // integral of q over {q > m}
};

Truncation truncate_kernel(const KernelOperator& w, const ConvolutionMajorant& q, double m);

enum class IntegralVerdict { Finite, Divergent };

struct ModulusCondition {
    IntegralVerdict verdict;
    double value;                 // +infinity when divergent
    std::vector<double> running;
};

// Classifies the integral of om1(tau) om2(tau) / tau over (0, upper).
ModulusCondition modulus_condition(const std::function<double(double)>& om1,
                                   const std::function<double(double)>& om2, double upper);

// Majorant kernel w = |v| / (phi(x) - phi(t)), sampled or cell-averaged.
KernelOperator derive_w(const std::function<double(double, double)>& v,
                        const std::function<double(double)>& phi, const Grid& grid,
                        EntryMode mode = EntryMode::NodeSample);

// Same derivation when only the discretized kernel is available (imported
// matrices): entries |v_ij| / (phi_i - phi_j).
KernelOperator derive_w(const KernelOperator& v, const MultiplicationOperator& s);

// Grid approximation of esssup (x-t)^(1-alpha) |v(x,t)|.
double holder_norm(const std::function<double(double, double)>& v, double alpha,
                   const Grid& grid);

}  // namespace voltra
