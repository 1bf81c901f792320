#pragma once

#include <functional>
#include <vector>

namespace voltra {

// Nodes and weights of the k-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Computed once per order via Newton iteration on P_k; cached.
const GaussRule& gauss_legendre(int k);

// integral of f over (lo, hi) by the k-point rule.  All evaluation points
// are interior, so integrable endpoint singularities are never touched.
double integrate_gauss(const std::function<double(double)>& f, double lo, double hi,
                       int k = 16);

}  // namespace voltra
