#include "voltra/quadrature.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "voltra/errors.hpp"

namespace voltra {

namespace {

GaussRule build_rule(int k) {
    GaussRule r;
    r.nodes.resize(k);
    r.weights.resize(k);
    for (int i = 0; i < k; ++i) {
        // Chebyshev guess, then Newton on P_k(x) = 0.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= k; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = k * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int k) {
    if (k < 1) throw InvalidInputError("gauss_legendre order must be positive");
    static std::map<int, GaussRule> cache;
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, build_rule(k)).first;
    return it->second;
}

double integrate_gauss(const std::function<double(double)>& f, double lo, double hi, int k) {
    const GaussRule& r = gauss_legendre(k);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return half * s;
}

}  // namespace voltra
