#include "voltra/grid.hpp"

#include <cmath>
#include <string>

namespace voltra {

Grid::Grid(int n, double a, double b) : n_(n), a_(a), b_(b) {
    if (n < 1)
        throw InvalidInputError("grid size must be at least 1, got " + std::to_string(n));
    if (!(std::isfinite(a) && std::isfinite(b)))
        throw InvalidInputError("grid endpoints must be finite");
    if (!(a < b))
        throw InvalidInputError("grid needs a < b, got a=" + std::to_string(a) +
                                " b=" + std::to_string(b));
    h_ = (b - a) / n;
    nodes_.resize(n);
    for (int i = 0; i < n; ++i) nodes_[i] = a + (i + 0.5) * h_;
}

GridFunction::GridFunction(Grid grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw GridMismatchError("grid function has " + std::to_string(values_.size()) +
                                " values on a grid of size " + std::to_string(grid_.size()));
}

GridFunction sample_function(const std::function<double(double)>& f, const Grid& grid) {
    Eigen::VectorXd v(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double x = grid.node(i);
        double y;
        try {
            y = f(x);
        } catch (const std::exception& e) {
            throw SamplingError("function threw at node " + std::to_string(i) + " (x=" +
                                std::to_string(x) + "): " + e.what());
        }
        if (!std::isfinite(y))
            throw SamplingError("function is not finite at node " + std::to_string(i) +
                                " (x=" + std::to_string(x) + ")");
        v[i] = y;
    }
    return GridFunction(grid, std::move(v));
}

double norm_p(const GridFunction& f, double p) {
    if (std::isinf(p) && p > 0) return f.values().cwiseAbs().maxCoeff();
    if (!(p >= 1.0) || std::isnan(p))
        throw InvalidInputError("norm_p needs p >= 1 or p = infinity");
    double h = f.grid().spacing();
    if (p == 2.0) return std::sqrt(h) * f.values().norm();
    if (p == 1.0) return h * f.values().cwiseAbs().sum();
    double s = 0.0;
    for (int i = 0; i < f.grid().size(); ++i) s += std::pow(std::abs(f[i]), p);
    return std::pow(h * s, 1.0 / p);
}

double inner_product(const GridFunction& f, const GridFunction& g) {
    if (f.grid() != g.grid())
        throw GridMismatchError("inner_product needs both functions on the same grid");
    return f.grid().spacing() * f.values().dot(g.values());
}

}  // namespace voltra
