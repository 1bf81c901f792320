#pragma once

#include <Eigen/Core>
#include <functional>

#include "voltra/errors.hpp"

namespace voltra {

// Uniform midpoint discretization of a bounded interval (a, b).
// Node i sits at the center of the i-th of n equal cells:
//   x_i = a + (i + 1/2) h,  h = (b - a) / n,  i = 0 .. n-1.
class Grid {
public:
    Grid(int n, double a, double b);

    int size() const { return n_; }
    double a() const { return a_; }
    double b() const { return b_; }
    double spacing() const { return h_; }
    double node(int i) const { return nodes_[i]; }
    const Eigen::VectorXd& nodes() const { return nodes_; }

    friend bool operator==(const Grid& lhs, const Grid& rhs) {
        return lhs.n_ == rhs.n_ && lhs.a_ == rhs.a_ && lhs.b_ == rhs.b_;
    }
    friend bool operator!=(const Grid& lhs, const Grid& rhs) { return !(lhs == rhs); }

private:
    int n_;
    double a_, b_, h_;
    Eigen::VectorXd nodes_;
};

// A vector of node values paired with the grid it lives on.
class GridFunction {
public:
    GridFunction(Grid grid, Eigen::VectorXd values);

    const Grid& grid() const { return grid_; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::VectorXd& values() { return values_; }
    double operator[](int i) const { return values_[i]; }

private:
    Grid grid_;
    Eigen::VectorXd values_;
};

// Evaluates f at the grid nodes.  Throws SamplingError when f throws or
// returns a non-finite value, naming the offending node.
GridFunction sample_function(const std::function<double(double)>& f, const Grid& grid);

// Discrete L_p norm: (sum_i h |f_i|^p)^(1/p); p = infinity gives max |f_i|.
double norm_p(const GridFunction& f, double p);

// Discrete L_2 pairing sum_i h f_i g_i on a shared grid.
double inner_product(const GridFunction& f, const GridFunction& g);

}  // namespace voltra
