#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>

#include "voltra/evolution.hpp"
#include "voltra/friedrichs.hpp"
#include "voltra/operators.hpp"

using namespace voltra;

namespace {

KernelOperator lag_kernel(const Grid& g) {
    return from_kernel_fn([](double x, double t) { return x - t; }, g,
                          EntryMode::NodeSample);
}

void bm_compose(benchmark::State& state) {
    Grid g(static_cast<int>(state.range(0)), 0.0, 1.0);
    KernelOperator v = lag_kernel(g);
    for (auto _ : state) {
        KernelOperator c = compose(v, v);
        benchmark::DoNotOptimize(c.kernel().data());
    }
}

void bm_op_norm(benchmark::State& state) {
    Grid g(static_cast<int>(state.range(0)), 0.0, 1.0);
    KernelOperator v = lag_kernel(g);
    for (auto _ : state) benchmark::DoNotOptimize(op_norm(v));
}

void bm_gelfand(benchmark::State& state) {
    Grid g(static_cast<int>(state.range(0)), 0.0, 1.0);
    KernelOperator w =
        from_kernel_fn([](double x, double) { return 0.5 / x; }, g, EntryMode::NodeSample);
    for (auto _ : state) {
        GelfandEstimate e = gelfand_spr(w, 10);
        benchmark::DoNotOptimize(e.estimate);
    }
}

void bm_friedrichs(benchmark::State& state) {
    Grid g(static_cast<int>(state.range(0)), 0.0, 1.0);
    MultiplicationOperator s = MultiplicationOperator::coordinate(g);
    KernelOperator v = lag_kernel(g);
    KernelOperator w =
        from_kernel_fn([](double, double) { return 1.0; }, g, EntryMode::NodeSample);
    for (auto _ : state) {
        SimilarityTransform k = friedrichs_iterate(s, v, w, 1e-10, 64);
        benchmark::DoNotOptimize(k.residual);
    }
}

void bm_cell_average(benchmark::State& state) {
    Grid g(static_cast<int>(state.range(0)), 0.0, 1.0);
    auto w = [](double x, double t) { return std::pow(x - t, -0.5); };
    for (auto _ : state) {
        KernelOperator a = from_kernel_fn(w, g, EntryMode::CellAverage);
        benchmark::DoNotOptimize(a.kernel().data());
    }
}

void bm_matrix_exponential(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    Grid g(n, 0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double x = g.node(i), t = g.node(j);
            m(i, j) = std::complex<double>(0.0, x > t ? x - t : 0.0);
            if (i == j) m(i, j) += std::complex<double>(0.0, x);
        }
    for (auto _ : state) {
        Eigen::MatrixXcd e = matrix_exponential(m);
        benchmark::DoNotOptimize(e.data());
    }
}

}  // namespace

BENCHMARK(bm_compose)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_op_norm)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_gelfand)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_friedrichs)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_cell_average)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_matrix_exponential)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
