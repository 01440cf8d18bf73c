#include <benchmark/benchmark.h>

#include <cmath>
#include <optional>

#include "gflab/derivatives.hpp"
#include "gflab/distributions.hpp"
#include "gflab/mollifier.hpp"
#include "gflab/norms.hpp"
#include "gflab/wave.hpp"

using namespace gflab;

namespace {

Trapezoid bench_region() { return Trapezoid(2.0, 1.5); }

GridFunction1D sine_data(double h) {
    return sample_solver_data([](double x) { return std::sin(x); }, bench_region(), h);
}

GridFunction1D zero_data(double h) {
    return sample_solver_data([](double) { return 0.0; }, bench_region(), h);
}

void BM_DalembertLinear(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const auto a = sine_data(h);
    const auto b = zero_data(h);
    for (auto _ : state) {
        auto u = dalembert_linear(a, b, std::nullopt, bench_region());
        benchmark::DoNotOptimize(u.values().data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DalembertLinear)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_PicardSemilinear(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const auto a = sine_data(h);
    const auto b = zero_data(h);
    WaveProblem p{a, b, std::nullopt, NonlinearitySpec::odd_squash(1.0), bench_region()};
    for (auto _ : state) {
        auto r = picard_semilinear(p, PicardSettings{});
        benchmark::DoNotOptimize(r.solution.values().data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PicardSemilinear)->RangeMultiplier(2)->Range(64, 256)->Complexity();

void BM_FdDerivativeMixed(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto f = GridFunction2D::sample(-2.0, 0.0, 4.0 / static_cast<double>(n), n + 1,
                                          n / 2 + 1, [](double x, double t) {
                                              return std::sin(3 * x) * std::cos(2 * t);
                                          });
    for (auto _ : state) {
        auto d = fd_derivative(f, {1, 1});
        benchmark::DoNotOptimize(d.values().data());
    }
}
BENCHMARK(BM_FdDerivativeMixed)->RangeMultiplier(2)->Range(256, 2048);

void BM_L1NormTrapezoid(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const double h = 4.0 / static_cast<double>(n);
    const auto f = GridFunction2D::sample(-2.0, 0.0, h, n + 1, n / 2 + 1,
                                          [](double x, double t) { return x * t + 1.0; });
    const Trapezoid region(1.9, 1.4);
    for (auto _ : state) benchmark::DoNotOptimize(l1_norm(f, region));
}
BENCHMARK(BM_L1NormTrapezoid)->RangeMultiplier(2)->Range(256, 2048);

void BM_ImbedDelta(benchmark::State& state) {
    const auto& phi = default_mollifier();
    const double eps = 1.0 / static_cast<double>(state.range(0));
    const double h = eps / 8.0;
    const auto spec = DistributionSpec::delta(0.0);
    const auto geom = solver_data_geometry(bench_region(), h);
    for (auto _ : state) {
        auto g = GridFunction1D::sample(geom.x0, geom.h, geom.n, [&](double x) {
            return spec.imbedded_value(x, eps, phi);
        });
        benchmark::DoNotOptimize(g.values().data());
    }
}
BENCHMARK(BM_ImbedDelta)->RangeMultiplier(2)->Range(8, 64);

} // namespace

BENCHMARK_MAIN();
