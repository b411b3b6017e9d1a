#include <benchmark/benchmark.h>

#include "jspec/decomposition.hpp"
#include "jspec/expansion.hpp"
#include "jspec/herglotz.hpp"
#include "jspec/recurrence.hpp"
#include "jspec/spectral.hpp"

namespace {

jspec::CoefficientModel bench_model(long half_width) {
    std::vector<double> a(2 * half_width + 1, 1.0), b(2 * half_width + 1);
    for (size_t i = 0; i < b.size(); ++i) b[i] = 0.4 * std::sin(3.7 * double(i));
    return jspec::CoefficientModel(-half_width, a, b, jspec::ConstantTail{1.0, 0.0});
}

void BM_Eigendecompose(benchmark::State& state) {
    const long n = state.range(0);
    const auto op = jspec::build_whole_line(bench_model(n), n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(jspec::eigendecompose(op));
    }
}
BENCHMARK(BM_Eigendecompose)->Arg(15)->Arg(30)->Arg(60);

void BM_HalfLineM(benchmark::State& state) {
    const auto model = bench_model(12);
    const jspec::Complex z{0.3, 0.4};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            jspec::half_line_m(model, jspec::Side::plus, jspec::BoundaryAngle(0.3), z, 256));
    }
}
BENCHMARK(BM_HalfLineM);

void BM_DetectSubordinate(benchmark::State& state) {
    const auto model = jspec::CoefficientModel::free_model();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            jspec::detect_subordinate(model, jspec::Side::plus, 3.0, state.range(0), 1e-4));
    }
}
BENCHMARK(BM_DetectSubordinate)->Arg(4096)->Arg(65536);

void BM_GammaEstimate(benchmark::State& state) {
    const auto model = bench_model(12);
    const auto sys = jspec::eigendecompose(jspec::build_whole_line(model, 12));
    const jspec::EpsSchedule sched(0.1, 0.5, 21);
    for (auto _ : state) {
        benchmark::DoNotOptimize(jspec::gamma_estimate(sys, sys.energies(5), 6, sched));
    }
}
BENCHMARK(BM_GammaEstimate);

void BM_RSIntegral(benchmark::State& state) {
    const auto model = bench_model(10);
    const auto q = jspec::build_q(jspec::eigendecompose(jspec::build_whole_line(model, 10)));
    const auto part = jspec::uniform_partition(q, 0.0, 3.14159, state.range(0));
    const auto F = jspec::FunctionSpec::power(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(jspec::rs_integral(model, q, F, part));
    }
}
BENCHMARK(BM_RSIntegral)->Arg(32)->Arg(256);

} // namespace

BENCHMARK_MAIN();
