#include <nhent/corr.hpp>
#include <nhent/dynamics.hpp>
#include <nhent/ent.hpp>
#include <nhent/model_zoo.hpp>
#include <nhent/oracle.hpp>
#include <nhent/scaling.hpp>
#include <nhent/spectra.hpp>

#include <benchmark/benchmark.h>

using namespace nhent;

namespace {

void BM_BiorthogonalEigSkin(benchmark::State& state) {
    const auto K = build_hatano_nelson(static_cast<int>(state.range(0)), 1.0, 0.5, Boundary::open);
    for (auto _ : state) benchmark::DoNotOptimize(biorthogonal_eig(K));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BiorthogonalEigSkin)->RangeMultiplier(2)->Range(32, 256)->Complexity(benchmark::oNCubed)
    ->Unit(benchmark::kMillisecond);

void BM_BiorthogonalEigHermitian(benchmark::State& state) {
    const auto K = build_hatano_nelson(static_cast<int>(state.range(0)), 1.0, 0.0, Boundary::periodic);
    for (auto _ : state) benchmark::DoNotOptimize(biorthogonal_eig(K));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BiorthogonalEigHermitian)->RangeMultiplier(2)->Range(32, 256)->Complexity(benchmark::oNCubed)
    ->Unit(benchmark::kMillisecond);

void BM_HalfCutEntropy(benchmark::State& state) {
    const int cells = static_cast<int>(state.range(0));
    const auto sys = biorthogonal_eig(build_nh_ssh_real(cells, 1.5, 1.0, 0.3, Boundary::periodic));
    const auto sel = select_occupied(sys, Rational{1, 2});
    const auto part = Partition::range(0, cells);
    for (auto _ : state) benchmark::DoNotOptimize(analyze(correlation_matrix(sys, sel, part)));
}
BENCHMARK(BM_HalfCutEntropy)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

void BM_ChordSeries(benchmark::State& state) {
    const int cells = static_cast<int>(state.range(0));
    const auto sys = biorthogonal_eig(build_nh_ssh_real(cells, 1.5, 1.0, 0.5 - 1e-8, Boundary::periodic));
    const auto sel = select_occupied(sys, Rational{1, 2});
    std::vector<int> la;
    for (int x = 2; x < cells - 1; x += 2) la.push_back(x);
    for (auto _ : state) {
        const auto s = entropy_series(sys, sel, 2, cells, la, Geometry::chord);
        benchmark::DoNotOptimize(fit_central_charge(s, FitOptions{2, cells - 2}));
    }
}
BENCHMARK(BM_ChordSeries)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_OracleCrossCheck(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto K = build_hatano_nelson(n, 1.0, 0.4, Boundary::antiperiodic);
    std::vector<int> a;
    for (int i = 0; i < n / 2; ++i) a.push_back(i);
    for (auto _ : state) benchmark::DoNotOptimize(oracle::cross_check(K, a));
}
BENCHMARK(BM_OracleCrossCheck)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_NoJumpEvolution(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const auto K = build_measurement_heff(L, 1.0, 0.5, Boundary::open);
    std::vector<int> neel;
    for (int i = 0; i < L; i += 2) neel.push_back(i);
    const auto psi0 = product_state(L, neel);
    const std::vector<double> t{1, 2, 4, 8};
    const auto part = Partition::range(0, L / 2);
    for (auto _ : state) benchmark::DoNotOptimize(evolve_no_jump(K, psi0, t, part));
}
BENCHMARK(BM_NoJumpEvolution)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_KernelExponential(benchmark::State& state) {
    const auto K = build_measurement_heff(96, 1.0, 0.5, Boundary::periodic);
    PropagatorOptions opt;
    opt.force = state.range(0) == 0 ? PropagatorPath::eigen : PropagatorPath::pade;
    for (auto _ : state) benchmark::DoNotOptimize(kernel_exponential(K, 2.0, opt));
    state.SetLabel(state.range(0) == 0 ? "eigen" : "pade");
}
BENCHMARK(BM_KernelExponential)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
