#include <benchmark/benchmark.h>

#include <cmath>

#include "pointint/green.hpp"
#include "pointint/verification.hpp"

using namespace pointint;

namespace {

const Scheme unit{1.0, 1.0};

const SpectralModel& model_for(int id) {
    static const SpectralModel interval = SpectralModel::interval(pi);
    static const SpectralModel rect = SpectralModel::rectangle(1.0, std::sqrt(2.0));
    static const SpectralModel torus = SpectralModel::torus2d(1.0, 1.3);
    return id == 0 ? interval : id == 1 ? rect : torus;
}

Point center_for(int id) { return id == 0 ? Point(1.0) : id == 1 ? Point(0.37, 0.61) : Point(0.05, 1.2); }

void BM_Phi(benchmark::State& state) {
    const int id = static_cast<int>(state.range(0));
    const auto table = prepare_levels(model_for(id), center_for(id), unit, 8);
    double e = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phi(e, table, unit));
        e += 1e-9;
    }
}
BENCHMARK(BM_Phi)->Arg(0)->Arg(1)->Arg(2);

void BM_SolveSpectrum(benchmark::State& state) {
    const int id = static_cast<int>(state.range(0));
    const auto table = prepare_levels(model_for(id), center_for(id), unit, 8);
    for (auto _ : state) benchmark::DoNotOptimize(solve_spectrum(table, unit, 8));
}
BENCHMARK(BM_SolveSpectrum)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_PrepareLevels(benchmark::State& state) {
    const int id = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(prepare_levels(model_for(id), center_for(id), unit, 8));
}
BENCHMARK(BM_PrepareLevels)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Eigenfunction(benchmark::State& state) {
    const int id = static_cast<int>(state.range(0));
    const auto table = prepare_levels(model_for(id), center_for(id), unit, 4);
    const auto levels = solve_spectrum(table, unit, 4);
    const EigenfunctionEvaluator psi(table, unit, levels[2]);
    const Point x = id == 0 ? Point(2.2) : Point(0.81, 0.93);
    for (auto _ : state) benchmark::DoNotOptimize(psi(x));
}
BENCHMARK(BM_Eigenfunction)->Arg(0)->Arg(1)->Arg(2);

void BM_GreenClosedForm(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(green0_interval_closed_form(pi, 0.7, 2.1, -1.0));
}
BENCHMARK(BM_GreenClosedForm);

void BM_Oracle(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto table = table_with_levels(model_for(0), center_for(0), n);
    for (auto _ : state) benchmark::DoNotOptimize(oracle_diagonalize(n, table, unit));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_Oracle)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond)->Complexity();

void BM_GramModeSpace(benchmark::State& state) {
    const int id = static_cast<int>(state.range(0));
    const auto table = prepare_levels(model_for(id), center_for(id), unit, 7);
    const auto levels = solve_spectrum(table, unit, 7);
    for (auto _ : state) benchmark::DoNotOptimize(gram_mode_space(levels, table, unit));
}
BENCHMARK(BM_GramModeSpace)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_QuadratureGram1D(benchmark::State& state) {
    const auto cells = static_cast<std::size_t>(state.range(0));
    const auto& m = model_for(0);
    const auto table = prepare_levels(m, center_for(0), unit, 7);
    const auto levels = solve_spectrum(table, unit, 7);
    std::vector<EigenfunctionEvaluator> psi;
    for (const auto& l : levels) psi.emplace_back(table, unit, l);
    const auto q = OffsetQuadrature::build(m, center_for(0), GridSpec::for_model(m, cells));
    for (auto _ : state) benchmark::DoNotOptimize(gram_quadrature(psi, q));
}
BENCHMARK(BM_QuadratureGram1D)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
