#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "holeburn/fitters.hpp"
#include "holeburn/integrator.hpp"
#include "holeburn/simplex.hpp"
#include "holeburn/synthgen.hpp"

using namespace holeburn;

namespace {

const TrapModel& model() {
    static const TrapModel m = reference_rate_model();
    return m;
}

BeamGeometry beam() { return BeamGeometry::make(20e-6, kDefaultFocusFwhm, model().material); }

void BM_BuildSpectrum(benchmark::State& state) {
    IntegrationDomain d;
    d.n_r = static_cast<std::size_t>(state.range(0));
    d.n_z = 2 * d.n_r;
    d.n_delta = 4 * d.n_r;
    for (auto _ : state) benchmark::DoNotOptimize(build_spectrum(model(), beam(), d));
    state.counters["points"] = static_cast<double>(d.points());
}
BENCHMARK(BM_BuildSpectrum)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_EvaluateSpectrum(benchmark::State& state) {
    const auto spec = build_spectrum(model(), beam(), IntegrationDomain{});
    const auto t = linspace(0.0, 200.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(spec.evaluate(t, 7e4));
    state.counters["components"] = static_cast<double>(spec.components().size());
}
BENCHMARK(BM_EvaluateSpectrum)->Arg(201)->Arg(2001)->Unit(benchmark::kMillisecond);

void BM_MinimizeRosenbrock(benchmark::State& state) {
    auto f = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    for (auto _ : state) benchmark::DoNotOptimize(minimize(f, {-1.2, 1.0}));
}
BENCHMARK(BM_MinimizeRosenbrock);

void BM_HoleFit(benchmark::State& state) {
    HoleScanConfig cfg;
    cfg.points = static_cast<std::size_t>(state.range(0));
    const auto scan = gen_hole_scan(HoleTruth{}, cfg, {NoiseKind::Gaussian, 1, 5.0, 1.0});
    std::vector<double> y(scan.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = scan.fluor_counts[i] / scan.power_monitor[i];
    for (auto _ : state) benchmark::DoNotOptimize(fit_hole_lorentzian(scan.freq, y));
}
BENCHMARK(BM_HoleFit)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
