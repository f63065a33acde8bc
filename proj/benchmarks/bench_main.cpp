#include <benchmark/benchmark.h>

#include "wqed/dynamics.hpp"
#include "wqed/ensemble.hpp"
#include "wqed/fit.hpp"
#include "wqed/scattering.hpp"
#include "wqed/trajectory.hpp"

namespace {

const wqed::EmitterParams kEmitter{2.5, 0.85, 0.79 * 2.5};
const wqed::NoiseModel kNoise{3.6, 0.43};

void BM_SteadyState(benchmark::State& state) {
  const auto model = wqed::build_model(kEmitter, {0.3, 0.8});
  for (auto _ : state) benchmark::DoNotOptimize(wqed::steady_state(model));
}
BENCHMARK(BM_SteadyState);

void BM_ClosedFormTransmission(benchmark::State& state) {
  double n = 0.8;
  for (auto _ : state) benchmark::DoNotOptimize(wqed::transmission_closed_form(kEmitter, {0.3, n}));
}
BENCHMARK(BM_ClosedFormTransmission);

void BM_G2Trace(benchmark::State& state) {
  const wqed::DriveSpec drive{0.0, 1e-3};
  const auto model = wqed::build_model(kEmitter, drive);
  const auto tau = wqed::linspace(-8.0, 8.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(wqed::g2_trace(model, drive, tau));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_G2Trace)->Arg(801)->Arg(3201);

void BM_GaussHermiteBuild(benchmark::State& state) {
  // The rule cache is process wide; odd orders outside it are rebuilt by
  // bumping the order each iteration.
  std::size_t order = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(wqed::gauss_hermite(order));
    order += 2;
  }
}
BENCHMARK(BM_GaussHermiteBuild)->Arg(41)->Arg(641)->Arg(2561)->Iterations(5);

void BM_NoisyTransmission(benchmark::State& state) {
  wqed::EnsembleSpec spec;
  spec.noise = kNoise;
  for (auto _ : state) benchmark::DoNotOptimize(wqed::noisy_transmission(kEmitter, {0.0, 1e-3}, spec));
}
BENCHMARK(BM_NoisyTransmission);

void BM_NoisyG2Trace(benchmark::State& state) {
  wqed::EnsembleSpec spec;
  spec.noise = kNoise;
  const auto tau = wqed::linspace(-8.0, 8.0, 401);
  for (auto _ : state) benchmark::DoNotOptimize(wqed::noisy_g2_trace(kEmitter, {0.0, 1e-3}, tau, spec));
}
BENCHMARK(BM_NoisyG2Trace)->Unit(benchmark::kMillisecond);

void BM_Trajectory(benchmark::State& state) {
  const wqed::DriveSpec drive{0.0, 0.5};
  const auto model = wqed::build_model(kEmitter, drive);
  wqed::TrajectoryOptions o;
  o.duration = 2000.0;
  o.batches = 8;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(wqed::trajectory_oracle(model, drive, o));
}
BENCHMARK(BM_Trajectory)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SaturationFitObjective(benchmark::State& state) {
  const wqed::SaturationParams p;
  const auto flux = wqed::logspace(1e-3, 1e2, 25);
  const auto rule = wqed::gauss_hermite(641);
  for (auto _ : state) benchmark::DoNotOptimize(wqed::saturation_model(p, 2.5, flux, *rule));
}
BENCHMARK(BM_SaturationFitObjective)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
