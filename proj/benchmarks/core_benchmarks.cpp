// Microbenchmarks for the throughput-critical paths: Floquet propagation,
// lattice inversion, spectral estimation, and Langevin stepping. Run the
// binary directly; google-benchmark owns the command line.
#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "parasqueeze/floquet.hpp"
#include "parasqueeze/freqdomain.hpp"
#include "parasqueeze/harmonic_balance.hpp"
#include "parasqueeze/model.hpp"
#include "parasqueeze/timedomain.hpp"

namespace {

parasqueeze::ResonatorParams standard() {
  parasqueeze::ResonatorParams p;
  p.omega0 = 1.0;
  p.gamma = 1e-3;
  p.Fp = -0.02;
  p.eta = 1.0;
  p.omega = 1.0;
  p.tau = 100.0;
  return p;
}

void MonodromyOnePeriod(benchmark::State& state) {
  const auto p = standard();
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parasqueeze::monodromy(p, steps));
  }
}
BENCHMARK(MonodromyOnePeriod)->Arg(512)->Arg(2048)->Arg(8192);

void ThresholdBisection(benchmark::State& state) {
  auto p = standard();
  p.Fp = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parasqueeze::threshold_ft(p, {5e-4, 5e-3}));
  }
}
BENCHMARK(ThresholdBisection);

void HopfSearch(benchmark::State& state) {
  const auto p = standard();
  for (auto _ : state) {
    benchmark::DoNotOptimize(parasqueeze::find_hopf(p));
  }
}
BENCHMARK(HopfSearch);

void LatticeGreensConverged(benchmark::State& state) {
  const auto p = standard();
  const double nu = state.range(0) == 0 ? p.omega : 1.31;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parasqueeze::greens_lattice_converged(p, nu));
  }
}
BENCHMARK(LatticeGreensConverged)->Arg(0)->Arg(1);

void QuadratureCovarianceLattice(benchmark::State& state) {
  const auto p = standard();
  for (auto _ : state) {
    benchmark::DoNotOptimize(parasqueeze::quadrature_covariance(
        p, 1e-8, parasqueeze::GreensMethod::lattice));
  }
}
BENCHMARK(QuadratureCovarianceLattice);

void NsdCurveLattice(benchmark::State& state) {
  const auto p = standard();
  const int points = static_cast<int>(state.range(0));
  for (auto _ : state) {
    double acc = 0.0;
    for (int i = 0; i < points; ++i) {
      const double nu = 0.9 + 0.2 * i / (points - 1);
      acc += parasqueeze::nsd(p, 1e-8, nu);
    }
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * points);
}
BENCHMARK(NsdCurveLattice)->Arg(64);

void LangevinStepping(benchmark::State& state) {
  const auto p = standard();
  const parasqueeze::NoiseSpec n{1e-8, 7};
  const double t1 = static_cast<double>(state.range(0));
  const double step = 2.0 * std::acos(-1.0) / (1000.0 * p.omega);  // default dt
  parasqueeze::IntegrationOptions opts;
  opts.record_stride = 1 << 20;  // timing the stepper, not the recording
  for (auto _ : state) {
    const auto series = parasqueeze::integrate_stochastic(p, n, 0.0, t1, 0.0, opts);
    benchmark::DoNotOptimize(series.samples.back());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(t1 / step));
}
BENCHMARK(LangevinStepping)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void WelchEstimate(benchmark::State& state) {
  const std::size_t n = 1 << 17;
  const double dt = 0.05;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::sin(1.7 * dt * static_cast<double>(i));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parasqueeze::welch_nsd(x, dt, 4096, 0.5));
  }
}
BENCHMARK(WelchEstimate);

}  // namespace

BENCHMARK_MAIN();
