// Microbenchmarks for the hot paths: mode-sum synthesis, shell
// reconstruction, the angular quadrature, guidance integration steps and the
// finite-difference operators. Run with --benchmark_filter=... to isolate one;
// EFL_THREADS=1 pins the grid loops to a single worker for stable numbers.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "efl/emergence.hpp"
#include "efl/guidance.hpp"
#include "efl/lattice.hpp"
#include "efl/relativity.hpp"
#include "efl/wavefunctional.hpp"

namespace {

using efl::modes::Complex;
using efl::modes::ModeState;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

efl::modes::ModeState equal_shell_state(const efl::modes::LatticePtr& lattice,
                                        const efl::guidance::ShellSet& shell,
                                        Complex value) {
  std::vector<Complex> coeff(lattice->size(), Complex{0.0, 0.0});
  for (const efl::modes::ModeIndex& m : shell.members)
    coeff[lattice->index_of(m)] = value;
  return ModeState(lattice, coeff, 0.0, efl::modes::RealityPolicy::Allow);
}

void BM_ReconstructField(benchmark::State& state) {
  const double mu = 5.0;
  const auto lattice = efl::modes::build_lattice(kTwoPi, 5, mu);
  const auto shell = efl::guidance::shell_modes(*lattice, 0.0);
  const int grid_n = static_cast<int>(state.range(0));
  const auto grid = efl::modes::GridSpec::box_covering(lattice->box_edge(), grid_n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        efl::emergence::reconstruct_field(lattice, shell, 0.3, grid));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(grid.point_count()) *
                          static_cast<int64_t>(shell.size()));
}
BENCHMARK(BM_ReconstructField)->Arg(16)->Arg(32)->Arg(64)
    ->Unit(benchmark::kMillisecond);

void BM_SynthesizeField(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const auto lattice = efl::modes::build_lattice(kTwoPi, n_max, 1.0);
  std::vector<Complex> coeff(lattice->size());
  for (std::size_t i = 0; i < coeff.size(); ++i)
    coeff[i] = Complex{std::cos(0.37 * static_cast<double>(i)), 0.0};
  // symmetrize into a legal reality-constrained state
  ModeState q(lattice, coeff, 0.0, efl::modes::RealityPolicy::Allow);
  q.symmetrize();
  const auto grid = efl::modes::GridSpec::box_covering(lattice->box_edge(), 24);
  for (auto _ : state) {
    benchmark::DoNotOptimize(efl::modes::synthesize_field(q, grid));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(grid.point_count()) *
                          static_cast<int64_t>(lattice->size()));
}
BENCHMARK(BM_SynthesizeField)->Arg(1)->Arg(2)->Arg(4)
    ->Unit(benchmark::kMillisecond);

void BM_AnalyzeField(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const auto lattice = efl::modes::build_lattice(kTwoPi, n_max, 1.0);
  const auto grid =
      efl::modes::GridSpec::box_covering(lattice->box_edge(), 2 * n_max + 1);
  const auto field =
      efl::modes::synthesize_field(ModeState::zero(lattice), grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(efl::modes::analyze_field(lattice, field));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(grid.point_count()) *
                          static_cast<int64_t>(lattice->size()));
}
BENCHMARK(BM_AnalyzeField)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ShellIntegral(benchmark::State& state) {
  const int n_theta = static_cast<int>(state.range(0));
  const double mu = 5.0, r = 3.0;  // mu r = 15, inside the spectral regime
  for (auto _ : state) {
    benchmark::DoNotOptimize(efl::emergence::shell_integral(mu, r, n_theta));
  }
}
BENCHMARK(BM_ShellIntegral)->Arg(16)->Arg(64)->Arg(256);

void BM_GuidanceIntegration(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const auto lattice = efl::modes::build_lattice(kTwoPi, n_max, 1.0);
  const auto shell = efl::guidance::shell_modes(*lattice, 0.0);
  const auto excited =
      efl::wavefunctional::OneQuantumState::standing_wave(lattice, shell.members);
  const double omega = lattice->dispersion(shell.members.front());
  const ModeState q0 = equal_shell_state(
      lattice, shell, efl::guidance::analytic_mode_solution(omega, 0.0));
  const double dt = 1e-3;
  const int steps = 100;
  for (auto _ : state) {
    benchmark::DoNotOptimize(efl::guidance::integrate_modes(
        excited, q0, 0.0, steps * dt, dt));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_GuidanceIntegration)->Arg(1)->Arg(2)->Arg(4)
    ->Unit(benchmark::kMicrosecond);

void BM_WaveOperatorResidual(benchmark::State& state) {
  const auto sampler =
      efl::relativity::mackinnon_sampler(1.0, efl::relativity::Boost(0.6));
  const efl::relativity::SpacetimeEvent e{0.8, 0.3, -0.2, 0.9};
  for (auto _ : state) {
    benchmark::DoNotOptimize(efl::relativity::wave_operator_residual(
        sampler, e, 1e-2, efl::relativity::MassTerm::Massless));
  }
}
BENCHMARK(BM_WaveOperatorResidual);

void BM_BohmianVelocity(benchmark::State& state) {
  const auto sampler =
      efl::relativity::mackinnon_sampler(1.0, efl::relativity::Boost(0.6));
  const efl::relativity::SpacetimeEvent e{0.8, 0.3, -0.2, 0.9};
  for (auto _ : state) {
    benchmark::DoNotOptimize(efl::relativity::bohmian_velocity(sampler, e, 1e-3));
  }
}
BENCHMARK(BM_BohmianVelocity);

void BM_RadialAverage(benchmark::State& state) {
  const double mu = 5.0;
  const auto lattice = efl::modes::build_lattice(kTwoPi, 5, mu);
  const auto shell = efl::guidance::shell_modes(*lattice, 0.0);
  const auto grid = efl::modes::GridSpec::box_covering(lattice->box_edge(), 48);
  const auto field = efl::emergence::reconstruct_field(lattice, shell, 0.3, grid);
  const double spacing = lattice->box_edge() / 48.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        efl::emergence::radial_average(field, std::numbers::pi, spacing));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(grid.point_count()));
}
BENCHMARK(BM_RadialAverage)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
