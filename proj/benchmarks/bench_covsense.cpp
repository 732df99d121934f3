#include <numbers>

#include <benchmark/benchmark.h>

#include "covsense/adversary.hpp"
#include "covsense/fock.hpp"
#include "covsense/metrology.hpp"
#include "covsense/montecarlo.hpp"
#include "covsense/receivers.hpp"

namespace {

using namespace covsense;

void BM_PcrStats(benchmark::State& state) {
  const SensingScenario s;
  for (auto _ : state) benchmark::DoNotOptimize(pcr_stats(s));
}
BENCHMARK(BM_PcrStats);

void BM_GaussianFidelity(benchmark::State& state) {
  SensingScenario a, b;
  b.theta += 0.1;
  const auto ra = build_receiver_input(a, ProtocolVariant::Entangled);
  const auto rb = build_receiver_input(b, ProtocolVariant::Entangled);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_fidelity(ra, rb));
}
BENCHMARK(BM_GaussianFidelity);

void BM_QfiPhase(benchmark::State& state) {
  const SensingScenario s;
  for (auto _ : state) benchmark::DoNotOptimize(qfi_phase(s, ProtocolVariant::Entangled));
}
BENCHMARK(BM_QfiPhase);

void BM_ExactCounting(benchmark::State& state) {
  const auto modes = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pe_optimal_counting(160.0, 160.5, modes));
}
BENCHMARK(BM_ExactCounting)->Arg(100)->Arg(1000)->Arg(6000);

void BM_GaussianCounting(benchmark::State& state) {
  CountingOptions o;
  o.force = CountingMethod::GaussianApprox;
  for (auto _ : state) benchmark::DoNotOptimize(pe_optimal_counting(1280.0, 1280.1, 2000000000, o));
}
BENCHMARK(BM_GaussianCounting);

void BM_SolveEpsilon(benchmark::State& state) {
  const SensingScenario s;
  for (auto _ : state) benchmark::DoNotOptimize(solve_ns_for_epsilon(2e-4, s));
}
BENCHMARK(BM_SolveEpsilon);

void BM_Simulate(benchmark::State& state) {
  const SensingScenario s;
  SimulationOptions o;
  o.with_qcrb = false;
  const auto shots = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(s, ProtocolVariant::Entangled, shots, 1, o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(2000)->Arg(100000);

void BM_FockBeamsplitter(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const auto f = fock::tensor(fock::thermal(0.5, c), fock::thermal(0.3, c));
  for (auto _ : state) benchmark::DoNotOptimize(fock::apply_beamsplitter(f, 0, 1, 0.5));
}
BENCHMARK(BM_FockBeamsplitter)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_FockThermalLoss(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const auto f = fock::tmsv(0.3, c);
  for (auto _ : state) benchmark::DoNotOptimize(fock::apply_thermal_loss(f, 0, 0.5, 0.5, c + 10));
}
BENCHMARK(BM_FockThermalLoss)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
