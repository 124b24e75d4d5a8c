// Serial reference vs OpenMP path for each data-parallel kernel.
// Threads follow OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "jpmsim/potential.hpp"
#include "jpmsim/protocol.hpp"
#include "jpmsim/transfer.hpp"

using namespace jpmsim;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_Quadrature(benchmark::State& state) {
  const transfer::TransferConfig cfg = transfer::TransferConfig::device_defaults();
  transfer::QuadratureOptions opt;
  opt.execution = mode(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transfer::mode2_energy_numeric(400e-9, cfg, opt));
  }
}

void BM_FidelityBudget(benchmark::State& state) {
  const protocol::ProtocolConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(protocol::fidelity_budget(cfg, 100000, mode(state)));
  }
}

void BM_IqDiscrimination(benchmark::State& state) {
  const protocol::IqModel model;
  const auto shots = protocol::labelled_shots(50000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(protocol::iq_discriminate(model, shots, 1, mode(state)));
  }
}

void BM_FluxSweep(benchmark::State& state) {
  std::vector<potential::FluxBias> fluxes;
  for (int k = 0; k < 2000; ++k) fluxes.push_back(potential::FluxBias::from_quanta(k / 1999.0));
  const potential::JpmParams p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(potential::sweep_wells(fluxes, p, mode(state)));
  }
}

}  // namespace

BENCHMARK(BM_Quadrature)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FidelityBudget)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IqDiscrimination)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FluxSweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
