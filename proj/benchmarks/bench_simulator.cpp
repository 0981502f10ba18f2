#include <benchmark/benchmark.h>

#include "optbundle/simulator.hpp"
#include "optbundle/wire.hpp"

using namespace optbundle;

namespace {

ScenarioConfig reference_scenario(Duration duration) {
  ScenarioConfig cfg;
  cfg.topology = {{1, 0}, {2, 1}, {3, 1}, {4, 2}};
  cfg.schedule = {{0s, RequirementSet{}}};
  cfg.drifts_ppm = {{1, 25.0}, {2, -40.0}, {3, 40.0}, {4, -15.0}};
  cfg.duration = duration;
  return cfg;
}

void BM_SimulateHour(benchmark::State& state) {
  const auto cfg = reference_scenario(3600s);
  for (auto _ : state) benchmark::DoNotOptimize(run(cfg));
}
BENCHMARK(BM_SimulateHour)->Unit(benchmark::kMillisecond);

void BM_SimulateNoBundling(benchmark::State& state) {
  const auto cfg = no_bundling_baseline(reference_scenario(3600s));
  for (auto _ : state) benchmark::DoNotOptimize(run(cfg));
}
BENCHMARK(BM_SimulateNoBundling)->Unit(benchmark::kMillisecond);

void BM_EncodeDecode(benchmark::State& state) {
  BundledMessage msg{3, 1, 42, {1s, 2s, 3s}, {}};
  for (std::uint16_t k = 0; k < state.range(0); ++k) msg.entries.push_back({4, k, Duration{k * 1000}, k});
  for (auto _ : state) benchmark::DoNotOptimize(decode(encode(msg)));
}
BENCHMARK(BM_EncodeDecode)->Arg(1)->Arg(15)->Arg(255);

}  // namespace
