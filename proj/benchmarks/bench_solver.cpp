#include <random>

#include <benchmark/benchmark.h>

#include "optbundle/optimizer.hpp"

using namespace optbundle;

namespace {

Topology reference_tree() {
  const Edge edges[] = {{1, 0}, {2, 1}, {3, 1}, {4, 2}};
  return validate_topology(edges);
}

Topology random_tree(std::size_t sensors, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (NodeId id = 1; id <= sensors; ++id) {
    std::uniform_int_distribution<int> pick(0, id - 1);
    edges.push_back({id, static_cast<NodeId>(pick(rng))});
  }
  return validate_topology(edges);
}

void BM_SolveReference(benchmark::State& state) {
  const auto cs = make_constraints(reference_tree(), 1s, 8s, 1, 15);
  for (auto _ : state) benchmark::DoNotOptimize(solve(cs));
}
BENCHMARK(BM_SolveReference);

void BM_BruteForceReference(benchmark::State& state) {
  const auto cs = make_constraints(reference_tree(), 1s, 8s, 1, 15);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_solve(cs));
}
BENCHMARK(BM_BruteForceReference)->Unit(benchmark::kMillisecond);

void BM_SolveRandomTree(benchmark::State& state) {
  const auto sensors = static_cast<std::size_t>(state.range(0));
  const auto topo = random_tree(sensors, 7);
  const auto cs = make_constraints(topo, 1s, Duration{static_cast<std::int64_t>(sensors) * 2'000'000}, 1, 10);
  for (auto _ : state) benchmark::DoNotOptimize(solve(cs));
}
BENCHMARK(BM_SolveRandomTree)->Arg(4)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace
