#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "optbundle/analysis.hpp"
#include "optbundle/delay.hpp"
#include "optbundle/energy.hpp"
#include "optbundle/error.hpp"
#include "optbundle/simulator.hpp"
#include "optbundle/trace_io.hpp"
#include "support.hpp"

using namespace optbundle;

namespace {

RequirementSet req8() {
  RequirementSet r;
  r.d_e2e_max = 8s;
  r.sa_min_s = 5e-6;
  r.chi_min = 1;
  r.chi_max = 15;
  return r;
}

ScenarioConfig reference_config() {
  ScenarioConfig cfg;
  cfg.topology = testing::reference_edges();
  cfg.schedule = {{0s, req8()}};
  cfg.drifts_ppm = {{1, 25.0}, {2, -40.0}, {3, 40.0}, {4, -15.0}};
  cfg.duration = 1200s;
  return cfg;
}

// Fixed uniform plan, no head decisions.
ScenarioConfig fixed_plan(std::uint32_t gamma, BundlingMode mode = BundlingMode::AllData) {
  auto cfg = reference_config();
  cfg.schedule.clear();
  cfg.optimize = false;
  cfg.initial_plan = gamma;
  cfg.mode = mode;
  return cfg;
}

std::string csv_dump(const TraceSet& t) {
  std::ostringstream s;
  write_delays_csv(s, t);
  const auto counts = message_counts(t, kCountWindow);
  write_messages_csv(s, counts);
  write_energy_csv(s, t, energy_mode(t.mode));
  write_plan_history_csv(s, t);
  return s.str();
}

BundledMessage one_entry(Duration t_meas) {
  BundledMessage m;
  m.sender = 4;
  m.parent = 2;
  m.entries.push_back({4, 7, t_meas, 0});
  return m;
}

}  // namespace

TEST_CASE("delay calculator") {
  SkewEstimate perfect;

  auto s = delay_calculator(107750ms, one_entry(100s), &perfect);
  REQUIRE(s.size() == 1);
  CHECK(s[0].e2e == 7750ms);
  CHECK(s[0].origin == 4);
  CHECK(s[0].seq == 7);
  CHECK(s[0].measured_at() == 100s);

  CHECK(delay_calculator(100s, one_entry(100s), &perfect)[0].e2e == 0s);

  CHECK_THROWS_AS(delay_calculator(100s, one_entry(100s), nullptr), Error);
  try {
    delay_calculator(100s, one_entry(100s), nullptr);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingEstimate);
  }
}

TEST_CASE("delay calculator with a drifting clock and a converged estimate") {
  for (double drift : {40.0, -40.0}) {
    ClockState clock;
    clock.drift_ppm = drift;
    clock.offset = 5123457us;
    clock.validate();

    // two syncs 10 s apart, each pairing a head instant with the node's reading of it
    const SyncSample a{100s, local_time(clock, 100s) - 20ms, local_time(clock, 100s)};
    const SyncSample b{110s, local_time(clock, 110s) - 20ms, local_time(clock, 110s)};
    const auto est = update_skew(update_skew(std::nullopt, a, std::nullopt), b, a);

    for (Duration taken : {112s, 130s, 200s}) {
      const Duration arrival = taken + 7750ms;
      const auto got = delay_calculator(arrival, one_entry(local_time(clock, taken)), &est);
      const auto err = std::abs(to_seconds(got[0].e2e) - 7.75);
      CAPTURE(drift);
      CAPTURE(to_seconds(taken));
      CHECK(err <= 5e-6);
    }
  }
}

TEST_CASE("energy tally") {
  const EnergyParams unit;
  CHECK(node_energy({10, 0, 0, 0}, unit, EnergyMode::None) == 10);
  CHECK(node_energy({0, 0, 0, 3}, unit, EnergyMode::AllData) == 3);
  CHECK(node_energy({5, 0, 2, 3}, {7, 11, 13, 17}, EnergyMode::SelfData) == 3 * 17 + 2 * 13);
  CHECK(energy_mode(BundlingMode::AllData) == EnergyMode::AllData);
  CHECK(energy_mode(BundlingMode::SelfData) == EnergyMode::SelfData);

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> n(0, 100000);
  std::uniform_int_distribution<std::uint64_t> e(0, 50);
  for (int trial = 0; trial < 200; ++trial) {
    const EnergyParams p{e(rng), e(rng), e(rng), e(rng)};
    std::map<NodeId, EnergyCounts> counts;
    for (NodeId id = 1; id <= 6; ++id) counts[id] = {n(rng), n(rng), n(rng), n(rng)};
    for (auto mode : {EnergyMode::None, EnergyMode::AllData, EnergyMode::SelfData}) {
      const auto rep = energy_tally(counts, p, mode);
      std::uint64_t total = 0;
      for (const auto& [id, c] : counts) {
        std::uint64_t want = 0;
        switch (mode) {
          case EnergyMode::None: want = c.alpha * p.e_meas + c.beta * p.e_sync + c.gamma_fwd * p.e_fwd; break;
          case EnergyMode::AllData: want = c.delta * p.e_bundle; break;
          case EnergyMode::SelfData: want = c.delta * p.e_bundle + c.gamma_fwd * p.e_fwd; break;
        }
        CHECK(rep.per_node.at(id) == want);
        total += want;
      }
      CHECK(rep.total == total);
    }
  }
}

TEST_CASE("message counts") {
  TraceSet idle;
  idle.topology = validate_topology(testing::reference_edges());
  idle.duration = 60s;
  const auto counts = message_counts(idle, 10s);
  CHECK(counts.size() == 6 * 4);
  for (const auto& c : counts) {
    CHECK(c.rx == 0);
    CHECK(c.tx == 0);
  }
  CHECK(counts.front().window_start == 0s);
  CHECK(counts.back().window_start == 50s);
  CHECK(counts.back().node == 4);
  const std::vector<NodeId> nodes{1, 2, 4};
  CHECK(mean_traffic(counts, nodes) == 0.0);

  CHECK_THROWS_AS(message_counts(idle, 0s), Error);
  CHECK_THROWS_AS(message_counts(idle, -1s), Error);

  // every recorded event lands in exactly one window
  const auto t = run(fixed_plan(3));
  std::uint64_t sum = 0;
  for (const auto& c : message_counts(t, 7s)) sum += c.rx + c.tx;
  std::uint64_t sensor_events = 0;
  for (const auto& m : t.messages) sensor_events += m.node != kHead;
  CHECK(sum == sensor_events);
}

TEST_CASE("single node without bundling sees exactly the modelled delay") {
  ScenarioConfig cfg;
  cfg.topology = {{1, 0}};
  cfg.optimize = false;
  cfg.initial_plan = 1;
  cfg.duration = 600s;
  const auto t = run(cfg);

  const auto topo = validate_topology(cfg.topology);
  const auto want = e2e_delay_model(1, BundlingPlan{{1, 1}}, topo, cfg.i_meas, DelayMode::Exact, cfg.service);
  CHECK(want == 1010ms);
  REQUIRE(t.delays.size() > 590);
  for (const auto& s : t.delays) REQUIRE(s.e2e == want);
}

TEST_CASE("every measurement is delivered once and in order") {
  for (auto mode : {BundlingMode::AllData, BundlingMode::SelfData}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      auto cfg = reference_config();
      cfg.mode = mode;
      cfg.seed = seed;
      const auto t = run(cfg);
      for (NodeId id : t.topology.sensor_nodes()) {
        const auto& seqs = t.delivered.at(id);
        for (std::size_t k = 0; k < seqs.size(); ++k) REQUIRE(seqs[k] == k);
        const auto generated = t.generated.at(id);
        REQUIRE(generated >= seqs.size());
        // whatever is still queued fits in the bundles along the path
        CHECK(generated - seqs.size() <= t.topology.depth(id) * 15 + 2);
      }
    }
  }
}

TEST_CASE("delay samples are ordered by arrival") {
  const auto t = run(reference_config());
  REQUIRE_FALSE(t.delays.empty());
  CHECK(std::is_sorted(t.delays.begin(), t.delays.end(),
                       [](const DelaySample& a, const DelaySample& b) { return a.arrival < b.arrival; }));
}

TEST_CASE("runs are deterministic and seeds matter") {
  auto cfg = reference_config();
  cfg.duration = 900s;
  const auto a = run(cfg);
  const auto b = run(cfg);
  CHECK(csv_dump(a) == csv_dump(b));
  CHECK(a.delays == b.delays);
  CHECK(a.counts == b.counts);

  cfg.seed = 2;
  CHECK(csv_dump(run(cfg)) != csv_dump(a));
}

TEST_CASE("bundles carry exactly gamma entries") {
  for (auto mode : {BundlingMode::AllData, BundlingMode::SelfData}) {
    for (std::uint32_t g : {1u, 4u, 15u}) {
      const auto t = run(fixed_plan(g, mode));
      std::size_t originated = 0;
      for (const auto& m : t.messages) {
        if (m.dir != Direction::Tx || m.node == kHead) continue;
        REQUIRE(m.entries >= 1);
        REQUIRE(m.entries <= kMaxEntries);
        if (m.forwarded) continue;
        ++originated;
        REQUIRE(m.entries == g);
      }
      CHECK(originated > 0);
      std::uint64_t delta = 0;
      for (const auto& [id, c] : t.counts) delta += c.delta;
      CHECK(delta == originated);
    }
  }
}

TEST_CASE("streams through a node are itself plus its offspring") {
  const auto edges = testing::reference_edges();
  const auto parents = testing::parent_map(edges);
  for (auto mode : {BundlingMode::AllData, BundlingMode::SelfData}) {
    const auto t = run(fixed_plan(4, mode));
    for (NodeId id : t.topology.sensor_nodes()) {
      const auto& origins = t.origins_sent.at(id);
      CHECK(origins.size() == 1 + testing::descendants(parents, id));
      CHECK(origins.size() == 1 + offspring_count(t.topology, id));
      for (NodeId o : origins) {
        const auto up = testing::walk_up(parents, o);
        CHECK(std::find(up.begin(), up.end(), id) != up.end());
      }
    }
  }
}

TEST_CASE("gateway transmission interval matches the fill time") {
  auto cfg = fixed_plan(15);
  cfg.duration = 3600s;
  const auto t = run(cfg);
  const auto parents = testing::parent_map(testing::reference_edges());
  for (NodeId id : t.topology.sensor_nodes()) {
    std::vector<Duration> at;
    for (const auto& m : t.messages) {
      if (m.node == id && m.dir == Direction::Tx && !m.forwarded && m.at >= 600s) at.push_back(m.at);
    }
    REQUIRE(at.size() > 2);
    const double mean = to_seconds(at.back() - at.front()) / static_cast<double>(at.size() - 1);
    const double want = 15.0 / (1 + testing::descendants(parents, id));
    CAPTURE(id);
    CHECK(mean == doctest::Approx(want).epsilon(0.02));
  }
}

namespace {

struct Ceiling {
  NodeId node;
  Duration worst;
  Duration ceiling;
};

// Worst e2e of each node's own measurements once the final plan has settled,
// next to the modelled delay plus one measurement interval.
std::vector<Ceiling> ceilings(const TraceSet& t, Duration from, const ServiceDelayParams& service) {
  const auto& plan = t.plans.back().plan;
  std::vector<Ceiling> out;
  for (NodeId id : t.topology.sensor_nodes()) {
    Duration worst{0};
    for (const auto& s : t.delays) {
      if (s.origin == id && s.measured_at() >= from) worst = std::max(worst, s.e2e);
    }
    const auto model = e2e_delay_model(id, plan, t.topology, t.i_meas, DelayMode::Exact, service);
    out.push_back({id, worst, model + t.i_meas});
  }
  return out;
}

std::vector<TraceSet> fixed_plan_runs() {
  std::vector<TraceSet> runs;
  for (std::uint32_t g : {1u, 2u, 5u, 10u, 15u}) {
    auto cfg = fixed_plan(g);
    cfg.duration = 1800s;
    runs.push_back(run(cfg));
  }
  for (Duration d : {4s, 6s, 8s}) {
    auto cfg = reference_config();
    cfg.schedule[0].req.d_e2e_max = d;
    cfg.duration = 1800s;
    runs.push_back(run(cfg));
  }
  return runs;
}

}  // namespace

TEST_CASE("modelled delay matches an independent sum") {
  const auto parents = testing::parent_map(testing::reference_edges());
  const auto topo = validate_topology(testing::reference_edges());
  const ServiceDelayParams service;
  for (std::uint32_t g : {1u, 2u, 5u, 10u, 15u}) {
    std::map<NodeId, std::uint32_t> gamma;
    BundlingPlan plan;
    for (NodeId id : topo.sensor_nodes()) {
      gamma[id] = g + id;
      plan.set(id, g + id);
    }
    for (NodeId id : topo.sensor_nodes()) {
      const auto frac = testing::model_delay(parents, gamma, id);
      const double oracle = static_cast<double>(frac.num) / static_cast<double>(frac.den) +
                            0.010 * static_cast<double>(testing::walk_up(parents, id).size());
      CHECK(to_seconds(e2e_delay_model(id, plan, topo, 1s, DelayMode::Exact, service)) ==
            doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("steady-state delay of leaf nodes stays under the model plus one interval") {
  for (const auto& t : fixed_plan_runs()) {
    for (const auto& c : ceilings(t, 300s, ServiceDelayParams{})) {
      if (t.topology.offspring(c.node) != 0) continue;
      CAPTURE(c.node);
      CAPTURE(to_seconds(c.worst));
      CAPTURE(to_seconds(c.ceiling));
      CHECK(c.worst <= c.ceiling);
    }
  }
}

// Offspring bundles reach a gateway in lumps, so the gap between two of its
// transmissions varies around the mean fill time the model uses, and its own
// measurements can wait for the longest gap. This documents that the
// one-interval ceiling does not hold at gateways; it is expected to fail.
TEST_CASE("steady-state delay of gateways stays under the model plus one interval" * doctest::should_fail()) {
  for (const auto& t : fixed_plan_runs()) {
    for (const auto& c : ceilings(t, 300s, ServiceDelayParams{})) {
      if (t.topology.offspring(c.node) == 0) continue;
      CAPTURE(c.node);
      CAPTURE(to_seconds(c.worst));
      CAPTURE(to_seconds(c.ceiling));
      CHECK(c.worst <= c.ceiling);
    }
  }
}

TEST_CASE("a gateway's own measurements wait at most one full bundle") {
  // own entries go first and alone fill a bundle within gamma intervals
  for (const auto& t : fixed_plan_runs()) {
    const auto& plan = t.plans.back().plan;
    for (const auto& c : ceilings(t, 300s, ServiceDelayParams{})) {
      const auto gamma = static_cast<Duration::rep>(plan.at(c.node));
      Duration rest{0};
      const auto& path = t.topology.path(c.node);
      for (std::size_t k = 1; k < path.size(); ++k) {
        rest += bundling_delay(plan.at(path[k]), t.topology.offspring(path[k]), t.i_meas);
      }
      const auto hops = static_cast<Duration::rep>(path.size());
      const auto bound = gamma * t.i_meas + t.i_meas + rest + hops * 10ms;
      CAPTURE(c.node);
      CAPTURE(to_seconds(c.worst));
      CHECK(c.worst <= bound);
    }
  }
}

TEST_CASE("optimized plan keeps delays under the bound after settling") {
  auto cfg = reference_config();
  cfg.schedule = {{300s, req8()}};
  cfg.initial_plan = 15;
  cfg.wander_ppm = 2.0;
  cfg.duration = 3600s;
  const auto t = run(cfg);

  REQUIRE(t.plans.size() >= 2);
  const auto& plan = t.plans.back().plan;
  CHECK(plan == BundlingPlan{{1, 15}, {2, 6}, {3, 4}, {4, 1}});

  const auto seg = segment_compliance(t);
  REQUIRE(seg.size() == 1);
  CHECK(seg[0].samples > 3000);
  CHECK(seg[0].violation_rate() <= 0.05);
  CHECK(seg[0].max_e2e <= 9s);

  // after the new plan is in force every bundle has its node's gamma
  const auto done = dissemination_complete(t, t.plans.back().revision);
  REQUIRE(done);
  for (const auto& m : t.messages) {
    if (m.at <= *done || m.node == kHead || m.dir != Direction::Tx || m.forwarded) continue;
    REQUIRE(m.entries == plan.at(m.node));
  }

  // the warm-up under the uniform plan overshoots
  Duration warm{0};
  for (const auto& s : t.delays) {
    if (s.measured_at() < 300s) warm = std::max(warm, s.e2e);
  }
  CHECK(warm > 8s);
}

TEST_CASE("no-bundling baseline traffic") {
  auto cfg = reference_config();
  cfg.duration = 3600s;
  const auto t = run(no_bundling_baseline(cfg));
  const auto counts = message_counts(t, 10s);
  std::map<NodeId, double> per;
  std::map<NodeId, int> windows;
  for (const auto& c : counts) {
    if (c.window_start < 60s) continue;  // skip start-up
    per[c.node] += static_cast<double>(c.rx + c.tx);
    ++windows[c.node];
  }
  CHECK(per[1] / windows[1] == doctest::Approx(70).epsilon(0.03));
  CHECK(per[2] / windows[2] == doctest::Approx(30).epsilon(0.03));
  CHECK(per[4] / windows[4] == doctest::Approx(10).epsilon(0.03));

  // each measurement is its own message: alpha == delta, nothing merged
  for (const auto& [id, c] : t.counts) CHECK(c.alpha == c.delta);
}

TEST_CASE("scenario validation") {
  auto expect_config_error = [](const ScenarioConfig& cfg) {
    try {
      run(cfg);
      FAIL("accepted an invalid config");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ConfigError);
    }
  };

  auto cfg = reference_config();
  cfg.duration = 0s;
  expect_config_error(cfg);

  cfg = reference_config();
  cfg.i_meas = 0s;
  expect_config_error(cfg);

  cfg = reference_config();
  cfg.topology.push_back({2, 4});  // cycle
  expect_config_error(cfg);

  cfg = reference_config();
  cfg.schedule.push_back({0s, req8()});  // not strictly increasing
  expect_config_error(cfg);

  cfg = reference_config();
  cfg.schedule.push_back({cfg.duration, req8()});
  expect_config_error(cfg);

  cfg = reference_config();
  cfg.schedule[0].req.chi_max = 100;  // node 1 would need 400 entries
  expect_config_error(cfg);

  cfg = reference_config();
  cfg.schedule[0].req.sa_min_s = 1e-9;
  expect_config_error(cfg);

  cfg = reference_config();
  cfg.schedule[0].req.i_meas = 2s;
  expect_config_error(cfg);

  cfg = reference_config();
  cfg.drifts_ppm[9] = 1.0;
  expect_config_error(cfg);

  cfg = reference_config();
  cfg.drifts_ppm[1] = 250.0;
  expect_config_error(cfg);

  cfg = reference_config();
  cfg.schedule.clear();  // optimizing needs a requirement
  expect_config_error(cfg);

  CHECK_NOTHROW(reference_config().validate());
}
