#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "optbundle/delay.hpp"
#include "optbundle/delay_calculator.hpp"
#include "optbundle/head_runtime.hpp"
#include "optbundle/model.hpp"
#include "optbundle/sync.hpp"

namespace optbundle {

// AllData: gateways merge offspring entries into their own bundles.
// SelfData: gateways bundle only their own entries and forward offspring
// messages as they come.
enum class BundlingMode { AllData, SelfData };

struct ScheduledRequirement {
  Duration at{0};
  RequirementSet req;
};

struct ScenarioConfig {
  std::vector<Edge> topology;
  std::vector<ScheduledRequirement> schedule;  // strictly increasing activation times
  Duration i_meas{1s};
  BundlingMode mode = BundlingMode::AllData;
  EnergyParams energy;
  ServiceDelayParams service;
  Duration d_prop{0};
  std::map<NodeId, double> drifts_ppm;
  double wander_ppm = 0.0;
  Duration wander_period{3600s};
  std::uint64_t seed = 1;
  Duration duration{3600s};
  // Gamma every node starts with; defaults to chi_max of the first requirement.
  std::optional<std::uint32_t> initial_plan;
  // When false the head never re-plans and nodes keep the initial plan.
  bool optimize = true;
  AccuracyTable accuracy = ahts_table();

  // Throws ConfigError.
  void validate() const;
  std::uint32_t initial_gamma() const;
};

// Uniform Gamma = 1 with self-data forwarding and no re-planning: every
// measurement travels alone.
ScenarioConfig no_bundling_baseline(ScenarioConfig cfg);

enum class Direction { Rx, Tx };

struct MessageEvent {
  Duration at{0};
  NodeId node = 0;
  Direction dir = Direction::Tx;
  std::uint16_t entries = 0;
  bool forwarded = false;  // relayed unmerged rather than bundled here
};

struct PlanRecord {
  Duration at{0};
  std::uint64_t revision = 0;
  BundlingPlan plan;
};

// A node switching to a new Gamma.
struct PlanApplication {
  Duration at{0};
  NodeId node = 0;
  std::uint32_t gamma = 0;
  std::uint64_t revision = 0;
};

struct TraceSet {
  Topology topology;
  std::vector<ScheduledRequirement> schedule;
  Duration i_meas{0};
  Duration duration{0};
  BundlingMode mode = BundlingMode::AllData;
  EnergyParams energy;

  std::vector<DelaySample> delays;  // in arrival order
  std::vector<MessageEvent> messages;
  std::map<NodeId, EnergyCounts> counts;
  std::vector<PlanRecord> plans;  // revision 0 is the initial uniform plan
  std::vector<PlanApplication> applications;
  std::vector<HeadEvent> head_events;
  std::map<NodeId, std::uint64_t> generated;
  std::map<NodeId, std::vector<std::uint16_t>> delivered;  // seq numbers in arrival order
  std::map<NodeId, std::set<NodeId>> origins_sent;  // origins of the entries each node transmitted
};

// Deterministic discrete-event run of the scenario. Throws ConfigError for an
// invalid configuration and nothing afterwards.
TraceSet run(const ScenarioConfig& cfg);

}  // namespace optbundle
