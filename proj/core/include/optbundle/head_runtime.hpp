#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optbundle/delay_calculator.hpp"
#include "optbundle/model.hpp"
#include "optbundle/optimizer.hpp"
#include "optbundle/sync.hpp"
#include "optbundle/wire.hpp"

namespace optbundle {

// Routing tree as learned from the (sender, parent) fields of received
// messages. While the learned parent map does not form a valid tree (a
// transient cycle, or a node whose parent has not been heard from yet) the
// last valid snapshot is kept.
class PathTable {
 public:
  // True iff the tree snapshot changed.
  bool update(NodeId sender, NodeId parent);
  bool update(const BundledMessage& msg) { return update(msg.sender, msg.parent); }

  const std::map<NodeId, NodeId>& parents() const { return parents_; }
  const std::optional<Topology>& snapshot() const { return snapshot_; }
  // Counts parent-map changes, including ones that leave the map pending.
  std::uint64_t revision() const { return revision_; }
  bool pending() const { return pending_; }

 private:
  std::map<NodeId, NodeId> parents_;
  std::optional<Topology> snapshot_;
  std::uint64_t revision_ = 0;
  bool pending_ = false;
};

struct NodeMonitor {
  Duration max_e2e{0};
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
};

struct MonitorStatus {
  RequirementSet active;
  Duration since{0};  // samples measured before this are not judged
  std::map<NodeId, NodeMonitor> nodes;

  std::uint64_t samples() const;
  std::uint64_t violations() const;
};

MonitorStatus start_monitor(const RequirementSet& req, Duration since);

// Adds one sample: updates the origin's max and counts a violation when
// e2e > d_e2e_max. Samples measured before status.since are ignored.
MonitorStatus monitor(MonitorStatus status, const DelaySample& sample);

// build_constraints + solve on the current snapshot. Throws InvalidArgument
// when there is no snapshot yet; constraint errors propagate.
SolveReport reoptimize(const PathTable& paths, const RequirementSet& req, const AccuracyTable& table);

struct ParameterUpdate {
  NodeId node;
  std::uint32_t gamma;
  Duration apply_at;  // earliest: one beacon interval per hop from the head

  friend bool operator==(const ParameterUpdate&, const ParameterUpdate&) = default;
};

// One update per node of the snapshot, ordered by node id. Throws
// IncompletePlan when the plan misses a node.
std::vector<ParameterUpdate> disseminate(const BundlingPlan& plan, const PathTable& paths, Duration now,
                                         Duration beacon_interval);

enum class HeadEventKind { RequirementChange, PathChange, PlanUpdate, Infeasible };

struct HeadEvent {
  Duration at{0};
  HeadEventKind kind;
  std::string detail;
};

std::string to_string(HeadEventKind kind);

// The head-side control loop: path learning, monitoring and edge-triggered
// re-optimization. A new plan is produced when the requirement changes or the
// learned tree changes while a requirement is active. On InfeasibleBounds the
// previous plan stays in force and an Infeasible event is logged.
class PerformanceMaintainer {
 public:
  struct Decision {
    BundlingPlan plan;
    SolveReport report;
    std::vector<ParameterUpdate> updates;
  };

  PerformanceMaintainer(AccuracyTable table, Duration beacon_interval);

  std::optional<Decision> set_requirement(const RequirementSet& req, Duration now);
  std::optional<Decision> observe_message(const BundledMessage& msg, Duration now);
  void observe_sample(const DelaySample& sample);

  const PathTable& paths() const { return paths_; }
  const std::optional<BundlingPlan>& plan() const { return plan_; }
  const std::optional<MonitorStatus>& status() const { return status_; }
  const std::vector<HeadEvent>& events() const { return events_; }

 private:
  std::optional<Decision> replan(Duration now);

  AccuracyTable table_;
  Duration beacon_interval_;
  PathTable paths_;
  std::optional<RequirementSet> req_;
  std::optional<BundlingPlan> plan_;
  std::optional<MonitorStatus> status_;
  std::vector<HeadEvent> events_;
};

}  // namespace optbundle
