#include "optbundle/head_runtime.hpp"

#include <algorithm>

#include "optbundle/error.hpp"

namespace optbundle {

bool PathTable::update(NodeId sender, NodeId parent) {
  if (sender == kHead) return false;
  auto it = parents_.find(sender);
  if (it != parents_.end() && it->second == parent) return false;
  parents_[sender] = parent;
  ++revision_;

  std::vector<Edge> edges;
  edges.reserve(parents_.size());
  for (const auto& [child, p] : parents_) edges.push_back({child, p});
  try {
    Topology next = validate_topology(edges);
    pending_ = false;
    if (snapshot_ && *snapshot_ == next) return false;
    snapshot_ = std::move(next);
    return true;
  } catch (const Error&) {
    pending_ = true;
    return false;
  }
}

std::uint64_t MonitorStatus::samples() const {
  std::uint64_t n = 0;
  for (const auto& [id, m] : nodes) n += m.samples;
  return n;
}

std::uint64_t MonitorStatus::violations() const {
  std::uint64_t n = 0;
  for (const auto& [id, m] : nodes) n += m.violations;
  return n;
}

MonitorStatus start_monitor(const RequirementSet& req, Duration since) {
  MonitorStatus s;
  s.active = req;
  s.since = since;
  return s;
}

MonitorStatus monitor(MonitorStatus status, const DelaySample& sample) {
  if (sample.measured_at() < status.since) return status;
  auto& m = status.nodes[sample.origin];
  m.max_e2e = m.samples == 0 ? sample.e2e : std::max(m.max_e2e, sample.e2e);
  ++m.samples;
  if (sample.e2e > status.active.d_e2e_max) ++m.violations;
  return status;
}

SolveReport reoptimize(const PathTable& paths, const RequirementSet& req, const AccuracyTable& table) {
  if (!paths.snapshot()) throw Error(Errc::InvalidArgument, "no routing tree learned yet");
  return solve(build_constraints(*paths.snapshot(), req, table));
}

std::vector<ParameterUpdate> disseminate(const BundlingPlan& plan, const PathTable& paths, Duration now,
                                         Duration beacon_interval) {
  if (!paths.snapshot()) throw Error(Errc::InvalidArgument, "no routing tree learned yet");
  const Topology& topo = *paths.snapshot();
  plan.require_covers(topo);
  std::vector<ParameterUpdate> out;
  for (NodeId id : topo.sensor_nodes()) {
    const auto hops = static_cast<Duration::rep>(topo.depth(id));
    out.push_back({id, plan.at(id), now + hops * beacon_interval});
  }
  return out;
}

std::string to_string(HeadEventKind kind) {
  switch (kind) {
    case HeadEventKind::RequirementChange: return "requirement";
    case HeadEventKind::PathChange: return "paths";
    case HeadEventKind::PlanUpdate: return "plan";
    case HeadEventKind::Infeasible: return "infeasible";
  }
  return "?";
}

PerformanceMaintainer::PerformanceMaintainer(AccuracyTable table, Duration beacon_interval)
    : table_(std::move(table)), beacon_interval_(beacon_interval) {}

std::optional<PerformanceMaintainer::Decision> PerformanceMaintainer::set_requirement(const RequirementSet& req,
                                                                                      Duration now) {
  req_ = req;
  status_ = start_monitor(req, now);
  events_.push_back({now, HeadEventKind::RequirementChange,
                     "d_e2e_max=" + format_seconds_short(req.d_e2e_max) + " chi=[" + std::to_string(req.chi_min) +
                         "," + std::to_string(req.chi_max) + "]"});
  return replan(now);
}

std::optional<PerformanceMaintainer::Decision> PerformanceMaintainer::observe_message(const BundledMessage& msg,
                                                                                      Duration now) {
  if (!paths_.update(msg)) return std::nullopt;
  events_.push_back({now, HeadEventKind::PathChange,
                     "node " + std::to_string(msg.sender) + " -> " + std::to_string(msg.parent)});
  return replan(now);
}

void PerformanceMaintainer::observe_sample(const DelaySample& sample) {
  if (status_) status_ = monitor(std::move(*status_), sample);
}

std::optional<PerformanceMaintainer::Decision> PerformanceMaintainer::replan(Duration now) {
  if (!req_ || !paths_.snapshot()) return std::nullopt;
  Decision d;
  try {
    d.report = reoptimize(paths_, *req_, table_);
  } catch (const Error& e) {
    if (e.code() != Errc::InfeasibleBounds) throw;
    events_.push_back({now, HeadEventKind::Infeasible, e.what()});
    return std::nullopt;
  }
  d.plan = d.report.plan;
  d.updates = disseminate(d.plan, paths_, now, beacon_interval_);
  plan_ = d.plan;
  std::string detail;
  for (const auto& [id, g] : d.plan.entries()) {
    if (!detail.empty()) detail += ' ';
    detail += std::to_string(id) + ":" + std::to_string(g);
  }
  events_.push_back({now, HeadEventKind::PlanUpdate, detail});
  return d;
}

}  // namespace optbundle
