#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "optbundle/units.hpp"

namespace optbundle {

struct Edge {
  NodeId child;
  NodeId parent;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// A rooted routing tree with the head (id 0) as root. Immutable once built;
// construct through validate_topology().
class Topology {
 public:
  // Sensor nodes (everything except the head), ascending.
  const std::vector<NodeId>& sensor_nodes() const { return sensors_; }
  std::size_t sensor_count() const { return sensors_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  bool is_sensor(NodeId id) const;
  NodeId parent(NodeId id) const;
  // Children of any node including the head, ascending.
  const std::vector<NodeId>& children(NodeId id) const;
  // Number of sensor nodes strictly below id.
  std::uint32_t offspring(NodeId id) const;
  // Nodes from id up to (excluding) the head, starting with id.
  const std::vector<NodeId>& path(NodeId id) const;
  std::size_t depth(NodeId id) const { return path(id).size(); }

  friend bool operator==(const Topology& a, const Topology& b) { return a.edges_ == b.edges_; }

 private:
  friend Topology validate_topology(std::span<const Edge> edges);
  void require_sensor(NodeId id) const;

  std::vector<Edge> edges_;
  std::vector<NodeId> sensors_;
  std::vector<std::optional<NodeId>> parent_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::uint32_t> offspring_;
  std::vector<std::vector<NodeId>> paths_;
};

// Throws Error with CycleDetected, MultipleParents, InvalidEdge, MissingHead
// or DisconnectedNode (checked in that order), naming the offending nodes.
Topology validate_topology(std::span<const Edge> edges);

// lambda(i): every sensor node in i's subtree, not just direct children.
std::uint32_t offspring_count(const Topology& topology, NodeId id);

struct RequirementSet {
  Duration d_e2e_max{8s};
  double sa_min_s = 5e-6;  // accuracy bound, seconds (sub-microsecond values allowed)
  std::uint32_t chi_min = 1;
  std::uint32_t chi_max = 15;
  Duration i_meas{1s};

  // Throws InvalidArgument when an invariant does not hold.
  void validate() const;
};

// Per-node bundling numbers (Gamma).
class BundlingPlan {
 public:
  BundlingPlan() = default;
  BundlingPlan(std::initializer_list<std::pair<const NodeId, std::uint32_t>> init) : gamma_(init) {}

  void set(NodeId id, std::uint32_t gamma) { gamma_[id] = gamma; }
  bool contains(NodeId id) const { return gamma_.contains(id); }
  // Throws IncompletePlan when id has no entry.
  std::uint32_t at(NodeId id) const;
  std::uint64_t total() const;
  bool empty() const { return gamma_.empty(); }
  std::size_t size() const { return gamma_.size(); }
  const std::map<NodeId, std::uint32_t>& entries() const { return gamma_; }

  // Throws IncompletePlan naming every sensor node of topology missing here.
  void require_covers(const Topology& topology) const;

  friend bool operator==(const BundlingPlan&, const BundlingPlan&) = default;

 private:
  std::map<NodeId, std::uint32_t> gamma_;
};

// Energy units per transmission. Integers so totals are exact.
struct EnergyParams {
  std::uint64_t e_meas = 1;
  std::uint64_t e_sync = 1;
  std::uint64_t e_fwd = 1;
  std::uint64_t e_bundle = 1;
};

// Transmission tallies for one node.
struct EnergyCounts {
  std::uint64_t alpha = 0;      // own measurements transmitted
  std::uint64_t beta = 0;       // stand-alone sync messages
  std::uint64_t gamma_fwd = 0;  // messages forwarded for offspring
  std::uint64_t delta = 0;      // bundled messages originated

  friend bool operator==(const EnergyCounts&, const EnergyCounts&) = default;
};

}  // namespace optbundle
