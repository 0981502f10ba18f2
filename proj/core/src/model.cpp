#include "optbundle/model.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <string>

#include "optbundle/error.hpp"

namespace optbundle {

namespace {

std::string join_ids(const std::vector<NodeId>& ids) {
  std::string out;
  for (NodeId id : ids) {
    if (!out.empty()) out += ", ";
    out += std::to_string(id);
  }
  return out;
}

// Returns the nodes of one directed cycle in child -> parent edges, if any.
std::vector<NodeId> find_cycle(const std::map<NodeId, std::vector<NodeId>>& up) {
  enum class Mark { White, Grey, Black };
  std::map<NodeId, Mark> mark;
  std::vector<NodeId> stack;
  std::vector<NodeId> cycle;

  std::function<bool(NodeId)> visit = [&](NodeId n) {
    mark[n] = Mark::Grey;
    stack.push_back(n);
    if (auto it = up.find(n); it != up.end()) {
      for (NodeId p : it->second) {
        if (mark[p] == Mark::Grey) {
          auto from = std::find(stack.begin(), stack.end(), p);
          cycle.assign(from, stack.end());
          return true;
        }
        if (mark[p] == Mark::White && visit(p)) return true;
      }
    }
    stack.pop_back();
    mark[n] = Mark::Black;
    return false;
  };

  for (const auto& [n, parents] : up) {
    if (mark[n] == Mark::White && visit(n)) {
      std::sort(cycle.begin(), cycle.end());
      return cycle;
    }
  }
  return {};
}

}  // namespace

Topology validate_topology(std::span<const Edge> input) {
  if (input.empty()) throw Error(Errc::InvalidArgument, "edge list is empty");

  std::vector<Edge> edges(input.begin(), input.end());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::map<NodeId, std::vector<NodeId>> up;
  for (const Edge& e : edges) up[e.child].push_back(e.parent);

  if (auto cycle = find_cycle(up); !cycle.empty()) {
    throw Error(Errc::CycleDetected, "cycle through nodes " + join_ids(cycle), cycle);
  }

  std::vector<NodeId> multi;
  for (const auto& [child, parents] : up) {
    if (parents.size() > 1) multi.push_back(child);
  }
  if (!multi.empty()) {
    throw Error(Errc::MultipleParents, "more than one parent for nodes " + join_ids(multi), multi);
  }
  if (up.contains(kHead)) {
    throw Error(Errc::InvalidEdge, "the head (0) cannot have a parent", {kHead});
  }
  if (std::none_of(edges.begin(), edges.end(), [](const Edge& e) { return e.parent == kHead; })) {
    throw Error(Errc::MissingHead, "no edge attaches to the head (0)");
  }

  std::set<NodeId> all{kHead};
  for (const Edge& e : edges) {
    all.insert(e.child);
    all.insert(e.parent);
  }

  // Nodes that never reach the head: roots other than 0 and everything above them.
  std::vector<NodeId> disconnected;
  for (NodeId n : all) {
    if (n == kHead) continue;
    NodeId cur = n;
    while (up.contains(cur)) cur = up.at(cur).front();
    if (cur != kHead) disconnected.push_back(n);
  }
  if (!disconnected.empty()) {
    throw Error(Errc::DisconnectedNode, "no route to the head from nodes " + join_ids(disconnected),
                disconnected);
  }

  Topology t;
  const std::size_t slots = static_cast<std::size_t>(*all.rbegin()) + 1;
  t.edges_ = std::move(edges);
  t.parent_.assign(slots, std::nullopt);
  t.children_.assign(slots, {});
  t.offspring_.assign(slots, 0);
  t.paths_.assign(slots, {});
  for (const Edge& e : t.edges_) {
    t.parent_[e.child] = e.parent;
    t.children_[e.parent].push_back(e.child);
  }
  for (auto& c : t.children_) std::sort(c.begin(), c.end());
  t.sensors_.assign(std::next(all.begin()), all.end());

  for (NodeId n : t.sensors_) {
    auto& path = t.paths_[n];
    for (NodeId cur = n; cur != kHead; cur = *t.parent_[cur]) path.push_back(cur);
    // every node above n on its path gains n as an offspring
    for (std::size_t k = 1; k < path.size(); ++k) ++t.offspring_[path[k]];
  }
  return t;
}

bool Topology::is_sensor(NodeId id) const {
  return id != kHead && id < parent_.size() && parent_[id].has_value();
}

void Topology::require_sensor(NodeId id) const {
  if (!is_sensor(id)) {
    throw Error(Errc::UnknownNode, "node " + std::to_string(id) + " is not a sensor node", {id});
  }
}

NodeId Topology::parent(NodeId id) const {
  require_sensor(id);
  return *parent_[id];
}

const std::vector<NodeId>& Topology::children(NodeId id) const {
  if (id != kHead) require_sensor(id);
  return children_[id];
}

std::uint32_t Topology::offspring(NodeId id) const {
  require_sensor(id);
  return offspring_[id];
}

const std::vector<NodeId>& Topology::path(NodeId id) const {
  require_sensor(id);
  return paths_[id];
}

std::uint32_t offspring_count(const Topology& topology, NodeId id) {
  return topology.offspring(id);
}

void RequirementSet::validate() const {
  if (chi_min < 1) throw Error(Errc::InvalidArgument, "chi_min must be at least 1");
  if (chi_min > chi_max) throw Error(Errc::InvalidArgument, "chi_min exceeds chi_max");
  if (d_e2e_max <= Duration::zero()) throw Error(Errc::InvalidArgument, "d_e2e_max must be positive");
  if (i_meas <= Duration::zero()) throw Error(Errc::InvalidArgument, "i_meas must be positive");
  if (!(sa_min_s > 0.0)) throw Error(Errc::InvalidArgument, "sa_min must be positive");
}

std::uint32_t BundlingPlan::at(NodeId id) const {
  auto it = gamma_.find(id);
  if (it == gamma_.end()) {
    throw Error(Errc::IncompletePlan, "no bundling number for node " + std::to_string(id), {id});
  }
  return it->second;
}

std::uint64_t BundlingPlan::total() const {
  std::uint64_t sum = 0;
  for (const auto& [id, g] : gamma_) sum += g;
  return sum;
}

void BundlingPlan::require_covers(const Topology& topology) const {
  std::vector<NodeId> missing;
  for (NodeId n : topology.sensor_nodes()) {
    if (!contains(n)) missing.push_back(n);
  }
  if (!missing.empty()) {
    throw Error(Errc::IncompletePlan, "plan has no entry for nodes " + join_ids(missing), missing);
  }
}

}  // namespace optbundle
