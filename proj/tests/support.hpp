#pragma once

// Shared fixtures and independent reference computations for the tests.
// Nothing here calls into the library's derived quantities.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "optbundle/model.hpp"

namespace testing {

using optbundle::Edge;
using optbundle::NodeId;

// head 0 <- 1 <- 2 <- 4, and 1 <- 3
inline std::vector<Edge> reference_edges() { return {{1, 0}, {2, 1}, {3, 1}, {4, 2}}; }

// Small exact fraction, enough for oracle sums over a handful of terms.
struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Frac() = default;
  Frac(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { norm(); }

  void norm() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const auto g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  friend Frac operator+(Frac a, Frac b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Frac operator*(Frac a, Frac b) { return {a.num * b.num, a.den * b.den}; }
  friend bool operator<=(Frac a, Frac b) { return a.num * b.den <= b.num * a.den; }
  friend bool operator==(Frac a, Frac b) { return a.num == b.num && a.den == b.den; }
};

inline std::map<NodeId, NodeId> parent_map(const std::vector<Edge>& edges) {
  std::map<NodeId, NodeId> p;
  for (const auto& e : edges) p[e.child] = e.parent;
  return p;
}

// Walks parent pointers up to the head.
inline std::vector<NodeId> walk_up(const std::map<NodeId, NodeId>& parents, NodeId id) {
  std::vector<NodeId> path;
  while (id != 0) {
    path.push_back(id);
    id = parents.at(id);
  }
  return path;
}

// Number of nodes whose walk to the head passes through id (excluding id).
inline std::uint32_t descendants(const std::map<NodeId, NodeId>& parents, NodeId id) {
  std::uint32_t n = 0;
  for (const auto& [node, parent] : parents) {
    if (node == id) continue;
    for (NodeId hop : walk_up(parents, node)) n += hop == id;
  }
  return n;
}

// Modelled delay in seconds as a fraction: sum over hops of gamma/(1+lambda)*i_meas.
inline Frac model_delay(const std::map<NodeId, NodeId>& parents, const std::map<NodeId, std::uint32_t>& gamma,
                        NodeId id, std::int64_t i_meas_s = 1) {
  Frac sum{0};
  for (NodeId hop : walk_up(parents, id)) {
    sum = sum + Frac(static_cast<std::int64_t>(gamma.at(hop)) * i_meas_s, 1 + descendants(parents, hop));
  }
  return sum;
}

// Random tree over nodes 1..n: each node attaches to a lower id.
inline std::vector<Edge> random_tree(std::mt19937_64& rng, NodeId n) {
  std::vector<Edge> edges;
  for (NodeId id = 1; id <= n; ++id) {
    std::uniform_int_distribution<int> pick(0, id - 1);
    edges.push_back({id, static_cast<NodeId>(pick(rng))});
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  return edges;
}

}  // namespace testing
