#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optbundle/model.hpp"
#include "optbundle/rational.hpp"
#include "optbundle/sync.hpp"

namespace optbundle {

struct ConstraintTerm {
  std::size_t var;  // index into ConstraintSet::nodes
  Rational coef;    // microseconds per unit of Gamma, > 0
};

// One delay row: sum over the hops of path(node) of coef * Gamma(hop) <= bound.
struct ConstraintRow {
  NodeId node;
  std::vector<ConstraintTerm> terms;  // in path order, starting with node itself
};

// The bundling integer program: maximize sum(Gamma) subject to box bounds
// and one delay row per sensor node.
struct ConstraintSet {
  std::vector<NodeId> nodes;           // variable order, ascending id
  std::vector<std::int64_t> lower;     // per variable
  std::vector<std::int64_t> upper;     // per variable
  std::vector<ConstraintRow> rows;
  Duration bound{0};                   // effective delay bound B

  // Row left-hand side at an integer point, in microseconds.
  Rational lhs(const ConstraintRow& row, const std::vector<std::int64_t>& values) const;
  bool feasible(const std::vector<std::int64_t>& values) const;

  // One line per bound and row, e.g. "1*G4 + 1/2*G2 + 1/4*G1 <= 8" (seconds).
  std::string to_text() const;
};

enum class SolveStatus { Optimal, Infeasible };

struct SolveReport {
  BundlingPlan plan;
  std::int64_t objective = 0;
  SolveStatus status = SolveStatus::Infeasible;
  std::uint64_t nodes_explored = 0;
  Rational lp_bound{0};  // root relaxation of sum(Gamma)
};

// min(d_e2e_max, accuracy_to_si(sa_min_s)). Throws UnsatisfiableAccuracy.
Duration effective_delay_bound(Duration d_e2e_max, double sa_min_s, const AccuracyTable& table);

// Rows for a given bound. Throws InfeasibleBounds naming the node whose row
// is most over budget at chi_min (all violators are in Error::nodes(), worst first).
ConstraintSet make_constraints(const Topology& topology, Duration i_meas, Duration bound, std::uint32_t chi_min,
                               std::uint32_t chi_max);

ConstraintSet build_constraints(const Topology& topology, const RequirementSet& req, const AccuracyTable& table);

// Exact branch-and-bound over rational LP relaxations. Among optimal plans
// the one with the largest Gamma at the lowest node id wins, then the next id,
// and so on.
SolveReport solve(const ConstraintSet& cs);

// Exhaustive enumeration of the bound box with the same tie-breaking.
// Throws InstanceTooLarge beyond kBruteForceLimit points. lp_bound is left at 0.
inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;
SolveReport brute_force_solve(const ConstraintSet& cs);

}  // namespace optbundle
