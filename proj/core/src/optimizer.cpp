#include "optbundle/optimizer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "optbundle/error.hpp"
#include "simplex.hpp"

namespace optbundle {

namespace {

std::string seconds_of(const Rational& micros) {
  return format_seconds_short(Duration{round_half_up(micros)});
}

// Search state for branch-and-bound; the objective is lifted to
// sum(Gamma) * K^n + sum(Gamma_j * K^(n-1-j)) so that the exact optimum of
// the lifted problem is the lexicographically preferred optimal plan.
class BranchAndBound {
 public:
  explicit BranchAndBound(const ConstraintSet& cs) : cs_(cs), n_(cs.nodes.size()) {
    dense_.assign(cs.rows.size(), std::vector<Rational>(n_, Rational(0)));
    for (std::size_t r = 0; r < cs.rows.size(); ++r) {
      for (const auto& term : cs.rows[r].terms) dense_[r][term.var] += term.coef;
    }
    const std::int64_t top = n_ == 0 ? 0 : *std::max_element(cs.upper.begin(), cs.upper.end());
    const BigInt k = BigInt(std::max<std::int64_t>(top, 0)) + 1;
    BigInt lead = 1;
    for (std::size_t j = 0; j < n_; ++j) lead *= k;
    weights_.resize(n_);
    BigInt tail = lead / k;
    for (std::size_t j = 0; j < n_; ++j) {
      weights_[j] = Rational(lead + tail);
      tail /= k;
    }
  }

  SolveReport run() {
    SolveReport report;
    std::vector<std::int64_t> lo = cs_.lower;
    std::vector<std::int64_t> hi = cs_.upper;
    std::vector<Rational> ones(n_, Rational(1));
    if (auto root = relax(lo, hi, ones)) report.lp_bound = root->value;
    search(lo, hi);
    report.nodes_explored = explored_;
    if (best_) {
      report.status = SolveStatus::Optimal;
      for (std::size_t j = 0; j < n_; ++j) {
        report.plan.set(cs_.nodes[j], static_cast<std::uint32_t>((*best_)[j]));
        report.objective += (*best_)[j];
      }
    }
    return report;
  }

 private:
  struct Relaxation {
    Rational value;            // in x space
    std::vector<Rational> x;
  };

  // LP relaxation of the box [lo, hi]; nullopt when the box is infeasible.
  std::optional<Relaxation> relax(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi,
                                  const std::vector<Rational>& objective) const {
    for (std::size_t j = 0; j < n_; ++j) {
      if (lo[j] > hi[j]) return std::nullopt;
    }
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    a.reserve(dense_.size() + n_);
    for (std::size_t r = 0; r < dense_.size(); ++r) {
      Rational slack = cs_.bound.count();
      for (std::size_t j = 0; j < n_; ++j) slack -= dense_[r][j] * lo[j];
      if (slack < 0) return std::nullopt;
      a.push_back(dense_[r]);
      b.push_back(std::move(slack));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      std::vector<Rational> row(n_, Rational(0));
      row[j] = 1;
      a.push_back(std::move(row));
      b.emplace_back(hi[j] - lo[j]);
    }
    auto lp = detail::maximize_from_origin(a, b, objective);
    Relaxation out{std::move(lp.value), std::move(lp.x)};
    for (std::size_t j = 0; j < n_; ++j) {
      out.x[j] += lo[j];
      out.value += objective[j] * lo[j];
    }
    return out;
  }

  void search(std::vector<std::int64_t>& lo, std::vector<std::int64_t>& hi) {
    ++explored_;
    auto relaxed = relax(lo, hi, weights_);
    if (!relaxed) return;
    if (best_value_ && floor(relaxed->value) <= *best_value_) return;

    std::optional<std::size_t> branch;
    for (std::size_t j = 0; j < n_; ++j) {
      if (is_integer(relaxed->x[j])) continue;
      if (!branch || relaxed->x[j] > relaxed->x[*branch]) branch = j;
    }
    if (!branch) {
      std::vector<std::int64_t> point(n_);
      for (std::size_t j = 0; j < n_; ++j) point[j] = numerator(relaxed->x[j]).convert_to<std::int64_t>();
      best_ = std::move(point);
      best_value_ = numerator(relaxed->value);
      return;
    }

    const std::size_t j = *branch;
    const std::int64_t down = floor(relaxed->x[j]).convert_to<std::int64_t>();
    const std::int64_t saved_hi = hi[j];
    hi[j] = down;
    search(lo, hi);
    hi[j] = saved_hi;

    const std::int64_t saved_lo = lo[j];
    lo[j] = down + 1;
    search(lo, hi);
    lo[j] = saved_lo;
  }

  const ConstraintSet& cs_;
  std::size_t n_;
  std::vector<std::vector<Rational>> dense_;
  std::vector<Rational> weights_;
  std::optional<std::vector<std::int64_t>> best_;
  std::optional<BigInt> best_value_;
  std::uint64_t explored_ = 0;
};

void check_shape(const ConstraintSet& cs) {
  const std::size_t n = cs.nodes.size();
  if (cs.lower.size() != n || cs.upper.size() != n) {
    throw Error(Errc::InvalidArgument, "constraint set bounds do not match its variables");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (cs.lower[j] < 0) throw Error(Errc::InvalidArgument, "variable lower bounds must be >= 0");
  }
  for (const auto& row : cs.rows) {
    for (const auto& term : row.terms) {
      if (term.var >= n) throw Error(Errc::InvalidArgument, "constraint term refers to an unknown variable");
      if (term.coef <= 0) throw Error(Errc::InvalidArgument, "constraint coefficients must be positive");
    }
  }
}

}  // namespace

Rational ConstraintSet::lhs(const ConstraintRow& row, const std::vector<std::int64_t>& values) const {
  Rational sum{0};
  for (const auto& term : row.terms) sum += term.coef * values.at(term.var);
  return sum;
}

bool ConstraintSet::feasible(const std::vector<std::int64_t>& values) const {
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (values.at(j) < lower[j] || values[j] > upper[j]) return false;
  }
  return std::all_of(rows.begin(), rows.end(),
                     [&](const ConstraintRow& row) { return lhs(row, values) <= bound.count(); });
}

std::string ConstraintSet::to_text() const {
  std::ostringstream out;
  out << "# maximize ";
  for (std::size_t j = 0; j < nodes.size(); ++j) out << (j ? " + " : "") << "G" << nodes[j];
  out << "\n";
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    out << lower[j] << " <= G" << nodes[j] << " <= " << upper[j] << "\n";
  }
  const std::string rhs = format_seconds_short(bound);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.terms.size(); ++k) {
      const auto& term = row.terms[k];
      out << (k ? " + " : "") << to_string(term.coef / 1'000'000) << "*G" << nodes[term.var];
    }
    out << " <= " << rhs << "\n";
  }
  return out.str();
}

Duration effective_delay_bound(Duration d_e2e_max, double sa_min_s, const AccuracyTable& table) {
  return std::min(d_e2e_max, accuracy_to_si(sa_min_s, table));
}

ConstraintSet make_constraints(const Topology& topology, Duration i_meas, Duration bound, std::uint32_t chi_min,
                               std::uint32_t chi_max) {
  if (chi_min < 1 || chi_min > chi_max) throw Error(Errc::InvalidArgument, "need 1 <= chi_min <= chi_max");
  if (bound <= Duration::zero()) throw Error(Errc::InvalidArgument, "delay bound must be positive");
  if (i_meas <= Duration::zero()) throw Error(Errc::InvalidArgument, "i_meas must be positive");

  ConstraintSet cs;
  cs.nodes = topology.sensor_nodes();
  cs.bound = bound;
  cs.lower.assign(cs.nodes.size(), chi_min);
  cs.upper.assign(cs.nodes.size(), chi_max);

  auto index_of = [&](NodeId id) {
    return static_cast<std::size_t>(std::lower_bound(cs.nodes.begin(), cs.nodes.end(), id) - cs.nodes.begin());
  };

  struct Violation {
    NodeId node;
    Rational need;
  };
  std::vector<Violation> violations;
  for (NodeId id : cs.nodes) {
    ConstraintRow row{id, {}};
    for (NodeId hop : topology.path(id)) {
      row.terms.push_back({index_of(hop), Rational(i_meas.count(), 1 + topology.offspring(hop))});
    }
    Rational need = cs.lhs(row, cs.lower);
    if (need > bound.count()) violations.push_back({id, std::move(need)});
    cs.rows.push_back(std::move(row));
  }

  if (!violations.empty()) {
    std::stable_sort(violations.begin(), violations.end(),
                     [](const Violation& a, const Violation& b) { return a.need > b.need; });
    std::vector<NodeId> ids;
    for (const auto& v : violations) ids.push_back(v.node);
    const auto& worst = violations.front();
    std::string msg = "node " + std::to_string(worst.node) + " needs " + seconds_of(worst.need) +
                      " s at chi_min=" + std::to_string(chi_min) + " but the delay bound is " +
                      format_seconds_short(bound) + " s";
    if (ids.size() > 1) {
      msg += " (also over budget:";
      for (std::size_t k = 1; k < ids.size(); ++k) msg += " " + std::to_string(ids[k]);
      msg += ")";
    }
    throw Error(Errc::InfeasibleBounds, msg, ids);
  }
  return cs;
}

ConstraintSet build_constraints(const Topology& topology, const RequirementSet& req, const AccuracyTable& table) {
  req.validate();
  const Duration bound = effective_delay_bound(req.d_e2e_max, req.sa_min_s, table);
  return make_constraints(topology, req.i_meas, bound, req.chi_min, req.chi_max);
}

SolveReport solve(const ConstraintSet& cs) {
  check_shape(cs);
  return BranchAndBound(cs).run();
}

SolveReport brute_force_solve(const ConstraintSet& cs) {
  check_shape(cs);
  const std::size_t n = cs.nodes.size();

  std::uint64_t points = 1;
  for (std::size_t j = 0; j < n; ++j) {
    const std::int64_t width = cs.upper[j] - cs.lower[j] + 1;
    if (width <= 0) return SolveReport{};
    if (points > kBruteForceLimit / static_cast<std::uint64_t>(width)) {
      throw Error(Errc::InstanceTooLarge, "more than " + std::to_string(kBruteForceLimit) + " points to enumerate");
    }
    points *= static_cast<std::uint64_t>(width);
  }

  // Scale each row to integers so enumeration never touches rationals.
  __extension__ typedef __int128 Wide;
  struct ScaledRow {
    std::vector<std::pair<std::size_t, Wide>> terms;
    Wide bound;
  };
  std::vector<ScaledRow> rows;
  const auto to_i128 = [](const BigInt& v) {
    if (v > BigInt(std::numeric_limits<std::int64_t>::max())) {
      throw Error(Errc::InstanceTooLarge, "scaled coefficients exceed 64 bits");
    }
    return static_cast<Wide>(v.convert_to<std::int64_t>());
  };
  for (const auto& row : cs.rows) {
    BigInt scale = 1;
    for (const auto& term : row.terms) scale = boost::multiprecision::lcm(scale, denominator(term.coef));
    ScaledRow scaled;
    for (const auto& term : row.terms) {
      scaled.terms.emplace_back(term.var, to_i128(numerator(term.coef) * (scale / denominator(term.coef))));
    }
    scaled.bound = to_i128(scale * cs.bound.count());
    rows.push_back(std::move(scaled));
  }

  SolveReport report;
  std::vector<std::int64_t> x = cs.lower;
  std::optional<std::vector<std::int64_t>> best;
  std::int64_t best_sum = 0;
  for (std::uint64_t visited = 0; visited < points; ++visited) {
    ++report.nodes_explored;
    bool ok = true;
    for (const auto& row : rows) {
      Wide sum = 0;
      for (const auto& [var, coef] : row.terms) sum += coef * x[var];
      if (sum > row.bound) {
        ok = false;
        break;
      }
    }
    if (ok) {
      const std::int64_t sum = std::accumulate(x.begin(), x.end(), std::int64_t{0});
      if (!best || sum > best_sum || (sum == best_sum && x > *best)) {
        best = x;
        best_sum = sum;
      }
    }
    for (std::size_t j = n; j-- > 0;) {  // odometer, last variable fastest
      if (++x[j] <= cs.upper[j]) break;
      x[j] = cs.lower[j];
    }
  }

  if (best) {
    report.status = SolveStatus::Optimal;
    report.objective = best_sum;
    for (std::size_t j = 0; j < n; ++j) report.plan.set(cs.nodes[j], static_cast<std::uint32_t>((*best)[j]));
  }
  return report;
}

}  // namespace optbundle
