#include "simplex.hpp"

#include <optional>

#include "optbundle/error.hpp"

namespace optbundle::detail {

LpSolution maximize_from_origin(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b,
                                const std::vector<Rational>& c) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  const std::size_t cols = n + m + 1;  // structural, slack, rhs
  const std::size_t rhs = n + m;

  // rows 0..m-1 constraints, row m objective (reduced costs, -c initially)
  std::vector<std::vector<Rational>> t(m + 1, std::vector<Rational>(cols));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) throw Error(Errc::InvalidArgument, "constraint row width mismatch");
    if (b[i] < 0) throw Error(Errc::InvalidArgument, "origin is not feasible");
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1;
    t[i][rhs] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  for (;;) {
    std::optional<std::size_t> enter;
    for (std::size_t j = 0; j < rhs; ++j) {
      if (t[m][j] < 0) {
        enter = j;
        break;
      }
    }
    if (!enter) break;

    std::optional<std::size_t> leave;
    Rational best_ratio;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][*enter] <= 0) continue;
      Rational ratio = t[i][rhs] / t[i][*enter];
      if (!leave || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[*leave])) {
        leave = i;
        best_ratio = std::move(ratio);
      }
    }
    if (!leave) throw Error(Errc::InvalidArgument, "linear relaxation is unbounded");

    const std::size_t r = *leave;
    const Rational pivot = t[r][*enter];
    for (auto& v : t[r]) {
      if (v != 0) v /= pivot;
    }
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r || t[i][*enter] == 0) continue;
      const Rational factor = t[i][*enter];
      for (std::size_t j = 0; j < cols; ++j) {
        if (t[r][j] != 0) t[i][j] -= factor * t[r][j];
      }
    }
    basis[r] = *enter;
  }

  LpSolution sol;
  sol.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = t[i][rhs];
  }
  sol.value = t[m][rhs];
  return sol;
}

}  // namespace optbundle::detail
