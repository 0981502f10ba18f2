#pragma once

#include <vector>

#include "optbundle/rational.hpp"

namespace optbundle::detail {

struct LpSolution {
  Rational value{0};
  std::vector<Rational> x;
};

// maximize c.x  subject to  A x <= b, x >= 0, with b >= 0 so the origin is a
// feasible starting vertex. Exact arithmetic, Bland's rule (no cycling).
// The caller guarantees boundedness (every variable appears in an upper-bound row).
LpSolution maximize_from_origin(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b,
                                const std::vector<Rational>& c);

}  // namespace optbundle::detail
