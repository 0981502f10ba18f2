#include "optbundle/units.hpp"

#include <cmath>
#include <cstdlib>

namespace optbundle {

Duration from_seconds(double seconds) {
  return Duration{std::llround(seconds * 1e6)};
}

double to_seconds(Duration d) {
  return static_cast<double>(d.count()) / 1e6;
}

std::string format_seconds(Duration d) {
  const std::int64_t us = d.count();
  const std::uint64_t mag = us < 0 ? static_cast<std::uint64_t>(-(us + 1)) + 1
                                   : static_cast<std::uint64_t>(us);
  std::string frac = std::to_string(mag % 1'000'000);
  frac.insert(0, 6 - frac.size(), '0');
  return (us < 0 ? "-" : "") + std::to_string(mag / 1'000'000) + "." + frac;
}

std::string format_seconds_short(Duration d) {
  std::string s = format_seconds(d);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace optbundle
