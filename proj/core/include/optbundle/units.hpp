#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace optbundle {

// Dense small node ids; 0 is always the head.
using NodeId = std::uint16_t;
inline constexpr NodeId kHead = 0;

// Durations and timestamps are integer microseconds. A timestamp is a
// Duration measured from the start of the run on some clock (true time, the
// head clock, or a node's local clock -- context says which).
using Duration = std::chrono::microseconds;

using namespace std::chrono_literals;

// Decimal seconds -> microseconds, rounded to nearest.
Duration from_seconds(double seconds);
double to_seconds(Duration d);

// Fixed six-decimal rendering ("7.750000", "-0.000010"). Exact, no floating point.
std::string format_seconds(Duration d);

// Shortest exact decimal rendering ("8", "3.75", "0.000005").
std::string format_seconds_short(Duration d);

}  // namespace optbundle
