#pragma once

#include <vector>

#include "optbundle/sync.hpp"
#include "optbundle/wire.hpp"

namespace optbundle {

struct DelaySample {
  Duration arrival{0};  // head clock
  NodeId origin = 0;
  std::uint16_t seq = 0;
  Duration e2e{0};

  // Head-clock instant the measurement was taken.
  Duration measured_at() const { return arrival - e2e; }

  friend bool operator==(const DelaySample&, const DelaySample&) = default;
};

// One sample per entry: arrival - translate(est, t_meas). `est` describes the
// clock the entry timestamps are expressed in; a null estimate (first
// contact) throws MissingEstimate.
std::vector<DelaySample> delay_calculator(Duration arrival, const BundledMessage& msg, const SkewEstimate* est);

}  // namespace optbundle
