#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "optbundle/simulator.hpp"

namespace optbundle {

// Time at which the last node of `revision` switched to it, or nullopt if
// some node of that plan never did within the run.
std::optional<Duration> dissemination_complete(const TraceSet& trace, std::uint64_t revision);

// Earliest application of any plan revision >= `revision`.
std::optional<Duration> first_application(const TraceSet& trace, std::uint64_t revision);

// Longest fill time of the plan: max over nodes of Gamma / (1 + lambda) * i_meas.
Duration bundle_cycle(const TraceSet& trace, const BundlingPlan& plan);

// Compliance of one requirement segment. Samples are attributed by
// measurement time and only those measured after the segment settled count:
// the last plan computed inside the segment is fully applied and one bundle
// cycle has passed. A segment without a new plan is settled from its start.
struct SegmentSummary {
  std::size_t index = 0;
  Duration start{0};
  Duration end{0};
  RequirementSet req;
  std::optional<std::uint64_t> revision;
  Duration settled_at{0};
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  Duration max_e2e{0};

  double violation_rate() const {
    return samples == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(samples);
  }
};

std::vector<SegmentSummary> segment_compliance(const TraceSet& trace);

}  // namespace optbundle
