#include "optbundle/analysis.hpp"

#include <algorithm>

#include "optbundle/delay.hpp"

namespace optbundle {

std::optional<Duration> dissemination_complete(const TraceSet& trace, std::uint64_t revision) {
  auto rec = std::find_if(trace.plans.begin(), trace.plans.end(),
                          [&](const PlanRecord& p) { return p.revision == revision; });
  if (rec == trace.plans.end()) return std::nullopt;
  Duration last = rec->at;
  for (const auto& [id, gamma] : rec->plan.entries()) {
    auto app = std::find_if(trace.applications.begin(), trace.applications.end(), [&](const PlanApplication& a) {
      return a.node == id && a.revision >= revision;
    });
    if (app == trace.applications.end()) return std::nullopt;
    last = std::max(last, app->at);
  }
  return last;
}

std::optional<Duration> first_application(const TraceSet& trace, std::uint64_t revision) {
  for (const auto& a : trace.applications) {
    if (a.revision >= revision) return a.at;
  }
  return std::nullopt;
}

Duration bundle_cycle(const TraceSet& trace, const BundlingPlan& plan) {
  Rational longest{0};
  for (const auto& [id, gamma] : plan.entries()) {
    if (!trace.topology.is_sensor(id)) continue;
    longest = std::max(longest, bundling_delay_exact(gamma, trace.topology.offspring(id), trace.i_meas));
  }
  return Duration{ceil(longest).convert_to<std::int64_t>()};
}

std::vector<SegmentSummary> segment_compliance(const TraceSet& trace) {
  std::vector<SegmentSummary> out;
  for (std::size_t k = 0; k < trace.schedule.size(); ++k) {
    SegmentSummary s;
    s.index = k;
    s.start = trace.schedule[k].at;
    s.end = k + 1 < trace.schedule.size() ? trace.schedule[k + 1].at : trace.duration;
    s.req = trace.schedule[k].req;
    s.settled_at = s.start;
    for (const auto& p : trace.plans) {
      if (p.revision > 0 && p.at >= s.start && p.at < s.end) s.revision = p.revision;
    }
    if (s.revision) {
      const auto done = dissemination_complete(trace, *s.revision);
      const auto& plan = std::find_if(trace.plans.begin(), trace.plans.end(), [&](const PlanRecord& p) {
                           return p.revision == *s.revision;
                         })->plan;
      s.settled_at = done ? *done + bundle_cycle(trace, plan) : s.end;
    }
    out.push_back(s);
  }
  for (const auto& d : trace.delays) {
    const Duration at = d.measured_at();
    for (auto& s : out) {
      if (at < s.settled_at || at >= s.end) continue;
      s.max_e2e = s.samples == 0 ? d.e2e : std::max(s.max_e2e, d.e2e);
      ++s.samples;
      if (d.e2e > s.req.d_e2e_max) ++s.violations;
    }
  }
  return out;
}

}  // namespace optbundle
