#include "optbundle/delay_calculator.hpp"

#include <string>

#include "optbundle/error.hpp"

namespace optbundle {

std::vector<DelaySample> delay_calculator(Duration arrival, const BundledMessage& msg, const SkewEstimate* est) {
  if (est == nullptr) {
    throw Error(Errc::MissingEstimate, "no clock estimate yet for messages from node " + std::to_string(msg.sender),
                {msg.sender});
  }
  std::vector<DelaySample> out;
  out.reserve(msg.entries.size());
  for (const auto& e : msg.entries) {
    out.push_back({arrival, e.origin, e.seq, arrival - translate_timestamp(*est, e.t_meas)});
  }
  return out;
}

}  // namespace optbundle
