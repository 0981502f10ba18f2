#include "optbundle/error.hpp"

namespace optbundle {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::MultipleParents: return "MultipleParents";
    case Errc::DisconnectedNode: return "DisconnectedNode";
    case Errc::MissingHead: return "MissingHead";
    case Errc::InvalidEdge: return "InvalidEdge";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::IncompletePlan: return "IncompletePlan";
    case Errc::UnsatisfiableAccuracy: return "UnsatisfiableAccuracy";
    case Errc::InfeasibleBounds: return "InfeasibleBounds";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::DegenerateInterval: return "DegenerateInterval";
    case Errc::MissingEstimate: return "MissingEstimate";
    case Errc::DecodeError: return "DecodeError";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what, std::vector<NodeId> nodes)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code),
      detail_(what),
      nodes_(std::move(nodes)) {}

}  // namespace optbundle
