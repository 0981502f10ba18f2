#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "optbundle/units.hpp"

namespace optbundle {

enum class Errc {
  InvalidArgument,
  // topology
  CycleDetected,
  MultipleParents,
  DisconnectedNode,
  MissingHead,
  InvalidEdge,
  UnknownNode,
  // plans and solving
  IncompletePlan,
  UnsatisfiableAccuracy,
  InfeasibleBounds,
  InstanceTooLarge,
  // synchronization
  DegenerateInterval,
  MissingEstimate,
  // io
  DecodeError,
  ConfigError,
};

std::string_view to_string(Errc code);

// All library failures are reported as Error. `nodes()` lists the offending
// node ids when the failure is about specific nodes (topology, plan, bounds).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::vector<NodeId> nodes = {});

  Errc code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }
  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }

 private:
  Errc code_;
  std::string detail_;
  std::vector<NodeId> nodes_;
};

}  // namespace optbundle
