#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "optbundle/model.hpp"
#include "optbundle/simulator.hpp"

namespace optbundle {

// None: every measurement, sync message and forward is its own transmission.
// AllData: one cost per originated bundle.
// SelfData: originated bundles plus forwarded offspring messages.
enum class EnergyMode { None, AllData, SelfData };

EnergyMode energy_mode(BundlingMode mode);

struct EnergyReport {
  std::map<NodeId, std::uint64_t> per_node;
  std::uint64_t total = 0;
};

std::uint64_t node_energy(const EnergyCounts& c, const EnergyParams& p, EnergyMode mode);
EnergyReport energy_tally(const std::map<NodeId, EnergyCounts>& counts, const EnergyParams& params,
                          EnergyMode mode);

struct WindowCount {
  Duration window_start{0};
  NodeId node = 0;
  std::uint64_t rx = 0;
  std::uint64_t tx = 0;
};

// Tumbling-window rx/tx tallies for every sensor node, one row per window and
// node (zeros included), ordered by window then node. Windows start at 0 and
// cover the run; throws InvalidArgument when window <= 0.
std::vector<WindowCount> message_counts(const TraceSet& trace, Duration window);

// Mean rx + tx per window over the given nodes.
double mean_traffic(std::span<const WindowCount> counts, std::span<const NodeId> nodes);

}  // namespace optbundle
