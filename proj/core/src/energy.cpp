#include "optbundle/energy.hpp"

#include <algorithm>

#include "optbundle/error.hpp"

namespace optbundle {

EnergyMode energy_mode(BundlingMode mode) {
  return mode == BundlingMode::AllData ? EnergyMode::AllData : EnergyMode::SelfData;
}

std::uint64_t node_energy(const EnergyCounts& c, const EnergyParams& p, EnergyMode mode) {
  switch (mode) {
    case EnergyMode::None: return c.alpha * p.e_meas + c.beta * p.e_sync + c.gamma_fwd * p.e_fwd;
    case EnergyMode::AllData: return c.delta * p.e_bundle;
    case EnergyMode::SelfData: return c.delta * p.e_bundle + c.gamma_fwd * p.e_fwd;
  }
  return 0;
}

EnergyReport energy_tally(const std::map<NodeId, EnergyCounts>& counts, const EnergyParams& params,
                          EnergyMode mode) {
  EnergyReport r;
  for (const auto& [id, c] : counts) {
    const auto e = node_energy(c, params, mode);
    r.per_node[id] = e;
    r.total += e;
  }
  return r;
}

std::vector<WindowCount> message_counts(const TraceSet& trace, Duration window) {
  if (window <= Duration::zero()) throw Error(Errc::InvalidArgument, "window must be positive");
  const auto& sensors = trace.topology.sensor_nodes();
  const std::size_t windows = static_cast<std::size_t>((trace.duration + window - Duration{1}) / window);
  std::vector<WindowCount> out;
  out.reserve(windows * sensors.size());
  for (std::size_t w = 0; w < windows; ++w) {
    for (NodeId id : sensors) out.push_back({static_cast<Duration::rep>(w) * window, id, 0, 0});
  }
  for (const auto& m : trace.messages) {
    if (!trace.topology.is_sensor(m.node) || m.at < Duration::zero() || m.at >= trace.duration) continue;
    const auto w = static_cast<std::size_t>(m.at / window);
    const auto col = static_cast<std::size_t>(
        std::lower_bound(sensors.begin(), sensors.end(), m.node) - sensors.begin());
    auto& slot = out[w * sensors.size() + col];
    (m.dir == Direction::Rx ? slot.rx : slot.tx) += 1;
  }
  return out;
}

double mean_traffic(std::span<const WindowCount> counts, std::span<const NodeId> nodes) {
  std::uint64_t sum = 0;
  std::uint64_t n = 0;
  for (const auto& c : counts) {
    if (std::find(nodes.begin(), nodes.end(), c.node) == nodes.end()) continue;
    sum += c.rx + c.tx;
    ++n;
  }
  return n == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(n);
}

}  // namespace optbundle
