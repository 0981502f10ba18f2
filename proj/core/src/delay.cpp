#include "optbundle/delay.hpp"

#include "optbundle/error.hpp"

namespace optbundle {

void ServiceDelayParams::validate() const {
  for (Duration d : {d_spi, d_mac, d_frame, d_ack, d_wait_ack, t_retry}) {
    if (d < Duration::zero()) throw Error(Errc::InvalidArgument, "service delay components must be >= 0");
  }
  if (n_max < 1) throw Error(Errc::InvalidArgument, "n_max must be at least 1");
}

Duration service_delay_full(const ServiceDelayParams& p, std::uint32_t n_try) {
  if (n_try < 1) throw Error(Errc::InvalidArgument, "n_try must be at least 1");
  const Duration retry = p.t_retry + p.d_frame + p.d_wait_ack;
  if (n_try <= p.n_max) {
    const Duration success = p.d_mac + p.d_frame + p.d_ack;
    return p.d_spi + success + static_cast<std::int64_t>(n_try - 1) * retry;
  }
  const Duration fail = p.d_mac + p.d_frame + p.d_wait_ack;
  return p.d_spi + fail + static_cast<std::int64_t>(p.n_max - 1) * retry;
}

Duration service_delay_simplified(const ServiceDelayParams& p) {
  return p.d_spi + p.d_mac + p.d_frame + p.d_ack;
}

Rational bundling_delay_exact(std::uint32_t gamma, std::uint32_t lambda, Duration i_meas) {
  if (gamma < 1) throw Error(Errc::InvalidArgument, "gamma must be at least 1");
  if (i_meas <= Duration::zero()) throw Error(Errc::InvalidArgument, "i_meas must be positive");
  return Rational(BigInt(gamma) * i_meas.count(), BigInt(1) + lambda);
}

Duration bundling_delay(std::uint32_t gamma, std::uint32_t lambda, Duration i_meas) {
  return Duration{round_half_up(bundling_delay_exact(gamma, lambda, i_meas))};
}

LinkDelayBreakdown link_delay(Duration d_prop, Duration d_serv, Duration d_bund, DelayMode mode) {
  if (d_prop < Duration::zero() || d_serv < Duration::zero() || d_bund < Duration::zero()) {
    throw Error(Errc::InvalidArgument, "link delay components must be >= 0");
  }
  LinkDelayBreakdown b{d_prop, d_serv, d_bund, d_bund};
  if (mode == DelayMode::Exact) b.total = d_prop + d_serv + d_bund;
  return b;
}

Duration e2e_delay_model(NodeId id, const BundlingPlan& plan, const Topology& topology, Duration i_meas,
                         DelayMode mode, const ServiceDelayParams& service, Duration d_prop) {
  const auto& path = topology.path(id);
  Rational bundling{0};
  for (NodeId hop : path) {
    bundling += bundling_delay_exact(plan.at(hop), topology.offspring(hop), i_meas);
  }
  Duration total{round_half_up(bundling)};
  if (mode == DelayMode::Exact) {
    const Duration per_hop = link_delay(d_prop, service_delay_simplified(service), Duration::zero(),
                                        DelayMode::Exact).total;
    total += static_cast<std::int64_t>(path.size()) * per_hop;
  }
  return total;
}

}  // namespace optbundle
