#pragma once

#include <cstdint>

#include "optbundle/model.hpp"
#include "optbundle/rational.hpp"

namespace optbundle {

// Per-hop radio service time components (TinyOS service-time model).
// Defaults sum to 10 ms on a first-try success.
struct ServiceDelayParams {
  Duration d_spi{1ms};
  Duration d_mac{4ms};
  Duration d_frame{4ms};
  Duration d_ack{1ms};
  Duration d_wait_ack{2ms};
  Duration t_retry{5ms};
  std::uint32_t n_max = 5;

  void validate() const;
};

struct LinkDelayBreakdown {
  Duration d_prop{0};
  Duration d_serv{0};
  Duration d_bund{0};
  Duration total{0};
};

enum class DelayMode { Exact, Approximate };

// Service time including n_try - 1 retries; past n_max the failure branch applies.
Duration service_delay_full(const ServiceDelayParams& p, std::uint32_t n_try);

// First-try success: spi + mac + frame + ack.
Duration service_delay_simplified(const ServiceDelayParams& p);

// Time to fill a bundle of gamma entries from 1 + lambda unit-rate streams,
// in microseconds, exact.
Rational bundling_delay_exact(std::uint32_t gamma, std::uint32_t lambda, Duration i_meas);

// bundling_delay_exact rounded half up to whole microseconds.
Duration bundling_delay(std::uint32_t gamma, std::uint32_t lambda, Duration i_meas);

// Exact mode sums all components; approximate mode keeps only the bundling
// term in `total` (valid when i_meas >> service time).
LinkDelayBreakdown link_delay(Duration d_prop, Duration d_serv, Duration d_bund, DelayMode mode);

// Modelled end-to-end delay of node id's measurements: the bundling delay of
// every transmitting node on path(id) (each hop uses that hop's own gamma and
// lambda), plus per-hop service and propagation in exact mode. The bundling
// sum is kept exact and rounded once.
Duration e2e_delay_model(NodeId id, const BundlingPlan& plan, const Topology& topology, Duration i_meas,
                         DelayMode mode, const ServiceDelayParams& service = {},
                         Duration d_prop = Duration::zero());

}  // namespace optbundle
