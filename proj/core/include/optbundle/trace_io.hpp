#pragma once

#include <filesystem>
#include <ostream>
#include <span>

#include "optbundle/energy.hpp"
#include "optbundle/simulator.hpp"

namespace optbundle {

inline constexpr Duration kCountWindow{10s};

// arrival_s,origin,e2e_s
void write_delays_csv(std::ostream& out, const TraceSet& trace);
// window_start_s,node,rx,tx
void write_messages_csv(std::ostream& out, std::span<const WindowCount> counts);
// node,alpha,beta,gamma_fwd,delta,energy_units
void write_energy_csv(std::ostream& out, const TraceSet& trace, EnergyMode mode);
// time_s,node,gamma (one row per node of every plan the head produced)
void write_plan_history_csv(std::ostream& out, const TraceSet& trace);

// Writes the four files above into dir (created if missing); messages.csv
// uses kCountWindow and energy.csv the mode matching the trace.
void write_traces(const std::filesystem::path& dir, const TraceSet& trace);

}  // namespace optbundle
