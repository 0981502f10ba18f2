#include "optbundle/trace_io.hpp"

#include <fstream>

#include "optbundle/error.hpp"

namespace optbundle {

void write_delays_csv(std::ostream& out, const TraceSet& trace) {
  out << "arrival_s,origin,e2e_s\n";
  for (const auto& d : trace.delays) {
    out << format_seconds(d.arrival) << ',' << d.origin << ',' << format_seconds(d.e2e) << '\n';
  }
}

void write_messages_csv(std::ostream& out, std::span<const WindowCount> counts) {
  out << "window_start_s,node,rx,tx\n";
  for (const auto& c : counts) {
    out << format_seconds_short(c.window_start) << ',' << c.node << ',' << c.rx << ',' << c.tx << '\n';
  }
}

void write_energy_csv(std::ostream& out, const TraceSet& trace, EnergyMode mode) {
  out << "node,alpha,beta,gamma_fwd,delta,energy_units\n";
  for (const auto& [id, c] : trace.counts) {
    out << id << ',' << c.alpha << ',' << c.beta << ',' << c.gamma_fwd << ',' << c.delta << ','
        << node_energy(c, trace.energy, mode) << '\n';
  }
}

void write_plan_history_csv(std::ostream& out, const TraceSet& trace) {
  out << "time_s,node,gamma\n";
  for (const auto& p : trace.plans) {
    for (const auto& [id, gamma] : p.plan.entries()) {
      out << format_seconds(p.at) << ',' << id << ',' << gamma << '\n';
    }
  }
}

namespace {

template <typename Fn>
void write_file(const std::filesystem::path& file, Fn&& fn) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(Errc::InvalidArgument, "cannot open " + file.string() + " for writing");
  fn(out);
  if (!out) throw Error(Errc::InvalidArgument, "failed writing " + file.string());
}

}  // namespace

void write_traces(const std::filesystem::path& dir, const TraceSet& trace) {
  std::filesystem::create_directories(dir);
  write_file(dir / "delays.csv", [&](std::ostream& o) { write_delays_csv(o, trace); });
  const auto counts = message_counts(trace, kCountWindow);
  write_file(dir / "messages.csv", [&](std::ostream& o) { write_messages_csv(o, counts); });
  write_file(dir / "energy.csv", [&](std::ostream& o) { write_energy_csv(o, trace, energy_mode(trace.mode)); });
  write_file(dir / "plan_history.csv", [&](std::ostream& o) { write_plan_history_csv(o, trace); });
}

}  // namespace optbundle
