#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "optbundle/analysis.hpp"
#include "optbundle/delay.hpp"
#include "optbundle/energy.hpp"
#include "optbundle/error.hpp"
#include "optbundle/optimizer.hpp"
#include "optbundle/trace_io.hpp"
#include "scenario.hpp"

namespace optbundle::cli {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string rational_text(const Rational& r) {
  return to_string(r) + " (" + num(static_cast<double>(r)) + ")";
}

const char* mode_name(BundlingMode m) { return m == BundlingMode::AllData ? "all_data" : "self_data"; }

}  // namespace

int cmd_optimize(const std::filesystem::path& scenario, bool dump_constraints, std::size_t segment,
                 std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  Topology topo;
  try {
    cfg = load_scenario(scenario);
    topo = validate_topology(cfg.topology);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
  if (segment >= cfg.schedule.size()) {
    err << "ConfigError: scenario has " << cfg.schedule.size() << " requirement(s), no segment " << segment << '\n';
    return kConfigError;
  }
  const RequirementSet& req = cfg.schedule[segment].req;

  ConstraintSet cs;
  try {
    cs = build_constraints(topo, req, cfg.accuracy);
  } catch (const Error& e) {
    if (e.code() != Errc::InfeasibleBounds && e.code() != Errc::UnsatisfiableAccuracy) throw;
    err << "infeasible: " << e.detail() << '\n';
    return kInfeasible;
  }
  if (dump_constraints) out << cs.to_text();

  const SolveReport r = solve(cs);
  if (r.status != SolveStatus::Optimal) {
    err << "infeasible: no integer plan satisfies every row\n";
    return kInfeasible;
  }
  out << "bound " << format_seconds_short(cs.bound) << " s\n";
  out << "node  lambda  gamma  model_e2e_s\n";
  for (NodeId id : topo.sensor_nodes()) {
    const Duration model = e2e_delay_model(id, r.plan, topo, cfg.i_meas, DelayMode::Approximate);
    out << id << "  " << topo.offspring(id) << "  " << r.plan.at(id) << "  " << format_seconds_short(model) << '\n';
  }
  out << "objective " << r.objective << '\n';
  out << "lp_bound " << rational_text(r.lp_bound) << '\n';
  out << "nodes_explored " << r.nodes_explored << '\n';
  return kOk;
}

nlohmann::json summarize(const TraceSet& run, const TraceSet& baseline) {
  nlohmann::json s;
  s["mode"] = mode_name(run.mode);
  s["duration_s"] = to_seconds(run.duration);
  s["delay_samples"] = run.delays.size();

  auto segments = nlohmann::json::array();
  for (const auto& seg : segment_compliance(run)) {
    segments.push_back({
        {"index", seg.index},
        {"start_s", to_seconds(seg.start)},
        {"end_s", to_seconds(seg.end)},
        {"d_e2e_max_s", to_seconds(seg.req.d_e2e_max)},
        {"settled_s", to_seconds(seg.settled_at)},
        {"samples", seg.samples},
        {"violations", seg.violations},
        {"violation_rate", seg.violation_rate()},
        {"max_e2e_s", to_seconds(seg.max_e2e)},
    });
  }
  s["segments"] = segments;

  auto plans = nlohmann::json::array();
  for (const auto& p : run.plans) {
    nlohmann::json gammas;
    for (const auto& [id, g] : p.plan.entries()) gammas[std::to_string(id)] = g;
    plans.push_back({{"time_s", to_seconds(p.at)}, {"revision", p.revision}, {"gamma", gammas}});
  }
  s["plans"] = plans;

  const auto traffic = [](const TraceSet& t) {
    const auto counts = message_counts(t, kCountWindow);
    nlohmann::json per_node;
    for (NodeId id : t.topology.sensor_nodes()) {
      const NodeId one[] = {id};
      per_node[std::to_string(id)] = mean_traffic(counts, one);
    }
    return nlohmann::json{{"window_s", to_seconds(kCountWindow)},
                          {"mean", mean_traffic(counts, t.topology.sensor_nodes())},
                          {"per_node", per_node}};
  };
  s["traffic"] = traffic(run);
  s["traffic_no_bundling"] = traffic(baseline);

  s["energy"] = {
      {"bundled", energy_tally(run.counts, run.energy, energy_mode(run.mode)).total},
      {"no_bundling", energy_tally(baseline.counts, baseline.energy, EnergyMode::None).total},
  };
  return s;
}

int cmd_simulate(const std::filesystem::path& scenario, const std::filesystem::path& out_dir, std::ostream& out,
                 std::ostream& err) {
  ScenarioConfig cfg;
  try {
    cfg = load_scenario(scenario);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
  auto baseline = std::async(std::launch::async, [&] { return run(no_bundling_baseline(cfg)); });
  const TraceSet trace = run(cfg);
  const TraceSet base = baseline.get();

  write_traces(out_dir, trace);
  const auto summary = summarize(trace, base);
  {
    std::ofstream f(out_dir / "summary.json", std::ios::binary);
    f << summary.dump(2) << '\n';
  }

  out << "delay samples " << trace.delays.size() << '\n';
  for (const auto& seg : summary["segments"]) {
    out << "segment " << seg["index"].get<std::size_t>() << " [" << num(seg["start_s"]) << ", "
        << num(seg["end_s"]) << ") s  bound " << num(seg["d_e2e_max_s"]) << " s  settled "
        << num(seg["settled_s"]) << " s  violations " << seg["violations"].get<std::uint64_t>() << "/"
        << seg["samples"].get<std::uint64_t>() << "  max " << num(seg["max_e2e_s"]) << " s\n";
  }
  out << "mean rx+tx per 10 s window " << num(summary["traffic"]["mean"]) << " (no bundling "
      << num(summary["traffic_no_bundling"]["mean"]) << ")\n";
  out << "energy " << summary["energy"]["bundled"].get<std::uint64_t>() << " (no bundling "
      << summary["energy"]["no_bundling"].get<std::uint64_t>() << ")\n";
  out << "wrote " << out_dir.string() << '\n';
  return kOk;
}

namespace {

ScenarioConfig single_requirement(ScenarioConfig cfg) {
  cfg.schedule.resize(std::min<std::size_t>(cfg.schedule.size(), 1));
  return cfg;
}

std::string sweep_row(const ScenarioConfig& base, const std::string& axis, double value) {
  std::ostringstream row;
  row << axis << ',' << num(value) << ',';

  if (axis == "si") {
    SyncStudyConfig sc;
    sc.si = from_seconds(value);
    sc.duration = base.duration;
    sc.base_seed = base.seed;
    sc.wander_ppm = base.wander_ppm;
    sc.wander_period = base.wander_period;
    double drift = 0.0;
    for (const auto& [id, ppm] : base.drifts_ppm) drift = std::max(drift, std::abs(ppm));
    if (drift > 0.0) sc.max_drift_ppm = drift;
    const auto r = run_sync_study(sc);
    row << "ok," << num(r.median_s) << ',' << num(r.p95_s) << ',' << num(r.max_s) << ',' << r.errors_s.size();
    return row.str();
  }

  ScenarioConfig cfg = single_requirement(base);
  if (axis == "drift_ppm") {
    const Topology topo = validate_topology(cfg.topology);
    double sign = 1.0;
    for (NodeId id : topo.sensor_nodes()) {
      cfg.drifts_ppm[id] = sign * value;
      sign = -sign;
    }
  } else if (!cfg.schedule.empty()) {
    auto& req = cfg.schedule.front().req;
    if (axis == "d_e2e_max") req.d_e2e_max = from_seconds(value);
    if (axis == "chi_max") req.chi_max = static_cast<std::uint32_t>(value);
  }

  try {
    cfg.validate();
  } catch (const Error&) {
    return row.str() + "invalid,,,,,,";
  }

  std::string objective;
  std::string lp;
  if (!cfg.schedule.empty()) {
    try {
      const auto r = solve(build_constraints(validate_topology(cfg.topology), cfg.schedule.front().req, cfg.accuracy));
      objective = std::to_string(r.objective);
      lp = num(static_cast<double>(r.lp_bound));
    } catch (const Error& e) {
      if (e.code() != Errc::InfeasibleBounds) throw;
      return row.str() + "infeasible,,,,,,";
    }
  }
  const TraceSet t = run(cfg);
  const auto segs = segment_compliance(t);
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  Duration max_e2e{0};
  for (const auto& s : segs) {
    samples += s.samples;
    violations += s.violations;
    max_e2e = std::max(max_e2e, s.max_e2e);
  }
  const double rate = samples == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(samples);
  const auto counts = message_counts(t, kCountWindow);
  row << "ok," << objective << ',' << lp << ',' << num(rate) << ',' << format_seconds(max_e2e) << ','
      << num(mean_traffic(counts, t.topology.sensor_nodes())) << ','
      << energy_tally(t.counts, t.energy, energy_mode(t.mode)).total;
  return row.str();
}

}  // namespace

int cmd_sweep(const std::filesystem::path& scenario, const std::string& axis, const std::vector<double>& values,
              const std::optional<std::filesystem::path>& csv_file, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> axes{"d_e2e_max", "chi_max", "drift_ppm", "si"};
  if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
    err << "unknown sweep axis '" << axis << "' (expected d_e2e_max, chi_max, drift_ppm or si)\n";
    return kConfigError;
  }
  if (values.empty()) {
    err << "sweep needs at least one value\n";
    return kConfigError;
  }
  ScenarioConfig cfg;
  try {
    cfg = load_scenario(scenario);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kConfigError;
  }

  std::vector<std::future<std::string>> jobs;
  jobs.reserve(values.size());
  for (double v : values) jobs.push_back(std::async(std::launch::async, sweep_row, std::cref(cfg), axis, v));

  std::ostringstream csv;
  if (axis == "si") {
    csv << "axis,value,status,median_error_s,p95_error_s,max_error_s,samples\n";
  } else {
    csv << "axis,value,status,objective,lp_bound,violation_rate,max_e2e_s,mean_traffic,energy_units\n";
  }
  for (auto& j : jobs) csv << j.get() << '\n';

  out << csv.str();
  if (csv_file) {
    std::ofstream f(*csv_file, std::ios::binary);
    if (!f) {
      err << "cannot write " << csv_file->string() << '\n';
      return kConfigError;
    }
    f << csv.str();
  }
  return kOk;
}

}  // namespace optbundle::cli
