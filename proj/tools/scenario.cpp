#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "optbundle/error.hpp"

namespace optbundle::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(Errc::ConfigError, where + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.contains(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

std::string field(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where, "expected a finite number");
  return d;
}

std::uint64_t unsigned_int(const json& v, const std::string& where, std::uint64_t max) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    fail(where, "expected a non-negative integer");
  }
  const auto u = v.get<std::uint64_t>();
  if (u > max) fail(where, "must be at most " + std::to_string(max));
  return u;
}

Duration seconds(const json& v, const std::string& where) {
  const double s = number(v, where);
  if (std::abs(s) > 1e9) fail(where, "out of range");
  return from_seconds(s);
}

Duration millis(const json& v, const std::string& where) { return from_seconds(number(v, where) / 1000.0); }

NodeId node_id(const json& v, const std::string& where) {
  return static_cast<NodeId>(unsigned_int(v, where, std::numeric_limits<NodeId>::max()));
}

RequirementSet parse_requirement(const json& r, const std::string& where, Duration i_meas, Duration* at) {
  only_keys(r, where, {"at_s", "d_e2e_max_s", "sa_min_s", "chi_min", "chi_max"});
  RequirementSet req;
  req.i_meas = i_meas;
  if (!r.contains("at_s")) fail(field(where, "at_s"), "required");
  *at = seconds(r["at_s"], field(where, "at_s"));
  if (!r.contains("d_e2e_max_s")) fail(field(where, "d_e2e_max_s"), "required");
  req.d_e2e_max = seconds(r["d_e2e_max_s"], field(where, "d_e2e_max_s"));
  if (r.contains("sa_min_s")) req.sa_min_s = number(r["sa_min_s"], field(where, "sa_min_s"));
  if (r.contains("chi_min")) req.chi_min = static_cast<std::uint32_t>(unsigned_int(r["chi_min"], field(where, "chi_min"), 255));
  if (r.contains("chi_max")) req.chi_max = static_cast<std::uint32_t>(unsigned_int(r["chi_max"], field(where, "chi_max"), 255));
  return req;
}

AccuracyTable parse_accuracy(const json& v, const std::filesystem::path& base_dir) {
  const std::string where = "accuracy_table";
  std::filesystem::path file;
  bool conservative = false;
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name == "ahts") return ahts_table();
    if (name == "ee_ascfr") return ee_ascfr_table();
    file = name;
  } else if (v.is_object()) {
    only_keys(v, where, {"csv", "conservative"});
    if (!v.contains("csv") || !v["csv"].is_string()) fail(field(where, "csv"), "expected a file path");
    file = v["csv"].get<std::string>();
    if (v.contains("conservative")) {
      if (!v["conservative"].is_boolean()) fail(field(where, "conservative"), "expected true or false");
      conservative = v["conservative"].get<bool>();
    }
  } else {
    fail(where, "expected \"ahts\", \"ee_ascfr\", a CSV path or {\"csv\": ..., \"conservative\": ...}");
  }
  if (file.is_relative()) file = base_dir / file;
  return load_accuracy_csv(file, conservative);
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  only_keys(doc, "",
            {"version", "topology", "i_meas_s", "requirement_schedule", "bundling_mode", "energy", "service",
             "prop_delay_s", "drifts_ppm", "clock_wander_ppm", "clock_wander_period_s", "seed", "duration_s",
             "initial_plan", "optimize", "accuracy_table"});
  if (!doc.contains("version")) fail("version", "required");
  if (unsigned_int(doc["version"], "version", 1000) != kScenarioVersion) {
    fail("version", "unsupported, expected " + std::to_string(kScenarioVersion));
  }

  ScenarioConfig cfg;
  if (!doc.contains("topology") || !doc["topology"].is_array()) fail("topology", "expected [[child, parent], ...]");
  for (std::size_t k = 0; k < doc["topology"].size(); ++k) {
    const auto& e = doc["topology"][k];
    const std::string where = "topology[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 2) fail(where, "expected [child, parent]");
    cfg.topology.push_back({node_id(e[0], where + "[0]"), node_id(e[1], where + "[1]")});
  }

  if (doc.contains("i_meas_s")) cfg.i_meas = seconds(doc["i_meas_s"], "i_meas_s");
  if (!doc.contains("duration_s")) fail("duration_s", "required");
  cfg.duration = seconds(doc["duration_s"], "duration_s");

  if (doc.contains("requirement_schedule")) {
    const auto& sched = doc["requirement_schedule"];
    if (!sched.is_array()) fail("requirement_schedule", "expected a list");
    for (std::size_t k = 0; k < sched.size(); ++k) {
      Duration at{0};
      const auto req =
          parse_requirement(sched[k], "requirement_schedule[" + std::to_string(k) + "]", cfg.i_meas, &at);
      cfg.schedule.push_back({at, req});
    }
  }

  if (doc.contains("bundling_mode")) {
    const auto& m = doc["bundling_mode"];
    if (m == "all_data") {
      cfg.mode = BundlingMode::AllData;
    } else if (m == "self_data") {
      cfg.mode = BundlingMode::SelfData;
    } else {
      fail("bundling_mode", "expected \"all_data\" or \"self_data\"");
    }
  }

  if (doc.contains("energy")) {
    const auto& e = doc["energy"];
    only_keys(e, "energy", {"e_meas", "e_sync", "e_fwd", "e_bundle"});
    const auto get = [&](const char* key, std::uint64_t& out) {
      if (e.contains(key)) out = unsigned_int(e[key], field("energy", key), 1'000'000'000);
    };
    get("e_meas", cfg.energy.e_meas);
    get("e_sync", cfg.energy.e_sync);
    get("e_fwd", cfg.energy.e_fwd);
    get("e_bundle", cfg.energy.e_bundle);
  }

  if (doc.contains("service")) {
    const auto& s = doc["service"];
    only_keys(s, "service", {"spi_ms", "mac_ms", "frame_ms", "ack_ms", "wait_ack_ms", "retry_ms", "n_max"});
    const auto get = [&](const char* key, Duration& out) {
      if (s.contains(key)) out = millis(s[key], field("service", key));
    };
    get("spi_ms", cfg.service.d_spi);
    get("mac_ms", cfg.service.d_mac);
    get("frame_ms", cfg.service.d_frame);
    get("ack_ms", cfg.service.d_ack);
    get("wait_ack_ms", cfg.service.d_wait_ack);
    get("retry_ms", cfg.service.t_retry);
    if (s.contains("n_max")) cfg.service.n_max = static_cast<std::uint32_t>(unsigned_int(s["n_max"], "service.n_max", 255));
  }

  if (doc.contains("prop_delay_s")) cfg.d_prop = seconds(doc["prop_delay_s"], "prop_delay_s");

  if (doc.contains("drifts_ppm")) {
    const auto& d = doc["drifts_ppm"];
    if (!d.is_object()) fail("drifts_ppm", "expected {\"node\": ppm, ...}");
    for (const auto& [key, value] : d.items()) {
      const std::string where = "drifts_ppm." + key;
      std::size_t used = 0;
      unsigned long id = 0;
      try {
        id = std::stoul(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || id > std::numeric_limits<NodeId>::max()) fail(where, "key must be a node id");
      cfg.drifts_ppm[static_cast<NodeId>(id)] = number(value, where);
    }
  }

  if (doc.contains("clock_wander_ppm")) cfg.wander_ppm = number(doc["clock_wander_ppm"], "clock_wander_ppm");
  if (doc.contains("clock_wander_period_s")) {
    cfg.wander_period = seconds(doc["clock_wander_period_s"], "clock_wander_period_s");
  }
  if (doc.contains("seed")) cfg.seed = unsigned_int(doc["seed"], "seed", std::numeric_limits<std::uint64_t>::max());
  if (doc.contains("initial_plan")) {
    cfg.initial_plan = static_cast<std::uint32_t>(unsigned_int(doc["initial_plan"], "initial_plan", 255));
  }
  if (doc.contains("optimize")) {
    if (!doc["optimize"].is_boolean()) fail("optimize", "expected true or false");
    cfg.optimize = doc["optimize"].get<bool>();
  }
  if (doc.contains("accuracy_table")) {
    try {
      cfg.accuracy = parse_accuracy(doc["accuracy_table"], base_dir);
    } catch (const Error& e) {
      if (e.code() == Errc::ConfigError && e.detail().starts_with("accuracy_table")) throw;
      fail("accuracy_table", e.detail());
    }
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::ConfigError, file.string() + ": cannot open");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ConfigError, file.string() + ": " + e.what());
  }
  ScenarioConfig cfg;
  try {
    cfg = parse_scenario(doc, file.parent_path());
    cfg.validate();
  } catch (const Error& e) {
    const std::string what = e.code() == Errc::ConfigError ? e.detail() : std::string(e.what());
    throw Error(Errc::ConfigError, file.string() + ": " + what, e.nodes());
  }
  return cfg;
}

}  // namespace optbundle::cli
