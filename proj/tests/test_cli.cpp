#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "optbundle/error.hpp"
#include "scenario.hpp"

using namespace optbundle;
using namespace optbundle::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kPresets = OPTBUNDLE_PRESET_DIR;

json preset(const std::string& name) {
  std::ifstream in(kPresets / name);
  return json::parse(in);
}

fs::path write_scenario(const std::string& name, const std::string& text) {
  const fs::path dir = fs::current_path() / "cli_scenarios";
  fs::create_directories(dir);
  const auto file = dir / name;
  std::ofstream(file) << text;
  return file;
}

fs::path write_scenario(const std::string& name, const json& doc) { return write_scenario(name, doc.dump(2)); }

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

void expect_config_error(const json& doc, const std::string& mention) {
  try {
    parse_scenario(doc).validate();
    FAIL("accepted: " << doc.dump());
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConfigError);
    const std::string what = e.what();
    CAPTURE(what);
    CHECK(std::string(e.what()).find(mention) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("presets load") {
  const auto s = load_scenario(kPresets / "static_8s.json");
  CHECK(s.schedule.size() == 1);
  CHECK(s.schedule[0].at == 300s);
  CHECK(s.schedule[0].req.d_e2e_max == 8s);
  CHECK(s.schedule[0].req.chi_max == 15);
  CHECK(s.initial_gamma() == 15);
  CHECK(s.duration == 3600s);
  CHECK(s.mode == BundlingMode::AllData);

  const auto d = load_scenario(kPresets / "dynamic_8to2.json");
  REQUIRE(d.schedule.size() == 4);
  const Duration want[] = {8s, 6s, 4s, 2s};
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(d.schedule[k].req.d_e2e_max == want[k]);
    CHECK(d.schedule[k].req.chi_max == 10);
  }
}

TEST_CASE("scenario parsing rejects bad documents") {
  const auto base = preset("static_8s.json");

  auto doc = base;
  doc["colour"] = "blue";
  expect_config_error(doc, "colour");

  doc = base;
  doc["energy"]["e_laser"] = 3;
  expect_config_error(doc, "energy.e_laser");

  doc = base;
  doc.erase("version");
  expect_config_error(doc, "version");

  doc = base;
  doc["version"] = 2;
  expect_config_error(doc, "version");

  doc = base;
  doc["bundling_mode"] = "some_data";
  expect_config_error(doc, "bundling_mode");

  doc = base;
  doc["topology"] = json::array({json::array({1, 0}), json::array({1, 2})});
  expect_config_error(doc, "topology");

  doc = base;
  doc["requirement_schedule"][0]["chi_min"] = -1;
  expect_config_error(doc, "chi_min");

  doc = base;
  doc["accuracy_table"] = "atomic_clock";
  expect_config_error(doc, "accuracy_table");

  doc = base;
  doc["self_data"] = true;
  doc.erase("bundling_mode");
  expect_config_error(doc, "self_data");
}

TEST_CASE("scenario options") {
  auto doc = preset("static_8s.json");
  doc["bundling_mode"] = "self_data";
  doc["accuracy_table"] = "ee_ascfr";
  doc["prop_delay_s"] = 0.0005;
  doc.erase("initial_plan");
  const auto s = parse_scenario(doc);
  CHECK(s.mode == BundlingMode::SelfData);
  CHECK(s.d_prop == 500us);
  CHECK(s.initial_gamma() == 15);  // chi_max of the first requirement
  CHECK(s.accuracy.rows().size() == ee_ascfr_table().rows().size());

  doc["accuracy_table"] = {{"csv", std::string(OPTBUNDLE_DATA_DIR) + "/ahts.csv"}, {"conservative", true}};
  CHECK(parse_scenario(doc).accuracy.rows().size() == ahts_table().rows().size());
}

TEST_CASE("optimize command") {
  const auto file = kPresets / "static_8s.json";
  std::ostringstream out;
  std::ostringstream err;
  CHECK(cmd_optimize(file, false, 0, out, err) == kOk);
  const auto text = out.str();
  CHECK(text.find("objective 26\n") != std::string::npos);
  CHECK(text.find("bound 8 s") != std::string::npos);
  CHECK(text.find("lp_bound 107/4") != std::string::npos);
  CHECK(err.str().empty());

  std::ostringstream dump;
  CHECK(cmd_optimize(file, true, 0, dump, err) == kOk);
  CHECK(dump.str().find("# maximize G1 + G2 + G3 + G4") != std::string::npos);
  CHECK(dump.str().find("1 <= G4 <= 15") != std::string::npos);
  CHECK(dump.str().find("1*G4 + 1/2*G2 + 1/4*G1 <= 8") != std::string::npos);

  std::ostringstream none;
  CHECK(cmd_optimize(file, false, 3, none, err) == kConfigError);
}

TEST_CASE("optimize command reports infeasible bounds") {
  auto doc = preset("static_8s.json");
  doc["requirement_schedule"][0]["d_e2e_max_s"] = 0.5;
  const auto file = write_scenario("tight.json", doc);
  std::ostringstream out;
  std::ostringstream err;
  CHECK(cmd_optimize(file, false, 0, out, err) == kInfeasible);
  CHECK(err.str().find("node 4") != std::string::npos);
}

TEST_CASE("config errors exit 1 with a diagnostic") {
  std::ostringstream out;
  std::ostringstream err;

  const auto broken = write_scenario("broken.json", std::string("{\n  \"version\": 1,\n  \"topology\": [[1, 0]\n"));
  CHECK(cmd_optimize(broken, false, 0, out, err) == kConfigError);
  CHECK(err.str().find("ConfigError") != std::string::npos);
  CHECK(err.str().find("line") != std::string::npos);

  std::ostringstream err2;
  CHECK(cmd_simulate("does/not/exist.json", "unused", out, err2) == kConfigError);
  CHECK_FALSE(err2.str().empty());

  auto doc = preset("static_8s.json");
  doc["duration_s"] = 0;
  std::ostringstream err3;
  CHECK(cmd_simulate(write_scenario("zero.json", doc), "unused", out, err3) == kConfigError);
  CHECK(err3.str().find("duration") != std::string::npos);
}

TEST_CASE("simulate writes identical outputs on every invocation") {
  auto doc = preset("static_8s.json");
  doc["duration_s"] = 900;
  const auto file = write_scenario("short.json", doc);
  const fs::path a = fs::current_path() / "sim_a";
  const fs::path b = fs::current_path() / "sim_b";
  std::ostringstream out;
  std::ostringstream err;
  REQUIRE(cmd_simulate(file, a, out, err) == kOk);
  REQUIRE(cmd_simulate(file, b, out, err) == kOk);
  for (const char* name : {"delays.csv", "messages.csv", "energy.csv", "plan_history.csv", "summary.json"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }

  const auto delays = csv_rows(slurp(a / "delays.csv"));
  CHECK(delays.front() == std::vector<std::string>{"arrival_s", "origin", "e2e_s"});
  CHECK(delays.size() > 2000);
  CHECK(csv_rows(slurp(a / "messages.csv")).front() ==
        std::vector<std::string>{"window_start_s", "node", "rx", "tx"});
  CHECK(csv_rows(slurp(a / "energy.csv")).front() ==
        std::vector<std::string>{"node", "alpha", "beta", "gamma_fwd", "delta", "energy_units"});
  CHECK(csv_rows(slurp(a / "plan_history.csv")).front() == std::vector<std::string>{"time_s", "node", "gamma"});

  const auto summary = json::parse(slurp(a / "summary.json"));
  REQUIRE(summary["segments"].size() == 1);
  CHECK(summary["segments"][0]["violation_rate"].get<double>() <= 0.05);
  CHECK(summary["energy"]["bundled"].get<std::uint64_t>() * 3 < summary["energy"]["no_bundling"].get<std::uint64_t>());
}

TEST_CASE("sweep over the delay bound") {
  std::ostringstream out;
  std::ostringstream err;
  auto doc = preset("static_8s.json");
  doc["duration_s"] = 900;
  const auto file = write_scenario("sweep.json", doc);
  const auto csv_file = fs::current_path() / "sweep_d.csv";
  REQUIRE(cmd_sweep(file, "d_e2e_max", {8, 6, 4, 2}, csv_file, out, err) == kOk);
  CHECK(slurp(csv_file) == out.str());

  const auto rows = csv_rows(out.str());
  REQUIRE(rows.size() == 5);
  CHECK(rows[0][3] == "objective");
  long prev = 1 << 30;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k][2] == "ok");
    const long obj = std::stol(rows[k][3]);
    CHECK(obj <= prev);
    prev = obj;
  }
  CHECK(rows[1][3] == "26");

  std::ostringstream out2;
  REQUIRE(cmd_sweep(file, "d_e2e_max", {0.5}, std::nullopt, out2, err) == kOk);
  CHECK(csv_rows(out2.str())[1][2] == "infeasible");
}

TEST_CASE("sweep over the synchronization interval") {
  std::ostringstream out;
  std::ostringstream err;
  auto doc = preset("static_8s.json");
  doc["duration_s"] = 1800;
  const auto file = write_scenario("sweep_si.json", doc);
  REQUIRE(cmd_sweep(file, "si", {100, 10, 1}, std::nullopt, out, err) == kOk);
  const auto rows = csv_rows(out.str());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][3] == "median_error_s");
  const double m100 = std::stod(rows[1][3]);
  const double m10 = std::stod(rows[2][3]);
  const double m1 = std::stod(rows[3][3]);
  CHECK(m10 <= m100);
  CHECK(m1 <= m10);
}

TEST_CASE("sweep argument errors") {
  std::ostringstream out;
  std::ostringstream err;
  const auto file = kPresets / "static_8s.json";
  CHECK(cmd_sweep(file, "d_e2e_max", {}, std::nullopt, out, err) == kConfigError);
  CHECK(cmd_sweep(file, "temperature", {1, 2}, std::nullopt, out, err) == kConfigError);
  CHECK(err.str().find("temperature") != std::string::npos);
}
