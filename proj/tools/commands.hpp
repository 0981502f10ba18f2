#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "optbundle/simulator.hpp"

namespace optbundle::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kInfeasible = 2 };

// Solves the requirement at position `segment` of the schedule.
int cmd_optimize(const std::filesystem::path& scenario, bool dump_constraints, std::size_t segment,
                 std::ostream& out, std::ostream& err);

// Runs the scenario and its no-bundling baseline; writes delays.csv,
// messages.csv, energy.csv, plan_history.csv and summary.json into out_dir.
int cmd_simulate(const std::filesystem::path& scenario, const std::filesystem::path& out_dir, std::ostream& out,
                 std::ostream& err);

// axis: d_e2e_max (s), chi_max, drift_ppm, si (s). One CSV row per value,
// written to out (and to csv_file when given). Runs execute concurrently.
int cmd_sweep(const std::filesystem::path& scenario, const std::string& axis, const std::vector<double>& values,
              const std::optional<std::filesystem::path>& csv_file, std::ostream& out, std::ostream& err);

nlohmann::json summarize(const TraceSet& run, const TraceSet& baseline);

}  // namespace optbundle::cli
