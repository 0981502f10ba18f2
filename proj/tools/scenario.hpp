#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "optbundle/simulator.hpp"

namespace optbundle::cli {

inline constexpr int kScenarioVersion = 1;

// Parses a scenario document. Relative accuracy-table paths resolve against
// base_dir. Throws Error(ConfigError) naming the offending field.
ScenarioConfig parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

// Reads and parses a scenario file, then validates it.
ScenarioConfig load_scenario(const std::filesystem::path& file);

}  // namespace optbundle::cli
