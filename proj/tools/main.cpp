#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "optbundle/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Delay-constrained message bundling: optimizer and network simulator", "optbundle"};
  app.require_subcommand(1);

  std::string scenario;
  bool dump = false;
  std::size_t segment = 0;
  auto* opt = app.add_subcommand("optimize", "Solve the bundling plan for one requirement of a scenario");
  opt->add_option("scenario", scenario, "Scenario JSON file")->required();
  opt->add_flag("--dump-constraints", dump, "Print the constraint set before solving");
  opt->add_option("--segment", segment, "Index into requirement_schedule")->capture_default_str();

  std::string out_dir = "out";
  auto* sim = app.add_subcommand("simulate", "Run a scenario and write CSV traces plus summary.json");
  sim->add_option("scenario", scenario, "Scenario JSON file")->required();
  sim->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();

  std::string axis;
  std::vector<double> values;
  std::string csv;
  auto* sweep = app.add_subcommand("sweep", "Run one scenario per value of a parameter");
  sweep->add_option("scenario", scenario, "Scenario JSON file")->required();
  sweep->add_option("--axis", axis, "d_e2e_max | chi_max | drift_ppm | si")->required();
  sweep->add_option("--values", values, "Values (seconds for d_e2e_max and si)")->delimiter(',');
  sweep->add_option("-o,--out", csv, "Also write the table to this CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : optbundle::cli::kConfigError;
  }

  try {
    if (*opt) return optbundle::cli::cmd_optimize(scenario, dump, segment, std::cout, std::cerr);
    if (*sim) return optbundle::cli::cmd_simulate(scenario, out_dir, std::cout, std::cerr);
    std::optional<std::filesystem::path> csv_file;
    if (!csv.empty()) csv_file = csv;
    return optbundle::cli::cmd_sweep(scenario, axis, values, csv_file, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return optbundle::cli::kConfigError;
  }
}
