#pragma once

#include <string>
#include <vector>

#include "microtrap/config.hpp"

namespace microtrap {

struct RunResult {
    std::vector<std::string> files_written;
    std::vector<std::string> summary_lines;
};

// Executes one CLI subcommand (trap, array, move, address, readout, mc)
// against a parsed scenario, writing artifacts into the scenario's output
// directory. Missing sections raise ConfigError; physics preconditions
// propagate as domain errors; write failures raise IoError.
RunResult run_subcommand(const std::string& subcommand, const Scenario& scenario);

// Fits an external time_s,count decay CSV and writes fit.json to out_dir.
RunResult run_fit(const std::string& input_csv_path, const std::string& out_dir);

// Builds the trap array a scenario describes (single, dual, or VCSEL
// source, gaussian or uniform illumination). Exposed for tests.
TrapArray build_scenario_array(const Scenario& scenario);

}  // namespace microtrap
