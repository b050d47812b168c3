#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "microtrap/config.hpp"
#include "microtrap/runner.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
};

void add_common_options(CLI::App* sub, CommonOptions& options) {
    sub->add_option("--config", options.config_path, "Scenario config file")
        ->required();
    sub->add_option("--out", options.out_dir, "Output directory (overrides [output] directory)");
    sub->add_option("--set", options.sets,
                    "Override a config value as section.key=value (repeatable)");
    sub->add_option("--seed", options.seed, "Override montecarlo.seed");
}

int run(const std::string& name, const CommonOptions& options) {
    std::vector<std::string> overrides = options.sets;
    if (options.seed) {
        overrides.push_back("montecarlo.seed=" + std::to_string(*options.seed));
    }
    if (!options.out_dir.empty()) {
        overrides.push_back("output.directory=" + options.out_dir);
    }
    const microtrap::Scenario scenario =
        microtrap::parse_scenario_file(options.config_path, overrides);
    const microtrap::RunResult result = microtrap::run_subcommand(name, scenario);
    for (const std::string& line : result.summary_lines) std::cout << line << "\n";
    for (const std::string& file : result.files_written) std::cout << "wrote " << file << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Microlens-array dipole trap calculator"};
    app.require_subcommand(1);

    CommonOptions options;
    const char* subcommands[] = {"trap", "array", "move", "address", "readout", "mc"};
    const char* descriptions[] = {
        "Characterize the single trap described by [trap]",
        "Build the trap array described by [lens_array]/[array]",
        "Run the dual-beam spacing schedule in [schedule]",
        "Apply the [addressing] pulse with crosstalk",
        "Apply [pulse.N] sections, then compute per-site readout signals",
        "Monte Carlo loading and lifetime for the [trap] site",
    };
    for (std::size_t i = 0; i < std::size(subcommands); ++i) {
        CLI::App* sub = app.add_subcommand(subcommands[i], descriptions[i]);
        add_common_options(sub, options);
    }

    std::string fit_input;
    std::string fit_out = ".";
    CLI::App* fit = app.add_subcommand("fit", "Fit an exponential lifetime to a time_s,count CSV");
    fit->add_option("input", fit_input, "Decay curve CSV (time_s,count)")->required();
    fit->add_option("--out", fit_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (fit->parsed()) {
            const microtrap::RunResult result = microtrap::run_fit(fit_input, fit_out);
            for (const std::string& line : result.summary_lines) std::cout << line << "\n";
            for (const std::string& file : result.files_written) {
                std::cout << "wrote " << file << "\n";
            }
            return 0;
        }
        for (const char* name : subcommands) {
            if (app.get_subcommand(name)->parsed()) return run(name, options);
        }
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const microtrap::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const microtrap::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::out_of_range& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
