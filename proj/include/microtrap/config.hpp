#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "microtrap/array.hpp"
#include "microtrap/montecarlo.hpp"
#include "microtrap/optics.hpp"
#include "microtrap/register.hpp"
#include "microtrap/species.hpp"

namespace microtrap {

// Invalid config content (unknown/missing/unparsable keys). Distinct from
// domain errors so the CLI can map it to its own exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Failed reads/writes of config and artifact files.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Sectioned key = value text, order-preserving; the normalized form is
// echoed into every output so results are self-describing.
struct RawConfig {
    std::vector<std::pair<std::string, KeyValues>> sections;

    KeyValues* find(const std::string& section);
    const KeyValues* find(const std::string& section) const;
    // Sets section.key, creating the section or key as needed.
    void set(const std::string& section, const std::string& key, const std::string& value);
};

struct TrapSettings {
    double power = 0.0;              // W
    double waist = 0.0;              // m
    double wavelength_offset = 0.0;  // m, red positive
};

struct BeamSettings {
    double power = 0.0;    // W
    double waist = 0.0;    // m
    double center_x = 0.0; // m, in the lens-array plane
    double center_y = 0.0; // m
};

enum class Illumination { gaussian, uniform };
enum class SourceChoice { single_beam, dual_beam, vcsel };

struct ArraySettings {
    double wavelength_offset = 0.0;  // m
    double min_depth = 0.0;          // J
    Illumination illumination = Illumination::gaussian;
    int quad_order = 32;
    SourceChoice source = SourceChoice::single_beam;
    double dual_angle = 0.0;  // rad, used when source == dual_beam
};

struct VcselSettings {
    double default_power = 0.0;  // W
    std::set<int> disabled_sites;
    std::map<int, double> power_overrides;     // W
    std::map<int, double> wavelength_offsets;  // m
};

struct ReadoutSettings {
    double na = 0.0;
    bool use_lens_array_na = false;
    long scatter_count = 0;
};

struct OutputSettings {
    std::string directory = ".";
};

// A parsed scenario: the normalized raw text plus typed views of every
// section present, converted to SI at this boundary.
struct Scenario {
    RawConfig raw;
    AtomSpecies species;  // defaults to the built-in Rb85 record
    std::optional<TrapSettings> trap;
    std::optional<BeamSettings> beam;
    std::optional<MicrolensArray> lens_array;
    std::optional<RelayTelescope> relay;
    std::optional<ArraySettings> array;
    std::optional<VcselSettings> vcsel;
    std::optional<RamanPulse> addressing;
    std::vector<RamanPulse> pulses;  // ordered [pulse.N] sections
    std::optional<SpacingSchedule> schedule;
    std::optional<McScenario> montecarlo;
    std::optional<ReadoutSettings> readout;
    OutputSettings output;
};

// Overrides are "section.key=value" strings applied on top of the file
// content before validation, exactly as if the file had been edited.
Scenario parse_scenario_text(const std::string& text,
                             const std::vector<std::string>& overrides = {});
Scenario parse_scenario_file(const std::string& path,
                             const std::vector<std::string>& overrides = {});

// Normalized config text; re-parsing it reproduces an equivalent Scenario.
std::string to_config_text(const Scenario& scenario);

// The same normalized content as a JSON object {section: {key: value}}.
nlohmann::json config_json(const Scenario& scenario);

// Rebuilds a Scenario from a config_json echo.
Scenario scenario_from_config_json(const nlohmann::json& echo);

}  // namespace microtrap
