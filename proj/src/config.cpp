#include "microtrap/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "microtrap/constants.hpp"

namespace microtrap {

namespace {

std::string trim(const std::string& s) {
    size_t begin = 0;
    size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

[[noreturn]] void bad_key(const std::string& section, const std::string& key,
                          const std::string& what) {
    throw ConfigError("config key '" + section + "." + key + "': " + what);
}

double to_double(const std::string& section, const std::string& key,
                 const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const double parsed = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) {
        bad_key(section, key, "expected a number, got '" + value + "'");
    }
    return parsed;
}

long to_long(const std::string& section, const std::string& key,
             const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const long parsed = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size()) {
        bad_key(section, key, "expected an integer, got '" + value + "'");
    }
    return parsed;
}

std::uint64_t to_u64(const std::string& section, const std::string& key,
                     const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size()) {
        bad_key(section, key, "expected a non-negative integer, got '" + value + "'");
    }
    return static_cast<std::uint64_t>(parsed);
}

bool to_bool(const std::string& section, const std::string& key,
             const std::string& value) {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_key(section, key, "expected true/false, got '" + value + "'");
}

// Wraps one section's key/value list and tracks which keys were consumed so
// leftovers can be reported as unknown.
class SectionView {
  public:
    SectionView(std::string name, const KeyValues& entries)
        : name_(std::move(name)), entries_(entries), used_(entries.size(), false) {}

    const std::string& name() const { return name_; }

    std::optional<std::string> get(const std::string& key) {
        std::optional<std::string> found;
        for (size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].first != key) continue;
            if (found) bad_key(name_, key, "duplicate key");
            used_[i] = true;
            found = entries_[i].second;
        }
        return found;
    }

    std::string require(const std::string& key) {
        auto value = get(key);
        if (!value) throw ConfigError("config section [" + name_ + "] is missing required key '" + key + "'");
        return *value;
    }

    double number(const std::string& key, double scale) {
        return to_double(name_, key, require(key)) * scale;
    }

    double number_or(const std::string& key, double scale, double fallback) {
        auto value = get(key);
        if (!value) return fallback;
        return to_double(name_, key, *value) * scale;
    }

    long integer(const std::string& key) { return to_long(name_, key, require(key)); }

    long integer_or(const std::string& key, long fallback) {
        auto value = get(key);
        if (!value) return fallback;
        return to_long(name_, key, *value);
    }

    bool flag_or(const std::string& key, bool fallback) {
        auto value = get(key);
        if (!value) return fallback;
        return to_bool(name_, key, *value);
    }

    // Consumes every key matching prefix..._suffix, returning (middle, value).
    std::vector<std::pair<std::string, std::string>> matching(const std::string& prefix,
                                                              const std::string& suffix) {
        std::vector<std::pair<std::string, std::string>> out;
        for (size_t i = 0; i < entries_.size(); ++i) {
            const std::string& key = entries_[i].first;
            if (key.size() <= prefix.size() + suffix.size()) continue;
            if (key.compare(0, prefix.size(), prefix) != 0) continue;
            if (key.compare(key.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
            used_[i] = true;
            out.emplace_back(key.substr(prefix.size(), key.size() - prefix.size() - suffix.size()),
                             entries_[i].second);
        }
        return out;
    }

    void finish() const {
        for (size_t i = 0; i < entries_.size(); ++i) {
            if (!used_[i]) {
                throw ConfigError("unknown config key '" + name_ + "." + entries_[i].first + "'");
            }
        }
    }

  private:
    std::string name_;
    const KeyValues& entries_;
    std::vector<bool> used_;
};

constexpr double kMilli = 1e-3;
constexpr double kMicro = 1e-6;
constexpr double kNano = 1e-9;
// Frequencies in config are cyclic (Hz); internal rates are angular.
constexpr double kMegahertz = 2.0 * constants::pi * 1e6;
constexpr double kGigahertz = 2.0 * constants::pi * 1e9;

std::vector<std::string> split(const std::string& text, char delimiter) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream stream(text);
    while (std::getline(stream, part, delimiter)) parts.push_back(part);
    return parts;
}

AtomSpecies parse_species(SectionView& view) {
    AtomSpecies species = rubidium85();
    if (auto name = view.get("name")) species = species_by_name(trim(*name));
    const auto mass = view.get("mass_amu");
    const auto wavelength = view.get("wavelength_nm");
    const auto linewidth = view.get("linewidth_MHz");
    const auto saturation = view.get("saturation_intensity_W_m2");
    if (mass) species.mass = to_double("species", "mass_amu", *mass) * constants::atomic_mass_unit;
    if (wavelength) {
        species.transition_wavelength = to_double("species", "wavelength_nm", *wavelength) * kNano;
    }
    if (linewidth) {
        species.natural_linewidth = to_double("species", "linewidth_MHz", *linewidth) * kMegahertz;
    }
    if (saturation) {
        species.saturation_intensity =
            to_double("species", "saturation_intensity_W_m2", *saturation);
    } else if (wavelength || linewidth) {
        species.saturation_intensity = two_level_saturation_intensity(
            species.transition_wavelength, species.natural_linewidth);
    }
    validate(species);
    return species;
}

TrapSettings parse_trap(SectionView& view) {
    TrapSettings trap;
    trap.power = view.number("power_mW", kMilli);
    trap.waist = view.number("waist_um", kMicro);
    trap.wavelength_offset = view.number("detuning_nm", kNano);
    return trap;
}

BeamSettings parse_beam(SectionView& view) {
    BeamSettings beam;
    beam.power = view.number("power_mW", kMilli);
    beam.waist = view.number("waist_um", kMicro);
    beam.center_x = view.number_or("center_x_um", kMicro, 0.0);
    beam.center_y = view.number_or("center_y_um", kMicro, 0.0);
    return beam;
}

MicrolensArray parse_lens_array(SectionView& view) {
    MicrolensArray optics;
    optics.pitch = view.number("pitch_um", kMicro);
    optics.lens_diameter = view.number("lens_diameter_um", kMicro);
    optics.focal_length = view.number("focal_length_um", kMicro);
    optics.rows = static_cast<int>(view.integer_or("rows", 1));
    optics.cols = static_cast<int>(view.integer_or("cols", 1));
    if (auto kind = view.get("kind")) {
        const std::string k = trim(*kind);
        if (k == "refractive") {
            optics.kind = LensKind::refractive;
        } else if (k == "diffractive") {
            optics.kind = LensKind::diffractive;
        } else {
            bad_key("lens_array", "kind", "expected refractive or diffractive, got '" + k + "'");
        }
    }
    validate(optics);
    return optics;
}

RelayTelescope parse_relay(SectionView& view) {
    RelayTelescope relay;
    relay.focal_length_1 = view.number("focal_length_1_mm", kMilli);
    relay.focal_length_2 = view.number("focal_length_2_mm", kMilli);
    relay.aperture = view.number_or("aperture_mm", kMilli, 0.0);
    return relay;
}

ArraySettings parse_array(SectionView& view) {
    ArraySettings settings;
    settings.wavelength_offset = view.number("detuning_nm", kNano);
    settings.min_depth = view.number_or("min_depth_uK", kMicro, 0.0) * constants::boltzmann;
    if (auto illumination = view.get("illumination")) {
        const std::string i = trim(*illumination);
        if (i == "gaussian") {
            settings.illumination = Illumination::gaussian;
        } else if (i == "uniform") {
            settings.illumination = Illumination::uniform;
        } else {
            bad_key("array", "illumination", "expected gaussian or uniform, got '" + i + "'");
        }
    }
    settings.quad_order = static_cast<int>(view.integer_or("quad_order", 32));
    if (auto source = view.get("source")) {
        const std::string s = trim(*source);
        if (s == "single") {
            settings.source = SourceChoice::single_beam;
        } else if (s == "dual") {
            settings.source = SourceChoice::dual_beam;
        } else if (s == "vcsel") {
            settings.source = SourceChoice::vcsel;
        } else {
            bad_key("array", "source", "expected single, dual, or vcsel, got '" + s + "'");
        }
    }
    settings.dual_angle = view.number_or("dual_angle_mrad", kMilli, 0.0);
    return settings;
}

VcselSettings parse_vcsel(SectionView& view) {
    VcselSettings settings;
    settings.default_power = view.number("power_mW", kMilli);
    if (auto disabled = view.get("disabled_sites")) {
        for (const std::string& item : split(*disabled, ',')) {
            const std::string t = trim(item);
            if (t.empty()) continue;
            settings.disabled_sites.insert(
                static_cast<int>(to_long("vcsel", "disabled_sites", t)));
        }
    }
    for (const auto& [site, value] : view.matching("power_", "_mW")) {
        const long index = to_long("vcsel", "power_" + site + "_mW", site);
        settings.power_overrides[static_cast<int>(index)] =
            to_double("vcsel", "power_" + site + "_mW", value) * kMilli;
    }
    for (const auto& [site, value] : view.matching("wavelength_offset_", "_nm")) {
        const long index = to_long("vcsel", "wavelength_offset_" + site + "_nm", site);
        settings.wavelength_offsets[static_cast<int>(index)] =
            to_double("vcsel", "wavelength_offset_" + site + "_nm", value) * kNano;
    }
    return settings;
}

RamanPulse parse_pulse(SectionView& view) {
    RamanPulse pulse;
    pulse.target_site = static_cast<int>(view.integer("target_site"));
    pulse.beam_waist_at_plane = view.number_or("waist_um", kMicro, 5e-6);
    pulse.rabi_1 = view.number("rabi_1_MHz", kMegahertz);
    pulse.rabi_2 = view.number("rabi_2_MHz", kMegahertz);
    pulse.single_photon_detuning = view.number("single_photon_detuning_GHz", kGigahertz);
    pulse.duration = view.number("duration_us", kMicro);
    pulse.phase = view.number_or("phase_rad", 1.0, 0.0);
    return pulse;
}

SpacingSchedule parse_schedule(SectionView& view) {
    SpacingSchedule schedule;
    const std::string samples = view.require("samples");
    for (const std::string& item : split(samples, ',')) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        const auto sep = t.find(':');
        if (sep == std::string::npos) {
            bad_key("schedule", "samples", "expected time_ms:angle_mrad pairs, got '" + t + "'");
        }
        const double time = to_double("schedule", "samples", t.substr(0, sep)) * kMilli;
        const double angle = to_double("schedule", "samples", t.substr(sep + 1)) * kMilli;
        schedule.samples.emplace_back(time, angle);
    }
    schedule.hold_separation = view.number_or("hold_separation_um", kMicro, 0.0);
    schedule.hold_duration = view.number_or("hold_duration_ms", kMilli, 0.0);
    validate(schedule);
    return schedule;
}

McScenario parse_montecarlo(SectionView& view) {
    McScenario scenario;
    scenario.seed = to_u64("montecarlo", "seed", view.get("seed").value_or("0"));
    scenario.atom_count = static_cast<int>(view.integer_or("atom_count", 1));
    scenario.cloud_temperature = view.number("cloud_temperature_mK", kMilli);
    scenario.cloud_radius = view.number("cloud_radius_um", kMicro);
    const auto rate = view.get("background_loss_rate_per_s");
    const auto lifetime = view.get("background_lifetime_ms");
    if (rate && lifetime) {
        bad_key("montecarlo", "background_lifetime_ms",
                "give either background_loss_rate_per_s or background_lifetime_ms, not both");
    }
    if (rate) {
        scenario.background_loss_rate = to_double("montecarlo", "background_loss_rate_per_s", *rate);
    } else if (lifetime) {
        const double seconds = to_double("montecarlo", "background_lifetime_ms", *lifetime) * kMilli;
        if (seconds <= 0.0) bad_key("montecarlo", "background_lifetime_ms", "must be positive");
        scenario.background_loss_rate = 1.0 / seconds;
    }
    scenario.include_recoil_heating = view.flag_or("include_recoil_heating", false);
    scenario.duration = view.number("duration_ms", kMilli);
    scenario.time_step = view.number_or("time_step_ms", kMilli, 1e-3);
    const auto times = view.get("sample_times_ms");
    const auto count = view.get("sample_count");
    if (times && count) {
        bad_key("montecarlo", "sample_count",
                "give either sample_times_ms or sample_count, not both");
    }
    if (times) {
        for (const std::string& item : split(*times, ',')) {
            const std::string t = trim(item);
            if (t.empty()) continue;
            scenario.sample_times.push_back(to_double("montecarlo", "sample_times_ms", t) * kMilli);
        }
    } else {
        const long n = count ? to_long("montecarlo", "sample_count", *count) : 12;
        if (n < 2) bad_key("montecarlo", "sample_count", "must be at least 2");
        for (long i = 0; i < n; ++i) {
            scenario.sample_times.push_back(scenario.duration * static_cast<double>(i) /
                                            static_cast<double>(n - 1));
        }
    }
    validate(scenario);
    return scenario;
}

ReadoutSettings parse_readout(SectionView& view) {
    ReadoutSettings settings;
    const auto na = view.get("na");
    settings.use_lens_array_na = view.flag_or("use_lens_array_na", false);
    if (na && settings.use_lens_array_na) {
        bad_key("readout", "na", "give either na or use_lens_array_na, not both");
    }
    if (!na && !settings.use_lens_array_na) {
        throw ConfigError("config section [readout] needs either 'na' or 'use_lens_array_na'");
    }
    if (na) settings.na = to_double("readout", "na", *na);
    settings.scatter_count = view.integer("scatter_count");
    return settings;
}

OutputSettings parse_output(SectionView& view) {
    OutputSettings settings;
    if (auto directory = view.get("directory")) settings.directory = trim(*directory);
    return settings;
}

bool is_pulse_section(const std::string& name, long& index) {
    if (name.rfind("pulse.", 0) != 0) return false;
    const std::string tail = name.substr(6);
    if (tail.empty()) return false;
    for (char c : tail) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    index = std::strtol(tail.c_str(), nullptr, 10);
    return true;
}

RawConfig parse_raw(const std::string& text) {
    RawConfig raw;
    std::istringstream stream(text);
    std::string line;
    std::string current;
    int line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError("config line " + std::to_string(line_number) +
                                  ": malformed section header '" + line + "'");
            }
            current = trim(line.substr(1, line.size() - 2));
            if (raw.find(current)) {
                throw ConfigError("duplicate config section [" + current + "]");
            }
            raw.sections.emplace_back(current, KeyValues{});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": expected key = value, got '" + line + "'");
        }
        if (current.empty()) {
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": key outside any [section]");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_number) + ": empty key");
        }
        raw.find(current)->emplace_back(key, value);
    }
    return raw;
}

void apply_overrides(RawConfig& raw, const std::vector<std::string>& overrides) {
    for (const std::string& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("override '" + item + "' is not of the form section.key=value");
        }
        const std::string path = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        const auto dot = path.find('.');
        // pulse.N.key has two dots; the section name is everything before the last.
        const auto last_dot = path.rfind('.');
        if (dot == std::string::npos) {
            throw ConfigError("override '" + item + "' is not of the form section.key=value");
        }
        std::string section = path.substr(0, last_dot);
        std::string key = path.substr(last_dot + 1);
        long pulse_index = 0;
        if (!is_pulse_section(section, pulse_index) && last_dot != dot) {
            section = path.substr(0, dot);
            key = path.substr(dot + 1);
        }
        if (section.empty() || key.empty()) {
            throw ConfigError("override '" + item + "' is not of the form section.key=value");
        }
        raw.set(section, key, value);
    }
}

Scenario scenario_from_raw(RawConfig raw) {
    Scenario scenario;
    scenario.raw = std::move(raw);
    scenario.species = rubidium85();

    std::vector<std::pair<long, const std::pair<std::string, KeyValues>*>> pulse_sections;
    for (const auto& section : scenario.raw.sections) {
        long pulse_index = 0;
        if (is_pulse_section(section.first, pulse_index)) {
            pulse_sections.emplace_back(pulse_index, &section);
            continue;
        }
        SectionView view(section.first, section.second);
        if (section.first == "species") {
            scenario.species = parse_species(view);
        } else if (section.first == "trap") {
            scenario.trap = parse_trap(view);
        } else if (section.first == "beam") {
            scenario.beam = parse_beam(view);
        } else if (section.first == "lens_array") {
            scenario.lens_array = parse_lens_array(view);
        } else if (section.first == "relay") {
            scenario.relay = parse_relay(view);
        } else if (section.first == "array") {
            scenario.array = parse_array(view);
        } else if (section.first == "vcsel") {
            scenario.vcsel = parse_vcsel(view);
        } else if (section.first == "addressing") {
            scenario.addressing = parse_pulse(view);
        } else if (section.first == "schedule") {
            scenario.schedule = parse_schedule(view);
        } else if (section.first == "montecarlo") {
            scenario.montecarlo = parse_montecarlo(view);
        } else if (section.first == "readout") {
            scenario.readout = parse_readout(view);
        } else if (section.first == "output") {
            scenario.output = parse_output(view);
        } else {
            throw ConfigError("unknown config section [" + section.first + "]");
        }
        view.finish();
    }

    std::stable_sort(pulse_sections.begin(), pulse_sections.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [index, section] : pulse_sections) {
        (void)index;
        SectionView view(section->first, section->second);
        scenario.pulses.push_back(parse_pulse(view));
        view.finish();
    }
    return scenario;
}

}  // namespace

KeyValues* RawConfig::find(const std::string& section) {
    for (auto& entry : sections) {
        if (entry.first == section) return &entry.second;
    }
    return nullptr;
}

const KeyValues* RawConfig::find(const std::string& section) const {
    for (const auto& entry : sections) {
        if (entry.first == section) return &entry.second;
    }
    return nullptr;
}

void RawConfig::set(const std::string& section, const std::string& key,
                    const std::string& value) {
    KeyValues* entries = find(section);
    if (!entries) {
        sections.emplace_back(section, KeyValues{});
        entries = &sections.back().second;
    }
    for (auto& entry : *entries) {
        if (entry.first == key) {
            entry.second = value;
            return;
        }
    }
    entries->emplace_back(key, value);
}

Scenario parse_scenario_text(const std::string& text,
                             const std::vector<std::string>& overrides) {
    RawConfig raw = parse_raw(text);
    apply_overrides(raw, overrides);
    return scenario_from_raw(std::move(raw));
}

Scenario parse_scenario_file(const std::string& path,
                             const std::vector<std::string>& overrides) {
    std::ifstream stream(path);
    if (!stream) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream content;
    content << stream.rdbuf();
    return parse_scenario_text(content.str(), overrides);
}

std::string to_config_text(const Scenario& scenario) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [section, entries] : scenario.raw.sections) {
        if (!first) out << "\n";
        first = false;
        out << "[" << section << "]\n";
        for (const auto& [key, value] : entries) {
            out << key << " = " << value << "\n";
        }
    }
    return out.str();
}

nlohmann::json config_json(const Scenario& scenario) {
    nlohmann::json echo = nlohmann::json::object();
    for (const auto& [section, entries] : scenario.raw.sections) {
        nlohmann::json block = nlohmann::json::object();
        for (const auto& [key, value] : entries) block[key] = value;
        echo[section] = block;
    }
    return echo;
}

Scenario scenario_from_config_json(const nlohmann::json& echo) {
    if (!echo.is_object()) throw ConfigError("config echo must be a JSON object");
    RawConfig raw;
    for (const auto& [section, block] : echo.items()) {
        if (!block.is_object()) {
            throw ConfigError("config echo section [" + section + "] must be an object");
        }
        raw.sections.emplace_back(section, KeyValues{});
        KeyValues& entries = raw.sections.back().second;
        for (const auto& [key, value] : block.items()) {
            if (!value.is_string()) {
                throw ConfigError("config echo key '" + section + "." + key +
                                  "' must be a string");
            }
            entries.emplace_back(key, value.get<std::string>());
        }
    }
    return scenario_from_raw(std::move(raw));
}

}  // namespace microtrap
