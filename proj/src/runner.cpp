#include "microtrap/runner.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "microtrap/constants.hpp"
#include "microtrap/serialize.hpp"

namespace microtrap {

namespace {

template <typename T>
const T& need(const std::optional<T>& section, const char* section_name,
              const char* subcommand) {
    if (!section) {
        throw ConfigError(std::string("subcommand '") + subcommand +
                          "' requires config section [" + section_name + "]");
    }
    return *section;
}

std::string fmt(const char* format, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), format, value);
    return buffer;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::string output_path(const Scenario& scenario, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(scenario.output.directory, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + scenario.output.directory +
                      "': " + ec.message());
    }
    return (std::filesystem::path(scenario.output.directory) / name).string();
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

GaussianBeam illumination_beam(const BeamSettings& settings, const AtomSpecies& species,
                               double detuning) {
    GaussianBeam beam;
    beam.power = settings.power;
    beam.waist = settings.waist;
    beam.wavelength = wavelength_at_detuning(species, detuning);
    beam.focus_position = Vec3{settings.center_x, settings.center_y, 0.0};
    beam.axis = Vec3{0.0, 0.0, 1.0};
    return beam;
}

VcselConfig vcsel_config(const VcselSettings& settings, const MicrolensArray& optics,
                         const AtomSpecies& species) {
    const int n = site_count(optics);
    VcselConfig config;
    config.per_site_power.assign(static_cast<std::size_t>(n), settings.default_power);
    config.per_site_enabled.assign(static_cast<std::size_t>(n), 1);
    auto check_index = [n](int site, const std::string& key) {
        if (site < 0 || site >= n) {
            throw ConfigError("config key 'vcsel." + key + "': site " + std::to_string(site) +
                              " is outside the lattice (0.." + std::to_string(n - 1) + ")");
        }
    };
    for (const auto& [site, power] : settings.power_overrides) {
        check_index(site, "power_" + std::to_string(site) + "_mW");
        config.per_site_power[static_cast<std::size_t>(site)] = power;
    }
    for (int site : settings.disabled_sites) {
        check_index(site, "disabled_sites");
        config.per_site_enabled[static_cast<std::size_t>(site)] = 0;
    }
    if (!settings.wavelength_offsets.empty()) {
        config.wavelength_offsets.assign(static_cast<std::size_t>(n), 0.0);
        const double max_offset = species.transition_wavelength / 10.0;
        for (const auto& [site, offset] : settings.wavelength_offsets) {
            const std::string key = "wavelength_offset_" + std::to_string(site) + "_nm";
            check_index(site, key);
            if (std::abs(offset) >= max_offset) {
                throw ConfigError("config key 'vcsel." + key +
                                  "': offset is outside the detuning-conversion range");
            }
            config.wavelength_offsets[static_cast<std::size_t>(site)] = offset;
        }
    }
    return config;
}

// Re-characterizes every site of an array behind a 4f relay: transverse
// positions invert and scale by M, axial offsets scale by M^2, spot sizes
// scale by |M|; per-site powers are unchanged.
TrapArray relayed_array(const TrapArray& base, const RelayTelescope& relay,
                        const AtomSpecies& species, double min_depth) {
    validate(relay);
    const double scale = std::abs(magnification(relay));
    TrapArray imaged = base;
    imaged.pitch = base.pitch * scale;
    imaged.offset = base.offset * scale;
    std::vector<Vec3> points;
    points.reserve(base.sites.size());
    for (const TrapSite& site : base.sites) points.push_back(site.position);
    const std::vector<Vec3> mapped = relay_image(relay, points);
    for (std::size_t i = 0; i < base.sites.size(); ++i) {
        const TrapSite& site = base.sites[i];
        TrapSite moved =
            characterize_site(species, site.source_power, site.waist * scale, site.detuning,
                              mapped[i]);
        if (site.source_power == 0.0) moved.waist = site.waist * scale;
        if (moved.trapped && -moved.depth < min_depth) {
            moved.trapped = false;
            moved.sideband_coolable = false;
        }
        imaged.sites[i] = moved;
    }
    return imaged;
}

RunResult run_trap(const Scenario& scenario) {
    const TrapSettings& trap = need(scenario.trap, "trap", "trap");
    const double detuning =
        detuning_from_wavelength_offset(scenario.species, trap.wavelength_offset);
    const TrapSite site =
        characterize_site(scenario.species, trap.power, trap.waist, detuning, Vec3{});

    nlohmann::json j;
    j["site"] = to_json(site);
    j["config"] = config_json(scenario);
    RunResult result;
    const std::string path = output_path(scenario, "trap.json");
    write_file(path, dump(j));
    result.files_written.push_back(path);
    result.summary_lines.push_back(
        "trap: depth " + fmt("%.6g", site.depth / constants::boltzmann * 1e3) +
        " mK (kB), radial 2pi x " + fmt("%.6g", site.radial_frequency / constants::two_pi / 1e3) +
        " kHz, axial 2pi x " + fmt("%.6g", site.axial_frequency / constants::two_pi / 1e3) +
        " kHz, scattering " + fmt("%.6g", site.scattering_rate) + " /s");
    return result;
}

std::vector<double> site_powers(const TrapArray& array) {
    const std::size_t lattice = static_cast<std::size_t>(array.rows) *
                                static_cast<std::size_t>(array.cols);
    std::vector<double> powers;
    powers.reserve(lattice);
    for (std::size_t i = 0; i < lattice && i < array.sites.size(); ++i) {
        powers.push_back(array.sites[i].source_power);
    }
    return powers;
}

void summarize_array(const TrapArray& array, RunResult& result, const char* label) {
    double shallowest = 0.0;
    double deepest = 0.0;
    bool any = false;
    for (const TrapSite& site : array.sites) {
        if (!site.trapped) continue;
        if (!any || site.depth > shallowest) shallowest = site.depth;
        if (!any || site.depth < deepest) deepest = site.depth;
        any = true;
    }
    std::string line = std::string(label) + ": " + std::to_string(trapped_site_count(array)) +
                       " of " + std::to_string(array.sites.size()) + " sites trapped";
    if (any) {
        line += ", depth " + fmt("%.6g", deepest / constants::boltzmann * 1e3) + " to " +
                fmt("%.6g", shallowest / constants::boltzmann * 1e3) + " mK (kB)";
    }
    line += ", pitch " + fmt("%.6g", array.pitch * 1e6) + " um";
    result.summary_lines.push_back(line);
}

RunResult run_array(const Scenario& scenario) {
    const MicrolensArray& optics = need(scenario.lens_array, "lens_array", "array");
    const TrapArray array = build_scenario_array(scenario);

    nlohmann::json j;
    j["array"] = to_json(array);
    RunResult result;
    if (scenario.relay) {
        const TrapArray imaged = relayed_array(array, *scenario.relay, scenario.species,
                                               scenario.array->min_depth);
        j["imaged_array"] = to_json(imaged);
        const std::string imaged_csv = output_path(scenario, "array_imaged.csv");
        write_file(imaged_csv, trap_array_csv(imaged));
        result.files_written.push_back(imaged_csv);
        summarize_array(imaged, result, "array (imaged)");
    }
    j["config"] = config_json(scenario);

    const std::string json_path = output_path(scenario, "array.json");
    write_file(json_path, dump(j));
    result.files_written.insert(result.files_written.begin(), json_path);
    const std::string csv_path = output_path(scenario, "array.csv");
    write_file(csv_path, trap_array_csv(array));
    result.files_written.push_back(csv_path);
    const std::string power_path = output_path(scenario, "power_map.csv");
    write_file(power_path, power_map_csv(optics, site_powers(array)));
    result.files_written.push_back(power_path);
    summarize_array(array, result, "array");
    return result;
}

RunResult run_move(const Scenario& scenario) {
    const MicrolensArray& optics = need(scenario.lens_array, "lens_array", "move");
    const ArraySettings& settings = need(scenario.array, "array", "move");
    const BeamSettings& beam_settings = need(scenario.beam, "beam", "move");
    const SpacingSchedule& schedule = need(scenario.schedule, "schedule", "move");
    if (settings.source != SourceChoice::dual_beam) {
        throw ConfigError("subcommand 'move' requires array.source = dual");
    }
    const double detuning =
        detuning_from_wavelength_offset(scenario.species, settings.wavelength_offset);
    const GaussianBeam beam = illumination_beam(beam_settings, scenario.species, detuning);
    const TrapArray base =
        build_dual_beam_array(optics, beam, scenario.species, detuning,
                              schedule.samples.front().second, settings.min_depth,
                              settings.quad_order);
    const ScheduleResult moved = apply_spacing_schedule(base, schedule, optics);

    nlohmann::json j = to_json(moved);
    j["config"] = config_json(scenario);
    RunResult result;
    const std::string json_path = output_path(scenario, "move.json");
    write_file(json_path, dump(j));
    result.files_written.push_back(json_path);

    std::string csv = "time_s,separation_m\n";
    for (const ScheduleFrame& frame : moved.frames) {
        csv += format_double(frame.time) + "," + format_double(frame.array.offset) + "\n";
    }
    const std::string csv_path = output_path(scenario, "move.csv");
    write_file(csv_path, csv);
    result.files_written.push_back(csv_path);

    std::string line = "move: min separation " + fmt("%.6g", moved.min_separation * 1e6) + " um";
    if (moved.window_found) {
        line += ", hold window " + fmt("%.6g", moved.window_start * 1e3) + " to " +
                fmt("%.6g", moved.window_end * 1e3) + " ms" +
                (moved.window_long_enough ? " (long enough)" : " (too short)");
    } else {
        line += ", hold window not reached";
    }
    if (moved.interference_warning) line += "; separation enters the interference regime";
    result.summary_lines.push_back(line);
    return result;
}

void site_row_col(const TrapArray& array, std::size_t index, int& row, int& col) {
    const int lattice = array.rows * array.cols;
    const int base = lattice > 0 ? static_cast<int>(index) % lattice : 0;
    row = array.cols > 0 ? base / array.cols : 0;
    col = array.cols > 0 ? base % array.cols : 0;
}

RunResult run_address(const Scenario& scenario) {
    const RamanPulse& pulse = need(scenario.addressing, "addressing", "address");
    const TrapArray array = build_scenario_array(scenario);
    QubitRegister reg = make_register(array);
    const std::vector<double> ratios = crosstalk_map(array, pulse);
    const double stark = single_beam_stark_ratio(array, pulse);
    apply_pulse(reg, array, pulse);

    double worst = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (static_cast<int>(i) == pulse.target_site) continue;
        if (ratios[i] > worst) worst = ratios[i];
    }

    nlohmann::json j;
    j["target_site"] = pulse.target_site;
    j["effective_rabi_rad_s"] = effective_rabi(pulse);
    j["rotation_angle_rad"] = effective_rabi(pulse) * pulse.duration;
    j["max_offsite_crosstalk"] = worst;
    j["single_beam_stark_ratio"] = stark;
    j["crosstalk"] = ratios;
    j["register"] = to_json(reg);
    j["config"] = config_json(scenario);
    RunResult result;
    const std::string json_path = output_path(scenario, "address.json");
    write_file(json_path, dump(j));
    result.files_written.push_back(json_path);

    std::string csv = "site,site_row,site_col,crosstalk_ratio,u,v,w\n";
    for (std::size_t i = 0; i < array.sites.size(); ++i) {
        int row = 0;
        int col = 0;
        site_row_col(array, i, row, col);
        csv += std::to_string(i) + "," + std::to_string(row) + "," + std::to_string(col) + "," +
               format_double(ratios[i]) + "," + format_double(reg.states[i].bloch.x) + "," +
               format_double(reg.states[i].bloch.y) + "," + format_double(reg.states[i].bloch.z) +
               "\n";
    }
    const std::string csv_path = output_path(scenario, "address.csv");
    write_file(csv_path, csv);
    result.files_written.push_back(csv_path);

    result.summary_lines.push_back(
        "address: site " + std::to_string(pulse.target_site) + ", rotation " +
        fmt("%.6g", effective_rabi(pulse) * pulse.duration) + " rad, max off-site crosstalk " +
        fmt("%.3g", worst));
    return result;
}

RunResult run_readout(const Scenario& scenario) {
    const ReadoutSettings& settings = need(scenario.readout, "readout", "readout");
    const TrapArray array = build_scenario_array(scenario);
    QubitRegister reg = make_register(array);
    for (const RamanPulse& pulse : scenario.pulses) apply_pulse(reg, array, pulse);
    double na = settings.na;
    if (settings.use_lens_array_na) {
        na = numerical_aperture(need(scenario.lens_array, "lens_array", "readout"));
    }
    const double efficiency = collection_efficiency(na);

    nlohmann::json sites = nlohmann::json::array();
    std::string csv = "site,site_row,site_col,trapped,w,p_bright,expected_photons\n";
    double total = 0.0;
    for (std::size_t i = 0; i < array.sites.size(); ++i) {
        int row = 0;
        int col = 0;
        site_row_col(array, i, row, col);
        const double w = reg.states[i].bloch.z;
        const double p_bright = (1.0 + w) / 2.0;
        const double photons =
            readout(reg, array, static_cast<int>(i), na, settings.scatter_count);
        total += photons;
        sites.push_back({{"site", i},
                         {"site_row", row},
                         {"site_col", col},
                         {"trapped", array.sites[i].trapped},
                         {"w", w},
                         {"p_bright", p_bright},
                         {"expected_photons", photons}});
        csv += std::to_string(i) + "," + std::to_string(row) + "," + std::to_string(col) + "," +
               (array.sites[i].trapped ? "1" : "0") + "," + format_double(w) + "," +
               format_double(p_bright) + "," + format_double(photons) + "\n";
    }

    nlohmann::json j;
    j["na"] = na;
    j["collection_efficiency"] = efficiency;
    j["scatter_count"] = settings.scatter_count;
    j["sites"] = std::move(sites);
    j["register"] = to_json(reg);
    j["config"] = config_json(scenario);
    RunResult result;
    const std::string json_path = output_path(scenario, "readout.json");
    write_file(json_path, dump(j));
    result.files_written.push_back(json_path);
    const std::string csv_path = output_path(scenario, "readout.csv");
    write_file(csv_path, csv);
    result.files_written.push_back(csv_path);
    result.summary_lines.push_back(
        "readout: NA " + fmt("%.4g", na) + ", efficiency " + fmt("%.4g", efficiency) +
        ", total expected photons " + fmt("%.6g", total));
    return result;
}

RunResult run_mc(const Scenario& scenario) {
    const TrapSettings& trap = need(scenario.trap, "trap", "mc");
    const McScenario& mc = need(scenario.montecarlo, "montecarlo", "mc");
    const double detuning =
        detuning_from_wavelength_offset(scenario.species, trap.wavelength_offset);
    const TrapSite site =
        characterize_site(scenario.species, trap.power, trap.waist, detuning, Vec3{});
    const LoadResult loaded = load(mc, site, scenario.species);
    const McResult evolved = evolve(loaded, site, scenario.species, mc);

    nlohmann::json j;
    j["site"] = to_json(site);
    j["result"] = to_json(evolved);
    j["config"] = config_json(scenario);
    RunResult result;
    const std::string json_path = output_path(scenario, "mc.json");
    write_file(json_path, dump(j));
    result.files_written.push_back(json_path);
    const std::string csv_path = output_path(scenario, "survival.csv");
    write_file(csv_path, survival_csv(evolved));
    result.files_written.push_back(csv_path);

    std::string line = "mc: loaded fraction " + fmt("%.4g", evolved.loaded_fraction) + " (" +
                       std::to_string(loaded.atoms.size()) + " of " +
                       std::to_string(mc.atom_count) + ")";
    if (evolved.fit_valid) {
        line += ", lifetime " + fmt("%.6g", evolved.fitted_lifetime * 1e3) + " +/- " +
                fmt("%.3g", evolved.fitted_lifetime_stderr * 1e3) + " ms";
    } else {
        line += ", lifetime fit not possible";
    }
    result.summary_lines.push_back(line);
    return result;
}

}  // namespace

TrapArray build_scenario_array(const Scenario& scenario) {
    const MicrolensArray& optics = need(scenario.lens_array, "lens_array", "array");
    const ArraySettings& settings = need(scenario.array, "array", "array");
    const double detuning =
        detuning_from_wavelength_offset(scenario.species, settings.wavelength_offset);

    if (settings.source == SourceChoice::vcsel) {
        const VcselSettings& vcsel = need(scenario.vcsel, "vcsel", "array");
        return build_vcsel_array(optics, vcsel_config(vcsel, optics, scenario.species),
                                 scenario.species, detuning, settings.min_depth);
    }

    const BeamSettings& beam_settings = need(scenario.beam, "beam", "array");
    if (settings.illumination == Illumination::uniform) {
        if (settings.source == SourceChoice::dual_beam) {
            throw ConfigError("array.illumination = uniform supports only array.source = single");
        }
        const double footprint = static_cast<double>(optics.rows) * optics.pitch *
                                 static_cast<double>(optics.cols) * optics.pitch;
        const double intensity = beam_settings.power / footprint;
        return build_array_uniform(optics, intensity, scenario.species, detuning,
                                   settings.min_depth);
    }

    const GaussianBeam beam = illumination_beam(beam_settings, scenario.species, detuning);
    if (settings.source == SourceChoice::dual_beam) {
        return build_dual_beam_array(optics, beam, scenario.species, detuning,
                                     settings.dual_angle, settings.min_depth,
                                     settings.quad_order);
    }
    return build_array(optics, beam, scenario.species, detuning, settings.min_depth,
                       settings.quad_order);
}

RunResult run_subcommand(const std::string& subcommand, const Scenario& scenario) {
    if (subcommand == "trap") return run_trap(scenario);
    if (subcommand == "array") return run_array(scenario);
    if (subcommand == "move") return run_move(scenario);
    if (subcommand == "address") return run_address(scenario);
    if (subcommand == "readout") return run_readout(scenario);
    if (subcommand == "mc") return run_mc(scenario);
    throw ConfigError("unknown subcommand '" + subcommand + "'");
}

RunResult run_fit(const std::string& input_csv_path, const std::string& out_dir) {
    std::ifstream in(input_csv_path);
    if (!in) throw IoError("cannot read decay curve '" + input_csv_path + "'");
    std::vector<std::pair<double, long>> points;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::string text = line;
        const auto comment = text.find('#');
        if (comment != std::string::npos) text = text.substr(0, comment);
        bool blank = true;
        for (char c : text) {
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        }
        if (blank) continue;
        const auto comma = text.find(',');
        if (comma == std::string::npos) {
            throw ConfigError("decay curve line " + std::to_string(line_number) +
                              ": expected time_s,count");
        }
        char* end = nullptr;
        const std::string time_text = text.substr(0, comma);
        const double time = std::strtod(time_text.c_str(), &end);
        if (end == time_text.c_str()) {
            if (line_number == 1) continue;  // header row
            throw ConfigError("decay curve line " + std::to_string(line_number) +
                              ": expected a number, got '" + time_text + "'");
        }
        const std::string count_text = text.substr(comma + 1);
        const long count = std::strtol(count_text.c_str(), &end, 10);
        if (end == count_text.c_str()) {
            throw ConfigError("decay curve line " + std::to_string(line_number) +
                              ": expected a count, got '" + count_text + "'");
        }
        points.emplace_back(time, count);
    }

    const auto [lifetime, stderr_lifetime] = fit_exponential(points);
    long positive = 0;
    for (const auto& [time, count] : points) {
        (void)time;
        if (count > 0) ++positive;
    }

    nlohmann::json j;
    j["input"] = input_csv_path;
    j["points_total"] = points.size();
    j["points_used"] = positive;
    j["fitted_lifetime_s"] = lifetime;
    j["fitted_lifetime_stderr_s"] = stderr_lifetime;
    RunResult result;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
    const std::string json_path = (std::filesystem::path(out_dir) / "fit.json").string();
    write_file(json_path, dump(j));
    result.files_written.push_back(json_path);
    result.summary_lines.push_back("fit: lifetime " + fmt("%.6g", lifetime * 1e3) + " +/- " +
                                   fmt("%.3g", stderr_lifetime * 1e3) + " ms from " +
                                   std::to_string(positive) + " points");
    return result;
}

}  // namespace microtrap
