#include "microtrap/serialize.hpp"

#include <cstdio>

#include "microtrap/constants.hpp"

namespace microtrap {

namespace {

const char* source_name(ArraySource source) {
    switch (source) {
        case ArraySource::single_beam: return "single-beam";
        case ArraySource::dual_beam: return "dual-beam";
        case ArraySource::vcsel_array: return "vcsel-array";
    }
    return "unknown";
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

nlohmann::json to_json(const TrapSite& site) {
    nlohmann::json j;
    j["position_m"] = {site.position.x, site.position.y, site.position.z};
    j["depth_J"] = site.depth;
    j["depth_over_kB_mK"] = site.depth / constants::boltzmann * 1e3;
    j["waist_m"] = site.waist;
    j["wavelength_m"] = site.wavelength;
    j["radial_frequency_rad_s"] = site.radial_frequency;
    j["axial_frequency_rad_s"] = site.axial_frequency;
    j["scattering_rate_per_s"] = site.scattering_rate;
    j["ground_state_extent_m"] = site.ground_state_extent;
    j["lamb_dicke"] = site.lamb_dicke;
    j["source_power_W"] = site.source_power;
    j["detuning_rad_s"] = site.detuning;
    j["trapped"] = site.trapped;
    j["sideband_coolable"] = site.sideband_coolable;
    return j;
}

nlohmann::json to_json(const TrapArray& array) {
    nlohmann::json j;
    j["pitch_m"] = array.pitch;
    j["rows"] = array.rows;
    j["cols"] = array.cols;
    j["geometry"] = array.geometry == ArrayGeometry::one_dimensional ? "1D" : "2D";
    j["source"] = source_name(array.source);
    j["offset_m"] = array.offset;
    j["species"] = array.species_name;
    j["detuning_rad_s"] = array.detuning;
    j["trapped_sites"] = trapped_site_count(array);
    nlohmann::json sites = nlohmann::json::array();
    for (const TrapSite& site : array.sites) sites.push_back(to_json(site));
    j["sites"] = std::move(sites);
    return j;
}

nlohmann::json to_json(const QubitRegister& reg) {
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        j.push_back({{"site", i},
                     {"u", reg.states[i].bloch.x},
                     {"v", reg.states[i].bloch.y},
                     {"w", reg.states[i].bloch.z},
                     {"coherence_time_s", reg.coherence_time[i]}});
    }
    return j;
}

nlohmann::json to_json(const McResult& result) {
    nlohmann::json j;
    j["loaded_fraction"] = result.loaded_fraction;
    j["fitted_lifetime_s"] = result.fitted_lifetime;
    j["fitted_lifetime_stderr_s"] = result.fitted_lifetime_stderr;
    j["fit_valid"] = result.fit_valid;
    j["rng_algorithm"] = result.rng_algorithm;
    j["seed"] = result.seed;
    nlohmann::json survival = nlohmann::json::array();
    for (const auto& [t, n] : result.survival_counts) survival.push_back({t, n});
    j["survival"] = std::move(survival);
    nlohmann::json energy = nlohmann::json::array();
    for (const auto& [t, e] : result.mean_energy) energy.push_back({t, e});
    j["mean_energy_J"] = std::move(energy);
    return j;
}

nlohmann::json to_json(const ScheduleResult& result) {
    nlohmann::json j;
    j["window_found"] = result.window_found;
    j["window_start_s"] = result.window_start;
    j["window_end_s"] = result.window_end;
    j["window_duration_s"] = result.window_found ? result.window_end - result.window_start : 0.0;
    j["window_long_enough"] = result.window_long_enough;
    j["min_separation_m"] = result.min_separation;
    j["interference_warning"] = result.interference_warning;
    j["mechanism"] = "dual-beam-angle";
    nlohmann::json frames = nlohmann::json::array();
    for (const ScheduleFrame& frame : result.frames)
        frames.push_back({{"time_s", frame.time}, {"offset_m", frame.array.offset}});
    j["frames"] = std::move(frames);
    return j;
}

std::string power_map_csv(const MicrolensArray& array, const std::vector<double>& shares) {
    std::string csv = "site_row,site_col,x_m,y_m,power_W\n";
    for (int row = 0; row < array.rows; ++row) {
        for (int col = 0; col < array.cols; ++col) {
            const Vec3 center = lenslet_center(array, row, col);
            csv += std::to_string(row) + ',' + std::to_string(col) + ',' +
                   format_double(center.x) + ',' + format_double(center.y) + ',' +
                   format_double(shares[site_index(array, row, col)]) + '\n';
        }
    }
    return csv;
}

std::string trap_array_csv(const TrapArray& array) {
    std::string csv =
        "site,site_row,site_col,x_m,y_m,power_W,depth_over_kB_mK,radial_frequency_rad_s,"
        "axial_frequency_rad_s,scattering_rate_per_s,trapped\n";
    const int lattice_sites = array.rows * array.cols;
    for (std::size_t i = 0; i < array.sites.size(); ++i) {
        const TrapSite& site = array.sites[i];
        const int lattice_index = static_cast<int>(i) % lattice_sites;
        csv += std::to_string(i) + ',' + std::to_string(lattice_index / array.cols) + ',' +
               std::to_string(lattice_index % array.cols) + ',' + format_double(site.position.x) +
               ',' + format_double(site.position.y) + ',' + format_double(site.source_power) +
               ',' + format_double(site.depth / constants::boltzmann * 1e3) + ',' +
               format_double(site.radial_frequency) + ',' + format_double(site.axial_frequency) +
               ',' + format_double(site.scattering_rate) + ',' + (site.trapped ? "1" : "0") + '\n';
    }
    return csv;
}

std::string survival_csv(const McResult& result) {
    std::string csv = "time_s,count\n";
    for (const auto& [t, n] : result.survival_counts)
        csv += format_double(t) + ',' + std::to_string(n) + '\n';
    return csv;
}

}  // namespace microtrap
