#include "microtrap/array.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace microtrap {

namespace {

ArrayGeometry geometry_of(const MicrolensArray& optics) {
    return (optics.rows == 1 || optics.cols == 1) ? ArrayGeometry::one_dimensional
                                                  : ArrayGeometry::two_dimensional;
}

void apply_depth_floor(TrapSite& site, double min_depth) {
    if (site.trapped && -site.depth < min_depth) {
        site.trapped = false;
        site.sideband_coolable = false;
    }
}

double site_waist_from_optics(const MicrolensArray& optics, const AtomSpecies& species,
                              double detuning) {
    const double na = numerical_aperture(optics);
    const double lambda = wavelength_at_detuning(species, detuning);
    return gaussian_waist_from_airy_radius(focal_spot_radius(lambda, na));
}

TrapArray array_from_powers(const MicrolensArray& optics, const std::vector<double>& powers,
                            const AtomSpecies& species, double detuning, double min_depth) {
    const double waist = site_waist_from_optics(optics, species, detuning);
    TrapArray result;
    result.pitch = optics.pitch;
    result.geometry = geometry_of(optics);
    result.rows = optics.rows;
    result.cols = optics.cols;
    result.species_name = species.name;
    result.detuning = detuning;
    result.sites.reserve(site_count(optics));
    for (int row = 0; row < optics.rows; ++row) {
        for (int col = 0; col < optics.cols; ++col) {
            Vec3 pos = lenslet_center(optics, row, col);
            pos.z = optics.focal_length;
            TrapSite site = characterize_site(species, powers[site_index(optics, row, col)],
                                              waist, detuning, pos);
            apply_depth_floor(site, min_depth);
            result.sites.push_back(site);
        }
    }
    return result;
}

}  // namespace

int trapped_site_count(const TrapArray& array) {
    return static_cast<int>(
        std::count_if(array.sites.begin(), array.sites.end(),
                      [](const TrapSite& s) { return s.trapped; }));
}

TrapArray build_array(const MicrolensArray& array_optics, const GaussianBeam& beam,
                      const AtomSpecies& species, double detuning, double min_depth,
                      int quad_order) {
    const std::vector<double> powers = lenslet_power_share(array_optics, beam, quad_order);
    return array_from_powers(array_optics, powers, species, detuning, min_depth);
}

TrapArray build_array_uniform(const MicrolensArray& array_optics, double intensity,
                              const AtomSpecies& species, double detuning, double min_depth) {
    const double share = uniform_power_share_per_site(array_optics, intensity);
    const std::vector<double> powers(site_count(array_optics), share);
    return array_from_powers(array_optics, powers, species, detuning, min_depth);
}

TrapArray build_dual_beam_array(const MicrolensArray& array_optics, const GaussianBeam& beam,
                                const AtomSpecies& species, double detuning, double beam_angle,
                                double min_depth, int quad_order) {
    const double offset = dual_beam_site_offset(array_optics, beam_angle);
    TrapArray result = build_array(array_optics, beam, species, detuning, min_depth, quad_order);
    result.source = ArraySource::dual_beam;
    result.offset = offset;
    // Second lattice: same per-lenslet powers (the beams are copies), foci
    // displaced laterally by the offset.
    const std::size_t n = result.sites.size();
    result.sites.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        TrapSite shifted = result.sites[i];
        shifted.position.x += offset;
        result.sites.push_back(shifted);
    }
    return result;
}

TrapArray build_vcsel_array(const MicrolensArray& array_optics, const VcselConfig& config,
                            const AtomSpecies& species, double detuning, double min_depth) {
    validate(array_optics);
    const std::size_t n = static_cast<std::size_t>(site_count(array_optics));
    if (config.per_site_power.size() != n || config.per_site_enabled.size() != n)
        throw std::invalid_argument("VCSEL config does not cover the lattice");
    if (!config.wavelength_offsets.empty() && config.wavelength_offsets.size() != n)
        throw std::invalid_argument("VCSEL wavelength offsets do not cover the lattice");
    for (double p : config.per_site_power)
        if (!(p >= 0.0)) throw std::invalid_argument("VCSEL per-site power must be >= 0");

    TrapArray result;
    result.pitch = array_optics.pitch;
    result.geometry = geometry_of(array_optics);
    result.source = ArraySource::vcsel_array;
    result.rows = array_optics.rows;
    result.cols = array_optics.cols;
    result.species_name = species.name;
    result.detuning = detuning;
    result.sites.reserve(n);
    for (int row = 0; row < array_optics.rows; ++row) {
        for (int col = 0; col < array_optics.cols; ++col) {
            const int idx = site_index(array_optics, row, col);
            const double power =
                config.per_site_enabled[idx] ? config.per_site_power[idx] : 0.0;
            double site_detuning = detuning;
            if (!config.wavelength_offsets.empty() && config.wavelength_offsets[idx] != 0.0)
                site_detuning +=
                    detuning_from_wavelength_offset(species, config.wavelength_offsets[idx]);
            const double waist = site_waist_from_optics(array_optics, species, site_detuning);
            Vec3 pos = lenslet_center(array_optics, row, col);
            pos.z = array_optics.focal_length;
            TrapSite site = characterize_site(species, power, waist, site_detuning, pos);
            apply_depth_floor(site, min_depth);
            result.sites.push_back(site);
        }
    }
    return result;
}

void validate(const SpacingSchedule& schedule) {
    if (schedule.samples.empty()) throw std::invalid_argument("schedule has no samples");
    for (std::size_t i = 0; i < schedule.samples.size(); ++i) {
        if (std::abs(schedule.samples[i].second) > 0.2)
            throw std::invalid_argument("schedule angle exceeds paraxial limit of 0.2 rad");
        if (i > 0 && !(schedule.samples[i].first > schedule.samples[i - 1].first))
            throw std::invalid_argument("schedule times must be strictly increasing");
    }
    if (!(schedule.hold_separation >= 0.0))
        throw std::invalid_argument("hold_separation must be >= 0");
    if (!(schedule.hold_duration >= 0.0))
        throw std::invalid_argument("hold_duration must be >= 0");
}

ScheduleResult apply_spacing_schedule(const TrapArray& base, const SpacingSchedule& schedule,
                                      const MicrolensArray& array_optics) {
    validate(schedule);
    validate(array_optics);
    if (base.source != ArraySource::dual_beam)
        throw std::domain_error("spacing schedules require a dual-beam array");

    const double f = array_optics.focal_length;
    const auto& samples = schedule.samples;
    const std::size_t lattice_sites = base.sites.size() / 2;

    ScheduleResult result;
    result.frames.reserve(samples.size());
    for (const auto& [time, angle] : samples) {
        const double offset = f * std::tan(angle);
        ScheduleFrame frame;
        frame.time = time;
        frame.array = base;
        frame.array.offset = offset;
        for (std::size_t i = lattice_sites; i < base.sites.size(); ++i)
            frame.array.sites[i].position.x += offset - base.offset;
        result.frames.push_back(std::move(frame));
    }

    // Separation f*|tan(angle(t))| <= hold_separation iff |angle(t)| <= alpha.
    const double alpha = std::atan(schedule.hold_separation / f);

    double min_abs_angle = std::abs(samples.front().second);
    std::vector<std::pair<double, double>> inside;  // closed intervals
    auto add_interval = [&inside](double lo, double hi) {
        if (!inside.empty() && lo <= inside.back().second) {
            inside.back().second = std::max(inside.back().second, hi);
        } else {
            inside.emplace_back(lo, hi);
        }
    };
    if (std::abs(samples.front().second) <= alpha)
        add_interval(samples.front().first, samples.front().first);

    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const auto [t0, a0] = samples[i];
        const auto [t1, a1] = samples[i + 1];
        if (a0 == a1) {
            min_abs_angle = std::min(min_abs_angle, std::abs(a0));
            if (std::abs(a0) <= alpha) add_interval(t0, t1);
            continue;
        }
        const double slope = (a1 - a0) / (t1 - t0);
        if ((a0 < 0.0) != (a1 < 0.0) || a0 == 0.0 || a1 == 0.0)
            min_abs_angle = 0.0;
        else
            min_abs_angle = std::min({min_abs_angle, std::abs(a0), std::abs(a1)});
        // {t : -alpha <= a0 + slope (t - t0) <= alpha} is one interval.
        double enter = t0 + (-alpha - a0) / slope;
        double exit = t0 + (alpha - a0) / slope;
        if (enter > exit) std::swap(enter, exit);
        enter = std::max(enter, t0);
        exit = std::min(exit, t1);
        if (enter <= exit) add_interval(enter, exit);
    }

    result.min_separation = f * std::tan(min_abs_angle);
    result.interference_warning = result.min_separation < interference_warning_separation;
    if (!inside.empty()) {
        result.window_found = true;
        result.window_start = inside.front().first;
        result.window_end = inside.front().second;
        result.window_long_enough =
            result.window_end - result.window_start >= schedule.hold_duration;
    }
    return result;
}

}  // namespace microtrap
