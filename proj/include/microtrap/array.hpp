#pragma once

#include <cstdint>
#include <vector>

#include "microtrap/optics.hpp"
#include "microtrap/species.hpp"
#include "microtrap/trapfield.hpp"

namespace microtrap {

enum class ArrayGeometry { one_dimensional, two_dimensional };
enum class ArraySource { single_beam, dual_beam, vcsel_array };

// A lattice of characterized trap sites. Sites are stored row-major; for a
// dual-beam array the first rows*cols sites belong to the reference lattice
// and the next rows*cols to the lattice displaced by `offset` along +x.
// `detuning` is the array's base detuning; VCSEL wavelength offsets perturb
// individual sites around it.
struct TrapArray {
    std::vector<TrapSite> sites;
    double pitch = 0.0;  // m
    ArrayGeometry geometry = ArrayGeometry::two_dimensional;
    ArraySource source = ArraySource::single_beam;
    double offset = 0.0;  // m, dual-beam lattice separation
    int rows = 1;
    int cols = 1;
    std::string species_name;
    double detuning = 0.0;  // rad/s
};

int trapped_site_count(const TrapArray& array);

// Per-site source control for a VCSEL-backed array (Fig-6-style operation):
// each lenslet is fed by its own laser, so power, on/off state, and a small
// wavelength offset are set per site. Vectors are indexed by flat site
// index and must cover the lattice exactly.
struct VcselConfig {
    std::vector<double> per_site_power;        // W
    std::vector<std::uint8_t> per_site_enabled;
    std::vector<double> wavelength_offsets;    // m
};

// Time/angle waypoints for the dual-beam spacing control plus the gate
// window target: the two lattices must stay within hold_separation for at
// least hold_duration. Angles interpolate linearly between samples.
struct SpacingSchedule {
    std::vector<std::pair<double, double>> samples;  // (time s, angle rad)
    double hold_separation = 0.0;  // m
    double hold_duration = 0.0;    // s
};

void validate(const SpacingSchedule& schedule);

// One trap per illuminated lenslet; per-site power from lenslet_power_share,
// per-site waist from the Airy-to-Gaussian fit of the lenslet NA. Sites
// whose |depth| falls below min_depth are marked untrapped.
TrapArray build_array(const MicrolensArray& array_optics, const GaussianBeam& beam,
                      const AtomSpecies& species, double detuning, double min_depth = 0.0,
                      int quad_order = 32);

// Same physics with uniform illumination of the whole array at the given
// intensity (the flat-field limit).
TrapArray build_array_uniform(const MicrolensArray& array_optics, double intensity,
                              const AtomSpecies& species, double detuning,
                              double min_depth = 0.0);

// Two identical beams at a small mutual angle produce two interleaved
// lattices separated by f*tan(angle). Each beam carries `beam`'s power.
TrapArray build_dual_beam_array(const MicrolensArray& array_optics, const GaussianBeam& beam,
                                const AtomSpecies& species, double detuning, double beam_angle,
                                double min_depth = 0.0, int quad_order = 32);

// Per-site powers and wavelength offsets from the VCSEL config; disabled
// sites are untrapped. Throws on a config/lattice size mismatch.
TrapArray build_vcsel_array(const MicrolensArray& array_optics, const VcselConfig& config,
                            const AtomSpecies& species, double detuning, double min_depth = 0.0);

struct ScheduleFrame {
    double time = 0.0;
    TrapArray array;
};

struct ScheduleResult {
    std::vector<ScheduleFrame> frames;  // one per schedule sample
    bool window_found = false;
    double window_start = 0.0;  // s
    double window_end = 0.0;    // s
    bool window_long_enough = false;  // window duration >= hold_duration
    double min_separation = 0.0;      // m, over the whole schedule
    // The independent-foci model breaks down once the lattices approach to
    // within a few spot sizes; flag schedules that enter that regime.
    bool interference_warning = false;
};

inline constexpr double interference_warning_separation = 3e-6;  // m

// Evaluates the dual-beam separation f*tan(angle(t)) over the schedule and
// reports the first contiguous interval with separation <= hold_separation.
// Requires a dual-beam base array; a schedule that never reaches the hold
// separation yields window_found = false.
ScheduleResult apply_spacing_schedule(const TrapArray& base, const SpacingSchedule& schedule,
                                      const MicrolensArray& array_optics);

}  // namespace microtrap
