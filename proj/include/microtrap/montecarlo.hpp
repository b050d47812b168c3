#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "microtrap/species.hpp"
#include "microtrap/trapfield.hpp"
#include "microtrap/vec3.hpp"

namespace microtrap {

// Loading-and-loss simulation setup. The source is a MOT-like thermal
// cloud: Gaussian positions (cloud_radius is the per-axis rms, centered on
// the trap) and Maxwell-Boltzmann velocities at cloud_temperature.
struct McScenario {
    std::uint64_t seed = 0;
    int atom_count = 1;
    double cloud_temperature = 0.0;    // K
    double cloud_radius = 0.0;         // m
    double background_loss_rate = 0.0; // 1/s
    bool include_recoil_heating = false;
    double duration = 0.0;             // s
    std::vector<double> sample_times;  // s, increasing, within [0, duration]
    double time_step = 1e-3;           // s, heating-model step
};

void validate(const McScenario& scenario);

// State of one atom that made it into the trap.
struct LoadedAtom {
    int index = 0;    // source index; keys the atom's random substream
    Vec3 position{};  // m, relative to the site center
    Vec3 velocity{};  // m/s
    double energy = 0.0;  // J, kinetic + potential (negative = bound)
};

struct LoadResult {
    std::vector<LoadedAtom> atoms;
    double loaded_fraction = 0.0;
};

// Samples atom_count atoms from the cloud; an atom is loaded iff its total
// energy kinetic + U(position) is negative. Deterministic given the seed;
// each atom's draws come from a substream keyed by (seed, atom index), so
// results do not depend on evaluation order. Throws for untrapped sites.
LoadResult load(const McScenario& scenario, const TrapSite& site, const AtomSpecies& species);

// Trajectory statistics. fitted_lifetime/stderr are NaN (fit_valid false)
// when the survival series does not support an exponential fit.
struct McResult {
    double loaded_fraction = 0.0;
    std::vector<std::pair<double, long>> survival_counts;   // (time s, atoms alive)
    std::vector<std::pair<double, double>> mean_energy;     // (time s, J over survivors)
    double fitted_lifetime = 0.0;         // s
    double fitted_lifetime_stderr = 0.0;  // s
    bool fit_valid = false;
    std::string rng_algorithm;
    std::uint64_t seed = 0;
};

// Energy-jump loss model: background collisions remove atoms as a Poisson
// process at background_loss_rate; with recoil heating on, each time step
// adds 2*E_recoil per scattering event (event count Poisson at the site's
// scattering rate) and an atom is lost once its energy exceeds zero.
McResult evolve(const LoadResult& loaded, const TrapSite& site, const AtomSpecies& species,
                const McScenario& scenario);

// Weighted least squares of log counts against time (weights = counts,
// i.e. inverse Poisson variance of log N). Points with nonpositive counts
// are dropped; at least 3 positive points are required and all-equal or
// non-decaying series are rejected. Returns (lifetime, stderr).
std::pair<double, double> fit_exponential(const std::vector<std::pair<double, long>>& survival_counts);

// Substream derivation used for the per-atom generators (splitmix64 mix of
// seed, stream id, and atom index); exposed for reproducibility tests.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

inline constexpr const char* rng_algorithm_name = "mt19937_64/splitmix64-substreams";

}  // namespace microtrap
