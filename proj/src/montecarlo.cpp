#include "microtrap/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "microtrap/constants.hpp"

namespace microtrap {

namespace {

constexpr std::uint64_t load_stream = 0;
constexpr std::uint64_t evolve_stream = 1;

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(seed ^ (stream * 0xA24BAED4963EE407ULL)) ^ index);
}

void validate(const McScenario& scenario) {
    if (scenario.atom_count < 1) throw std::invalid_argument("atom_count must be >= 1");
    if (!(scenario.cloud_temperature > 0.0))
        throw std::invalid_argument("cloud_temperature must be > 0");
    if (!(scenario.cloud_radius > 0.0)) throw std::invalid_argument("cloud_radius must be > 0");
    if (!(scenario.background_loss_rate >= 0.0))
        throw std::invalid_argument("background_loss_rate must be >= 0");
    if (!(scenario.duration >= 0.0)) throw std::invalid_argument("duration must be >= 0");
    if (!(scenario.time_step > 0.0)) throw std::invalid_argument("time_step must be > 0");
    double prev = -1.0;
    for (double t : scenario.sample_times) {
        if (!(t >= 0.0) || t > scenario.duration)
            throw std::invalid_argument("sample_times must lie within [0, duration]");
        if (!(t > prev)) throw std::invalid_argument("sample_times must be increasing");
        prev = t;
    }
}

LoadResult load(const McScenario& scenario, const TrapSite& site, const AtomSpecies& species) {
    validate(scenario);
    validate(species);
    if (!site.trapped) throw std::domain_error("cannot load into an untrapped site");

    const double sigma_v = std::sqrt(constants::boltzmann * scenario.cloud_temperature / species.mass);
    LoadResult result;
    for (int i = 0; i < scenario.atom_count; ++i) {
        std::mt19937_64 rng(substream_seed(scenario.seed, load_stream, static_cast<std::uint64_t>(i)));
        std::normal_distribution<double> normal(0.0, 1.0);
        // Standard draws first, scaled afterwards: with a fixed seed the
        // kinetic energies are then monotone in cloud temperature.
        const Vec3 pos{scenario.cloud_radius * normal(rng), scenario.cloud_radius * normal(rng),
                       scenario.cloud_radius * normal(rng)};
        const Vec3 vel{sigma_v * normal(rng), sigma_v * normal(rng), sigma_v * normal(rng)};
        const double kinetic = 0.5 * species.mass * dot(vel, vel);
        const double potential = site_potential(site, site.position + pos);
        const double energy = kinetic + potential;
        if (energy < 0.0) result.atoms.push_back({i, pos, vel, energy});
    }
    result.loaded_fraction = static_cast<double>(result.atoms.size()) / scenario.atom_count;
    return result;
}

McResult evolve(const LoadResult& loaded, const TrapSite& site, const AtomSpecies& species,
                const McScenario& scenario) {
    validate(scenario);
    validate(species);
    if (!site.trapped) throw std::domain_error("cannot evolve in an untrapped site");

    const std::size_t n_samples = scenario.sample_times.size();
    const double e_recoil = recoil_energy(species);
    const double rate = scenario.background_loss_rate;
    const double dt = scenario.time_step;
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<long> alive(n_samples, 0);
    std::vector<double> energy_sum(n_samples, 0.0);

    for (const LoadedAtom& atom : loaded.atoms) {
        std::mt19937_64 rng(
            substream_seed(scenario.seed, evolve_stream, static_cast<std::uint64_t>(atom.index)));
        double background_loss_time = inf;
        if (rate > 0.0) {
            std::uniform_real_distribution<double> uniform(0.0, 1.0);
            background_loss_time = -std::log1p(-uniform(rng)) / rate;
        }

        double heating_loss_time = inf;
        if (scenario.include_recoil_heating) {
            std::poisson_distribution<long> events(site.scattering_rate * dt);
            std::size_t next = 0;
            double energy = atom.energy;
            double step_start = 0.0;
            while (step_start < scenario.duration) {
                const double step_end = std::min(step_start + dt, scenario.duration);
                while (next < n_samples && scenario.sample_times[next] < step_end) {
                    const double ts = scenario.sample_times[next];
                    if (std::min(background_loss_time, heating_loss_time) > ts) {
                        ++alive[next];
                        energy_sum[next] += energy;
                    }
                    ++next;
                }
                energy += 2.0 * e_recoil * static_cast<double>(events(rng));
                if (energy > 0.0) {
                    heating_loss_time = step_end;
                    break;
                }
                step_start = step_end;
            }
            // Samples at or beyond the last step boundary (ts == duration,
            // or everything after a heating loss).
            for (; next < n_samples; ++next) {
                const double ts = scenario.sample_times[next];
                if (std::min(background_loss_time, heating_loss_time) > ts) {
                    ++alive[next];
                    energy_sum[next] += energy;
                }
            }
        } else {
            for (std::size_t s = 0; s < n_samples; ++s) {
                if (background_loss_time > scenario.sample_times[s]) {
                    ++alive[s];
                    energy_sum[s] += atom.energy;
                }
            }
        }
    }

    McResult result;
    result.loaded_fraction = loaded.loaded_fraction;
    result.rng_algorithm = rng_algorithm_name;
    result.seed = scenario.seed;
    result.survival_counts.reserve(n_samples);
    result.mean_energy.reserve(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) {
        result.survival_counts.emplace_back(scenario.sample_times[s], alive[s]);
        result.mean_energy.emplace_back(scenario.sample_times[s],
                                        alive[s] > 0 ? energy_sum[s] / alive[s] : 0.0);
    }
    try {
        const auto [lifetime, stderr_] = fit_exponential(result.survival_counts);
        result.fitted_lifetime = lifetime;
        result.fitted_lifetime_stderr = stderr_;
        result.fit_valid = true;
    } catch (const std::domain_error&) {
        result.fitted_lifetime = std::numeric_limits<double>::quiet_NaN();
        result.fitted_lifetime_stderr = std::numeric_limits<double>::quiet_NaN();
        result.fit_valid = false;
    }
    return result;
}

std::pair<double, double> fit_exponential(
    const std::vector<std::pair<double, long>>& survival_counts) {
    double sw = 0.0, swt = 0.0, swtt = 0.0, swy = 0.0, swty = 0.0;
    std::size_t used = 0;
    long first_count = 0;
    bool all_equal = true;
    for (const auto& [t, count] : survival_counts) {
        if (count <= 0) continue;
        if (used == 0)
            first_count = count;
        else if (count != first_count)
            all_equal = false;
        const double w = static_cast<double>(count);
        const double y = std::log(w);
        sw += w;
        swt += w * t;
        swtt += w * t * t;
        swy += w * y;
        swty += w * t * y;
        ++used;
    }
    if (used < 3) throw std::domain_error("exponential fit needs at least 3 positive counts");
    if (all_equal) throw std::domain_error("exponential fit rejected: counts are constant");

    const double det = sw * swtt - swt * swt;
    const double slope = (sw * swty - swt * swy) / det;
    if (!(slope < 0.0)) throw std::domain_error("exponential fit rejected: counts do not decay");

    // Absolute weights w = N approximate 1/Var(log N) for Poisson counts,
    // so the slope variance is the (slope, slope) entry of (X^T W X)^-1.
    const double slope_stderr = std::sqrt(sw / det);
    const double lifetime = -1.0 / slope;
    return {lifetime, slope_stderr * lifetime * lifetime};
}

}  // namespace microtrap
