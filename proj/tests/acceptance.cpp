// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is timed against its budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "microtrap/array.hpp"
#include "microtrap/constants.hpp"
#include "microtrap/montecarlo.hpp"
#include "microtrap/optics.hpp"
#include "microtrap/register.hpp"
#include "microtrap/species.hpp"
#include "microtrap/trapfield.hpp"

using namespace microtrap;

namespace {

int failures = 0;

void report(int index, const char* label, bool ok, const std::string& detail,
            double seconds, double budget_seconds) {
    const bool in_budget = seconds <= budget_seconds;
    if (!ok || !in_budget) ++failures;
    std::printf("%s: criterion %d (%s): %s [%.3f s, budget %.0f s]\n",
                ok && in_budget ? "PASS" : "FAIL", index, label, detail.c_str(), seconds,
                budget_seconds);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string fmt(const char* format, double a, double b) {
    char buffer[160];
    std::snprintf(buffer, sizeof(buffer), format, a, b);
    return buffer;
}

void criterion_1_depth() {
    Timer timer;
    const AtomSpecies rb = rubidium85();
    const double detuning = detuning_from_wavelength_offset(rb, 2e-9);
    const TrapSite site = characterize_site(rb, 50e-3, 15e-6, detuning, Vec3{});
    const double depth_mk = std::abs(site.depth) / constants::boltzmann * 1e3;
    const bool ok = std::abs(depth_mk - 1.9) <= 0.1 * 1.9;
    report(1, "single-trap depth", ok,
           fmt("|U0|/kB = %.4f mK, expected 1.9 mK within 10%% (got %.2f%% off)", depth_mk,
               std::abs(depth_mk - 1.9) / 1.9 * 100.0),
           timer.elapsed(), 1.0);
}

void criterion_2_doppler() {
    Timer timer;
    const double t_doppler = doppler_temperature(rubidium85());
    const bool ok = std::abs(t_doppler * 1e3 - 0.141) <= 0.05 * 0.141;
    report(2, "Doppler temperature", ok,
           fmt("T_D = %.6f mK, expected 0.141 mK within 5%% (got %.2f%% off)", t_doppler * 1e3,
               std::abs(t_doppler * 1e3 - 0.141) / 0.141 * 100.0),
           timer.elapsed(), 1.0);
}

void criterion_3_spot() {
    Timer timer;
    const double spot = focal_spot_radius(780e-9, 0.5);
    const double exact = 0.61 * 780e-9 / 0.5;
    const bool matches_formula = std::abs(spot - exact) <= 1e-6 * exact;
    const bool near_micron = std::abs(spot - 1e-6) <= 0.1 * 1e-6;
    report(3, "diffraction-limited spot", matches_formula && near_micron,
           fmt("q = %.4f um, formula match %.3g relative", spot * 1e6,
               std::abs(spot - exact) / exact),
           timer.elapsed(), 1.0);
}

void criterion_4_extent() {
    Timer timer;
    const AtomSpecies rb = rubidium85();
    const double detuning = detuning_from_wavelength_offset(rb, 2e-9);
    const TrapSite site = characterize_site(rb, 1e-3, 1.5e-6, detuning, Vec3{});
    const bool ok = site.trapped && site.ground_state_extent < 100e-9;
    report(4, "microlens site extent", ok,
           fmt("extent = %.2f nm, required < 100 nm (depth %.3g mK)",
               site.ground_state_extent * 1e9,
               site.depth / constants::boltzmann * 1e3),
           timer.elapsed(), 1.0);
}

void criterion_5_lifetime() {
    Timer timer;
    const AtomSpecies rb = rubidium85();
    const double detuning = detuning_from_wavelength_offset(rb, 2e-9);
    const TrapSite site = characterize_site(rb, 50e-3, 15e-6, detuning, Vec3{});

    McScenario scenario;
    scenario.seed = 1;
    scenario.atom_count = 10000;
    scenario.cloud_temperature = 0.14e-3;
    scenario.cloud_radius = 20e-6;
    scenario.background_loss_rate = 1.0 / 0.166;
    scenario.include_recoil_heating = false;
    scenario.duration = 0.4;
    scenario.time_step = 1e-3;
    for (int i = 0; i < 12; ++i) scenario.sample_times.push_back(0.4 * i / 11.0);

    const LoadResult loaded = load(scenario, site, rb);
    const McResult result = evolve(loaded, site, rb, scenario);
    const double relative = std::abs(result.fitted_lifetime - 0.166) / 0.166;
    const bool ok = result.fit_valid && relative <= 0.05;
    report(5, "background-loss lifetime", ok,
           fmt("fitted %.4f ms vs 166 ms (%.2f%% off, 5%% allowed)",
               result.fitted_lifetime * 1e3, relative * 100.0),
           timer.elapsed(), 60.0);
}

void criterion_6_heating() {
    Timer timer;
    const AtomSpecies rb = rubidium85();
    const double detuning = detuning_from_wavelength_offset(rb, 2e-9);
    const TrapSite site = characterize_site(rb, 50e-3, 15e-6, detuning, Vec3{});

    McScenario scenario;
    scenario.seed = 97;
    scenario.atom_count = 10000;
    scenario.cloud_temperature = 0.1e-3;
    scenario.cloud_radius = 0.5e-6;
    scenario.background_loss_rate = 0.0;
    scenario.include_recoil_heating = true;
    scenario.duration = 0.05;
    scenario.time_step = 1e-3;
    for (int i = 0; i <= 5; ++i) scenario.sample_times.push_back(0.01 * i);

    const LoadResult loaded = load(scenario, site, rb);
    const McResult result = evolve(loaded, site, rb, scenario);

    // Least-squares slope of mean energy against time.
    double st = 0.0, se = 0.0, stt = 0.0, ste = 0.0;
    const double n = static_cast<double>(result.mean_energy.size());
    for (const auto& [t, e] : result.mean_energy) {
        st += t;
        se += e;
        stt += t * t;
        ste += t * e;
    }
    const double slope = (n * ste - st * se) / (n * stt - st * st);
    const double expected = 2.0 * recoil_energy(rb) * site.scattering_rate;
    const double relative = std::abs(slope - expected) / expected;
    const bool ok = relative <= 0.05;
    report(6, "recoil-heating rate", ok,
           fmt("mean-energy slope %.5g J/s vs 2 E_rec Gamma_sc = %.5g J/s", slope, expected) +
               fmt(" (%.2f%% off, 5%% allowed)", relative * 100.0, 0.0),
           timer.elapsed(), 60.0);
}

bool depth_properties(std::string& detail) {
    const AtomSpecies rb = rubidium85();
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> intensity_draw(1e5, 5e9);
    std::uniform_real_distribution<double> offset_draw(0.2e-9, 60e-9);
    std::uniform_real_distribution<double> scale_draw(0.1, 10.0);
    double worst_linearity = 0.0;
    double worst_odd = 0.0;
    double worst_identity = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double intensity = intensity_draw(rng);
        const double offset = offset_draw(rng) * (i % 2 == 0 ? 1.0 : -1.0);
        const double detuning = detuning_from_wavelength_offset(rb, offset);
        const double scale = scale_draw(rng);

        const double depth = dipole_depth(rb, intensity, detuning);
        const double scaled = dipole_depth(rb, intensity * scale, detuning);
        worst_linearity =
            std::max(worst_linearity, std::abs(scaled - scale * depth) / std::abs(scaled));

        const double mirrored = dipole_depth(rb, intensity, -detuning);
        worst_odd = std::max(worst_odd, std::abs(mirrored + depth) / std::abs(depth));

        const double rate = scattering_rate(rb, intensity, detuning);
        const double lhs = constants::hbar * rate / std::abs(depth);
        const double rhs = rb.natural_linewidth / std::abs(detuning);
        worst_identity = std::max(worst_identity, std::abs(lhs - rhs) / rhs);
    }
    detail += fmt("depth linearity %.2g / oddness %.2g", worst_linearity, worst_odd);
    detail += fmt(", identity %.2g (1e-12 allowed); ", worst_identity, 0.0);
    return worst_linearity < 1e-12 && worst_odd < 1e-12 && worst_identity < 1e-12;
}

bool frequency_fd_property(std::string& detail) {
    const AtomSpecies rb = rubidium85();
    const double detuning = detuning_from_wavelength_offset(rb, 2e-9);
    double worst = 0.0;
    const double waists[] = {1.5e-6, 5e-6, 15e-6};
    const double powers[] = {1e-3, 10e-3, 50e-3};
    for (double waist : waists) {
        for (double power : powers) {
            const TrapSite site = characterize_site(rb, power, waist, detuning, Vec3{});
            const double z_r = constants::pi * site.waist * site.waist / site.wavelength;

            auto curvature = [&](bool radial) {
                const double h = radial ? waist / 1e3 : z_r / 1e3;
                const Vec3 plus = radial ? Vec3{h, 0.0, 0.0} : Vec3{0.0, 0.0, h};
                const Vec3 minus = radial ? Vec3{-h, 0.0, 0.0} : Vec3{0.0, 0.0, -h};
                const double u0 = site_potential(site, Vec3{});
                const double up = site_potential(site, plus);
                const double um = site_potential(site, minus);
                return (up + um - 2.0 * u0) / (h * h);
            };
            const double fd_radial = std::sqrt(curvature(true) / rb.mass);
            const double fd_axial = std::sqrt(curvature(false) / rb.mass);
            worst = std::max(worst,
                             std::abs(fd_radial - site.radial_frequency) / site.radial_frequency);
            worst = std::max(worst,
                             std::abs(fd_axial - site.axial_frequency) / site.axial_frequency);
        }
    }
    detail += fmt("finite-difference frequency agreement %.2g (1%% allowed); ", worst, 0.0);
    return worst < 0.01;
}

bool bloch_norm_property(std::string& detail) {
    QubitState state;
    state.bloch = Vec3{0.0, 0.0, -1.0};
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> angle_draw(0.0, 2.0 * constants::pi);
    double worst = 0.0;
    for (int i = 0; i < 1000000; ++i) {
        state = rotate_bloch(state, angle_draw(rng), angle_draw(rng));
        const double norm = std::sqrt(state.bloch.x * state.bloch.x +
                                      state.bloch.y * state.bloch.y +
                                      state.bloch.z * state.bloch.z);
        worst = std::max(worst, std::abs(norm - 1.0));
    }
    detail += fmt("Bloch norm drift %.2g over 1e6 rotations (1e-12 allowed); ", worst, 0.0);
    return worst < 1e-12;
}

bool collection_property(std::string& detail) {
    double previous = -1.0;
    bool monotone = true;
    bool bounded = true;
    for (int i = 1; i <= 999; ++i) {
        const double na = i / 1000.0;
        const double eff = collection_efficiency(na);
        if (eff <= previous) monotone = false;
        if (eff <= 0.0 || eff >= 0.5) bounded = false;
        previous = eff;
    }
    detail += std::string("collection efficiency ") +
              (monotone ? "monotone" : "NOT monotone") + ", " +
              (bounded ? "bounded in (0, 0.5)" : "NOT bounded") + "; ";
    return monotone && bounded;
}

bool power_share_property(std::string& detail) {
    MicrolensArray optics;
    optics.pitch = 125e-6;
    optics.lens_diameter = 100e-6;
    optics.focal_length = 625e-6;
    optics.rows = 3;
    optics.cols = 3;

    GaussianBeam beam;
    beam.power = 120e-3;
    beam.waist = 210e-6;
    beam.wavelength = 780e-9;
    beam.focus_position = Vec3{40e-6, -25e-6, 0.0};
    beam.axis = Vec3{0.0, 0.0, 1.0};

    const std::vector<double> shares = lenslet_power_share(optics, beam, 32);

    // Brute-force midpoint quadrature over each lenslet aperture.
    double worst = 0.0;
    const int n = 700;
    for (int row = 0; row < optics.rows; ++row) {
        for (int col = 0; col < optics.cols; ++col) {
            const Vec3 center = lenslet_center(optics, row, col);
            const double radius = optics.lens_diameter / 2.0;
            const double cell = optics.lens_diameter / n;
            double sum = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const double x = -radius + (i + 0.5) * cell;
                    const double y = -radius + (j + 0.5) * cell;
                    if (x * x + y * y > radius * radius) continue;
                    const Vec3 point{center.x + x, center.y + y, 0.0};
                    sum += beam_intensity(beam, point) * cell * cell;
                }
            }
            const double share = shares[site_index(optics, row, col)];
            worst = std::max(worst, std::abs(share - sum) / sum);
        }
    }
    detail += fmt("power-share quadrature vs brute force %.2g (1e-3 allowed); ", worst, 0.0);
    return worst < 1e-3;
}

bool determinism_property(std::string& detail) {
    const AtomSpecies rb = rubidium85();
    const double detuning = detuning_from_wavelength_offset(rb, 2e-9);
    const TrapSite site = characterize_site(rb, 50e-3, 15e-6, detuning, Vec3{});
    McScenario scenario;
    scenario.seed = 31337;
    scenario.atom_count = 2000;
    scenario.cloud_temperature = 0.14e-3;
    scenario.cloud_radius = 20e-6;
    scenario.background_loss_rate = 1.0 / 0.166;
    scenario.include_recoil_heating = true;
    scenario.duration = 0.2;
    scenario.time_step = 1e-3;
    for (int i = 0; i < 6; ++i) scenario.sample_times.push_back(0.2 * i / 5.0);

    const LoadResult first_load = load(scenario, site, rb);
    const LoadResult second_load = load(scenario, site, rb);
    bool identical = first_load.atoms.size() == second_load.atoms.size();
    if (identical) {
        for (std::size_t i = 0; i < first_load.atoms.size(); ++i) {
            const LoadedAtom& a = first_load.atoms[i];
            const LoadedAtom& b = second_load.atoms[i];
            if (a.position.x != b.position.x || a.position.y != b.position.y ||
                a.position.z != b.position.z || a.velocity.x != b.velocity.x ||
                a.velocity.y != b.velocity.y || a.velocity.z != b.velocity.z) {
                identical = false;
                break;
            }
        }
    }
    const McResult first = evolve(first_load, site, rb, scenario);
    const McResult second = evolve(second_load, site, rb, scenario);
    bool same_counts = first.survival_counts == second.survival_counts;
    bool same_energy = first.mean_energy == second.mean_energy;
    detail += std::string("seed determinism ") +
              (identical && same_counts && same_energy ? "byte-identical" : "BROKEN") + "; ";
    return identical && same_counts && same_energy;
}

bool crn_monotonicity_property(std::string& detail) {
    const AtomSpecies rb = rubidium85();
    const double detuning = detuning_from_wavelength_offset(rb, 2e-9);
    const TrapSite site = characterize_site(rb, 50e-3, 15e-6, detuning, Vec3{});
    McScenario scenario;
    scenario.seed = 777;
    scenario.atom_count = 4000;
    scenario.cloud_radius = 20e-6;
    scenario.duration = 0.1;
    scenario.time_step = 1e-3;
    scenario.sample_times = {0.0, 0.1};

    std::size_t previous = scenario.atom_count + 1;
    bool monotone = true;
    for (double temperature_mk = 0.02; temperature_mk <= 0.801; temperature_mk += 0.02) {
        scenario.cloud_temperature = temperature_mk * 1e-3;
        const std::size_t count = load(scenario, site, rb).atoms.size();
        if (count > previous) monotone = false;
        previous = count;
    }
    detail += std::string("common-random-number loading ") +
              (monotone ? "monotone in temperature" : "NOT monotone");
    return monotone;
}

void criterion_7_properties() {
    Timer timer;
    std::string detail;
    bool ok = depth_properties(detail);
    ok = frequency_fd_property(detail) && ok;
    ok = bloch_norm_property(detail) && ok;
    ok = collection_property(detail) && ok;
    ok = power_share_property(detail) && ok;
    ok = determinism_property(detail) && ok;
    ok = crn_monotonicity_property(detail) && ok;
    report(7, "property suites", ok, detail, timer.elapsed(), 60.0);
}

void criterion_8_crosstalk() {
    Timer timer;
    const AtomSpecies rb = rubidium85();
    const double detuning = detuning_from_wavelength_offset(rb, 2e-9);

    TrapArray array;
    array.pitch = 100e-6;
    array.rows = 1;
    array.cols = 5;
    array.geometry = ArrayGeometry::one_dimensional;
    array.source = ArraySource::single_beam;
    array.species_name = rb.name;
    array.detuning = detuning;
    for (int i = 0; i < 5; ++i) {
        TrapSite site = characterize_site(rb, 1e-3, 1.5e-6, detuning,
                                          Vec3{i * array.pitch, 0.0, 0.0});
        array.sites.push_back(site);
    }

    RamanPulse pulse;
    pulse.target_site = 0;
    pulse.beam_waist_at_plane = 5e-6;
    pulse.rabi_1 = constants::two_pi * 10e6;
    pulse.rabi_2 = constants::two_pi * 10e6;
    pulse.single_photon_detuning = constants::two_pi * 10e9;
    pulse.duration = 1e-6;

    const std::vector<double> ratios = crosstalk_map(array, pulse);
    const bool underflows = ratios[1] == 0.0;
    bool monotone = true;
    for (std::size_t i = 1; i < ratios.size(); ++i) {
        if (ratios[i] > ratios[i - 1]) monotone = false;
    }
    std::string detail = fmt("nearest-neighbor ratio %.17g, ", ratios[1], 0.0);
    detail += underflows ? "underflows to exact 0; " : "does NOT reach exact 0; ";
    detail += monotone ? "map monotone nonincreasing with distance" : "map NOT monotone";
    report(8, "crosstalk suppression", underflows && monotone, detail, timer.elapsed(), 1.0);
}

}  // namespace

int main() {
    criterion_1_depth();
    criterion_2_doppler();
    criterion_3_spot();
    criterion_4_extent();
    criterion_5_lifetime();
    criterion_6_heating();
    criterion_7_properties();
    criterion_8_crosstalk();
    if (failures == 0) {
        std::printf("all 8 acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria failed\n", failures);
    return 1;
}
