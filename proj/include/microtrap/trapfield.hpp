#pragma once

#include "microtrap/species.hpp"
#include "microtrap/vec3.hpp"

namespace microtrap {

// One characterized dipole trap. depth is signed: negative for red detuning
// (trapping), positive for blue. ground_state_extent is the rms radius
// sqrt(hbar / 2 m omega_r) of the radial harmonic ground state; lamb_dicke
// uses the trapping-light wavevector k = 2pi/wavelength with that extent.
struct TrapSite {
    Vec3 position{};
    double depth = 0.0;               // J
    double waist = 0.0;               // m
    double wavelength = 0.0;          // m, trapping light
    double radial_frequency = 0.0;    // rad/s
    double axial_frequency = 0.0;     // rad/s
    double scattering_rate = 0.0;     // 1/s
    double ground_state_extent = 0.0; // m
    double lamb_dicke = 0.0;
    double source_power = 0.0;        // W
    double detuning = 0.0;            // rad/s
    bool trapped = false;
    bool sideband_coolable = false;
};

// Far-detuned two-level light shift U0 = hbar Gamma^2 I / (8 delta I_sat).
// Red detuning (delta < 0) gives negative (trapping) depth. Rejects
// |delta| < 100 Gamma, outside the formula's validity.
double dipole_depth(const AtomSpecies& species, double peak_intensity, double detuning);

// Photon scattering rate Gamma_sc = Gamma^3 I / (8 delta^2 I_sat).
// Satisfies hbar * Gamma_sc / |U0| = Gamma / |delta| exactly.
double scattering_rate(const AtomSpecies& species, double peak_intensity, double detuning);

struct TrapFrequencies {
    double radial = 0.0;  // rad/s
    double axial = 0.0;   // rad/s
};

// Harmonic expansion of a Gaussian focus of the given waist:
//   omega_r = sqrt(4|U0| / m w0^2),  omega_z = sqrt(2|U0| / m zR^2).
// Rejects non-trapping (depth >= 0) input.
TrapFrequencies trap_frequencies(const AtomSpecies& species, double depth, double waist,
                                 double wavelength);

// Harmonic-oscillator rms ground-state radius sqrt(hbar / 2 m omega).
double ground_state_extent(const AtomSpecies& species, double trap_frequency);

// Full per-site characterization from the source power and focused waist.
// Zero power yields an untrapped marker with zeroed derived fields; blue
// detuning propagates the trap_frequencies rejection.
TrapSite characterize_site(const AtomSpecies& species, double site_power, double site_waist,
                           double detuning, const Vec3& position);

// Gaussian-focus potential of a site at a lab-frame point (beam along z):
//   U(r,z) = depth * (w0/w(z))^2 * exp(-2 r^2 / w(z)^2).
double site_potential(const TrapSite& site, const Vec3& point);

}  // namespace microtrap
