#pragma once

#include <string>

namespace microtrap {

// Atomic constants for one trapping/cooling line of a species.
// All quantities SI; linewidths and detunings are angular frequencies (rad/s).
struct AtomSpecies {
    std::string name;
    double mass = 0.0;                  // kg
    double transition_wavelength = 0.0; // m
    double natural_linewidth = 0.0;     // rad/s
    double saturation_intensity = 0.0;  // W/m^2
};

// Throws std::invalid_argument if any field is nonpositive.
void validate(const AtomSpecies& species);

// Two-level saturation intensity pi*h*c*Gamma / (3*lambda^3).
double two_level_saturation_intensity(double wavelength, double linewidth);

// Built-in Rb-85 record: 780 nm line, Gamma/2pi = 5.89 MHz (27 ns lifetime).
// The linewidth is the historically quoted value; override the record for
// other conventions.
AtomSpecies rubidium85();

// Lookup by name; currently only "Rb85". Throws on unknown names.
AtomSpecies species_by_name(const std::string& name);

// Doppler-cooling temperature limit hbar*Gamma / (2 kB).
double doppler_temperature(const AtomSpecies& species);

// Single-photon recoil energy hbar^2 k^2 / (2m), k = 2pi/lambda.
double recoil_energy(const AtomSpecies& species);

// Converts a laser wavelength offset from the transition into an angular
// detuning: delta = -2*pi*c*delta_lambda / lambda0^2. Positive offsets
// (longer wavelength) are red, i.e. negative delta. Rejects offsets of
// lambda0/10 or more, where the linearized conversion breaks down.
double detuning_from_wavelength_offset(const AtomSpecies& species, double delta_lambda);

// Wavelength of light detuned by delta (rad/s) from the transition.
double wavelength_at_detuning(const AtomSpecies& species, double detuning);

}  // namespace microtrap
