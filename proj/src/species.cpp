#include "microtrap/species.hpp"

#include <cmath>
#include <stdexcept>

#include "microtrap/constants.hpp"

namespace microtrap {

namespace {
constexpr double rb85_mass_amu = 84.911789738;
}

void validate(const AtomSpecies& species) {
    if (!(species.mass > 0.0))
        throw std::invalid_argument("species '" + species.name + "': mass must be > 0");
    if (!(species.transition_wavelength > 0.0))
        throw std::invalid_argument("species '" + species.name + "': transition_wavelength must be > 0");
    if (!(species.natural_linewidth > 0.0))
        throw std::invalid_argument("species '" + species.name + "': natural_linewidth must be > 0");
    if (!(species.saturation_intensity > 0.0))
        throw std::invalid_argument("species '" + species.name + "': saturation_intensity must be > 0");
}

double two_level_saturation_intensity(double wavelength, double linewidth) {
    using namespace constants;
    return pi * planck * speed_of_light * linewidth / (3.0 * wavelength * wavelength * wavelength);
}

AtomSpecies rubidium85() {
    AtomSpecies s;
    s.name = "Rb85";
    s.mass = rb85_mass_amu * constants::atomic_mass_unit;
    s.transition_wavelength = 780e-9;
    s.natural_linewidth = constants::two_pi * 5.89e6;
    s.saturation_intensity =
        two_level_saturation_intensity(s.transition_wavelength, s.natural_linewidth);
    return s;
}

AtomSpecies species_by_name(const std::string& name) {
    if (name == "Rb85") return rubidium85();
    throw std::invalid_argument("unknown species '" + name + "' (built-in: Rb85)");
}

double doppler_temperature(const AtomSpecies& species) {
    validate(species);
    return constants::hbar * species.natural_linewidth / (2.0 * constants::boltzmann);
}

double recoil_energy(const AtomSpecies& species) {
    validate(species);
    const double k = constants::two_pi / species.transition_wavelength;
    return constants::hbar * constants::hbar * k * k / (2.0 * species.mass);
}

double detuning_from_wavelength_offset(const AtomSpecies& species, double delta_lambda) {
    validate(species);
    const double lambda0 = species.transition_wavelength;
    if (std::abs(delta_lambda) >= lambda0 / 10.0)
        throw std::domain_error("wavelength offset too large for linearized detuning conversion");
    return -constants::two_pi * constants::speed_of_light * delta_lambda / (lambda0 * lambda0);
}

double wavelength_at_detuning(const AtomSpecies& species, double detuning) {
    validate(species);
    const double omega0 = constants::two_pi * constants::speed_of_light / species.transition_wavelength;
    return constants::two_pi * constants::speed_of_light / (omega0 + detuning);
}

}  // namespace microtrap
