#include "microtrap/trapfield.hpp"

#include <cmath>
#include <stdexcept>

#include "microtrap/constants.hpp"
#include "microtrap/optics.hpp"

namespace microtrap {

using constants::hbar;
using constants::pi;
using constants::two_pi;

namespace {

void check_far_detuned(const AtomSpecies& species, double peak_intensity, double detuning) {
    validate(species);
    if (!(peak_intensity >= 0.0)) throw std::domain_error("peak intensity must be >= 0");
    if (std::abs(detuning) < 100.0 * species.natural_linewidth)
        throw std::domain_error("detuning below 100 Gamma: far-detuned formula not valid");
}

}  // namespace

double dipole_depth(const AtomSpecies& species, double peak_intensity, double detuning) {
    check_far_detuned(species, peak_intensity, detuning);
    const double gamma = species.natural_linewidth;
    return hbar * gamma * gamma * peak_intensity /
           (8.0 * detuning * species.saturation_intensity);
}

double scattering_rate(const AtomSpecies& species, double peak_intensity, double detuning) {
    check_far_detuned(species, peak_intensity, detuning);
    const double gamma = species.natural_linewidth;
    return gamma * gamma * gamma * peak_intensity /
           (8.0 * detuning * detuning * species.saturation_intensity);
}

TrapFrequencies trap_frequencies(const AtomSpecies& species, double depth, double waist,
                                 double wavelength) {
    validate(species);
    if (!(depth < 0.0)) throw std::domain_error("trap frequencies require a trapping (negative) depth");
    if (!(waist > 0.0) || !(wavelength > 0.0))
        throw std::domain_error("waist and wavelength must be > 0");
    const double u = -depth;
    const double zr = pi * waist * waist / wavelength;
    TrapFrequencies f;
    f.radial = std::sqrt(4.0 * u / (species.mass * waist * waist));
    f.axial = std::sqrt(2.0 * u / (species.mass * zr * zr));
    return f;
}

double ground_state_extent(const AtomSpecies& species, double trap_frequency) {
    validate(species);
    if (!(trap_frequency > 0.0)) throw std::domain_error("trap frequency must be > 0");
    return std::sqrt(hbar / (2.0 * species.mass * trap_frequency));
}

TrapSite characterize_site(const AtomSpecies& species, double site_power, double site_waist,
                           double detuning, const Vec3& position) {
    validate(species);
    if (!(site_power >= 0.0)) throw std::domain_error("site power must be >= 0");
    if (!(site_waist > 0.0)) throw std::domain_error("site waist must be > 0");

    TrapSite site;
    site.position = position;
    site.waist = site_waist;
    site.wavelength = wavelength_at_detuning(species, detuning);
    site.source_power = site_power;
    site.detuning = detuning;

    if (site_power == 0.0) return site;  // untrapped marker, all derived fields zero

    const double intensity = peak_intensity(site_power, site_waist);
    site.depth = dipole_depth(species, intensity, detuning);
    site.scattering_rate = scattering_rate(species, intensity, detuning);

    const TrapFrequencies f = trap_frequencies(species, site.depth, site_waist, site.wavelength);
    site.radial_frequency = f.radial;
    site.axial_frequency = f.axial;
    site.ground_state_extent = ground_state_extent(species, f.radial);
    site.lamb_dicke = two_pi / site.wavelength * site.ground_state_extent;
    site.trapped = true;
    site.sideband_coolable =
        site.lamb_dicke < 1.0 && site.scattering_rate < site.axial_frequency / two_pi;
    return site;
}

double site_potential(const TrapSite& site, const Vec3& point) {
    if (site.depth == 0.0) return 0.0;
    const Vec3 rel = point - site.position;
    const double z = rel.z;
    const double r2 = rel.x * rel.x + rel.y * rel.y;
    const double zr = pi * site.waist * site.waist / site.wavelength;
    const double w2 = site.waist * site.waist * (1.0 + (z / zr) * (z / zr));
    return site.depth * (site.waist * site.waist / w2) * std::exp(-2.0 * r2 / w2);
}

}  // namespace microtrap
