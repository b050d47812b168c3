#include "microtrap/register.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace microtrap {

namespace {

void check_site_index(const TrapArray& array, int site) {
    if (site < 0 || static_cast<std::size_t>(site) >= array.sites.size())
        throw std::out_of_range("site index out of range");
}

double envelope_distance_sq(const TrapArray& array, int site, int target) {
    const Vec3& p = array.sites[site].position;
    const Vec3& t = array.sites[target].position;
    const double dx = p.x - t.x;
    const double dy = p.y - t.y;
    return dx * dx + dy * dy;
}

}  // namespace

double effective_rabi(const RamanPulse& pulse) {
    if (!(pulse.rabi_1 >= 0.0) || !(pulse.rabi_2 >= 0.0))
        throw std::domain_error("Rabi frequencies must be >= 0");
    if (std::abs(pulse.single_photon_detuning) < 10.0 * std::max(pulse.rabi_1, pulse.rabi_2))
        throw std::domain_error("single-photon detuning below 10x Rabi frequency");
    return pulse.rabi_1 * pulse.rabi_2 / (2.0 * std::abs(pulse.single_photon_detuning));
}

QubitState rotate_bloch(const QubitState& state, double angle, double phase) {
    const Vec3 n{std::cos(phase), std::sin(phase), 0.0};
    const Vec3& r = state.bloch;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    // Rodrigues form of the torque evolution dr/dt = -Omega n x r.
    const Vec3 rotated = c * r - s * cross(n, r) + ((1.0 - c) * dot(n, r)) * n;
    return QubitState{rotated};
}

QubitState rotate(const QubitState& state, const RamanPulse& pulse) {
    if (!(pulse.duration >= 0.0)) throw std::domain_error("pulse duration must be >= 0");
    return rotate_bloch(state, effective_rabi(pulse) * pulse.duration, pulse.phase);
}

std::vector<double> crosstalk_map(const TrapArray& array, const RamanPulse& pulse) {
    check_site_index(array, pulse.target_site);
    if (!(pulse.beam_waist_at_plane > 0.0))
        throw std::domain_error("addressing beam waist must be > 0");
    const double w2 = pulse.beam_waist_at_plane * pulse.beam_waist_at_plane;
    std::vector<double> ratios(array.sites.size());
    for (std::size_t i = 0; i < array.sites.size(); ++i) {
        const double d2 = envelope_distance_sq(array, static_cast<int>(i), pulse.target_site);
        ratios[i] = std::exp(-2.0 * d2 / w2);
    }
    ratios[pulse.target_site] = 1.0;
    return ratios;
}

double single_beam_stark_ratio(const TrapArray& array, const RamanPulse& pulse) {
    check_site_index(array, pulse.target_site);
    if (!(pulse.beam_waist_at_plane > 0.0))
        throw std::domain_error("addressing beam waist must be > 0");
    const double w2 = pulse.beam_waist_at_plane * pulse.beam_waist_at_plane;
    double worst = 0.0;
    for (std::size_t i = 0; i < array.sites.size(); ++i) {
        if (static_cast<int>(i) == pulse.target_site) continue;
        const double d2 = envelope_distance_sq(array, static_cast<int>(i), pulse.target_site);
        worst = std::max(worst, std::exp(-2.0 * d2 / w2));
    }
    return worst;
}

double coherence_time_estimate(const TrapSite& site) {
    if (!site.trapped) throw std::domain_error("coherence time undefined for untrapped site");
    return 1.0 / site.scattering_rate;
}

double collection_efficiency(double na) {
    if (!(na > 0.0 && na < 1.0)) throw std::domain_error("NA must lie in (0, 1)");
    return (1.0 - std::sqrt(1.0 - na * na)) / 2.0;
}

QubitRegister make_register(const TrapArray& array) {
    QubitRegister reg;
    reg.states.assign(array.sites.size(), QubitState{});
    reg.coherence_time.resize(array.sites.size());
    for (std::size_t i = 0; i < array.sites.size(); ++i)
        reg.coherence_time[i] =
            array.sites[i].trapped ? coherence_time_estimate(array.sites[i]) : 0.0;
    return reg;
}

double readout(const QubitRegister& reg, const TrapArray& array, int site, double na,
               long scatter_count) {
    check_site_index(array, site);
    if (static_cast<std::size_t>(site) >= reg.states.size())
        throw std::out_of_range("site index out of range");
    if (scatter_count < 0) throw std::domain_error("scatter count must be >= 0");
    const double p_bright = (1.0 + reg.states[site].bloch.z) / 2.0;
    return static_cast<double>(scatter_count) * collection_efficiency(na) * p_bright;
}

void apply_pulse(QubitRegister& reg, const TrapArray& array, const RamanPulse& pulse) {
    if (reg.states.size() != array.sites.size())
        throw std::invalid_argument("register does not match the array");
    const std::vector<double> ratios = crosstalk_map(array, pulse);
    const double angle = effective_rabi(pulse) * pulse.duration;
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        if (!array.sites[i].trapped || ratios[i] == 0.0) continue;
        reg.states[i] = rotate_bloch(reg.states[i], angle * ratios[i], pulse.phase);
    }
}

void decohere(QubitRegister& reg, double duration) {
    if (!(duration >= 0.0)) throw std::domain_error("duration must be >= 0");
    for (std::size_t i = 0; i < reg.states.size(); ++i) {
        if (!(reg.coherence_time[i] > 0.0)) continue;
        const double factor = std::exp(-duration / reg.coherence_time[i]);
        reg.states[i].bloch.x *= factor;
        reg.states[i].bloch.y *= factor;
    }
}

}  // namespace microtrap
