#pragma once

#include <vector>

#include "microtrap/array.hpp"
#include "microtrap/vec3.hpp"

namespace microtrap {

// Two-level qubit as a Bloch vector (u, v, w); w = -1 is |0>, w = +1 is |1>.
struct QubitState {
    Vec3 bloch{0.0, 0.0, -1.0};
};

// Per-site qubit states over a trap array, with the scattering-limited
// coherence time bookkeeping. Untrapped sites hold no atom: their state
// stays |0> and their coherence time is zero.
struct QubitRegister {
    std::vector<QubitState> states;
    std::vector<double> coherence_time;  // s
};

// Two-photon Raman addressing pulse aimed at one lattice site. Both beams
// are modeled as Gaussian spots of beam_waist_at_plane centered on the
// target; their paths cross only there.
struct RamanPulse {
    int target_site = 0;
    double beam_waist_at_plane = 0.0;    // m
    double rabi_1 = 0.0;                 // rad/s
    double rabi_2 = 0.0;                 // rad/s
    double single_photon_detuning = 0.0; // rad/s
    double duration = 0.0;               // s
    double phase = 0.0;                  // rad
};

// Two-photon effective Rabi frequency Omega1*Omega2 / (2|Delta|).
// Rejects |Delta| < 10 max(Omega1, Omega2).
double effective_rabi(const RamanPulse& pulse);

// Rotates the Bloch vector by `angle` about the equatorial axis
// (cos phase, sin phase, 0). Sign convention: a phase-0 pulse takes
// w = -1 through (0, -1, 0) at angle pi/2 to w = +1 at angle pi.
QubitState rotate_bloch(const QubitState& state, double angle, double phase);

// Rotation by theta = effective_rabi(pulse) * duration.
QubitState rotate(const QubitState& state, const RamanPulse& pulse);

// Per-site ratio Omega_eff(site)/Omega_eff(target) from the product of the
// two beams' local field envelopes: exp(-2 d^2 / w^2) at trap-plane
// distance d from the target. Indexed by flat site index; target maps to 1.
std::vector<double> crosstalk_map(const TrapArray& array, const RamanPulse& pulse);

// Largest single-beam intensity envelope ratio seen by any non-target site;
// a diagnostic for the AC-Stark perturbation of neighbors, not part of the
// rotation model.
double single_beam_stark_ratio(const TrapArray& array, const RamanPulse& pulse);

// Photon-scattering-limited coherence time 1/Gamma_sc. This is an upper
// bound, not a prediction. Throws for untrapped sites.
double coherence_time_estimate(const TrapSite& site);

// Fraction of fluorescence photons collected by an NA-limited lens:
// (1 - sqrt(1 - NA^2)) / 2. Rejects NA outside (0, 1).
double collection_efficiency(double na);

QubitRegister make_register(const TrapArray& array);

// Expected detected photons: scatter_count * efficiency * p(bright), with
// p(bright) = (1 + w)/2. Throws on an invalid site index.
double readout(const QubitRegister& reg, const TrapArray& array, int site, double na,
               long scatter_count);

// Applies the pulse with crosstalk: every trapped site rotates by the
// crosstalk-scaled angle. Sites with a zero crosstalk ratio are untouched.
void apply_pulse(QubitRegister& reg, const TrapArray& array, const RamanPulse& pulse);

// Storage decoherence over `duration`: equatorial components shrink by
// exp(-duration / coherence_time); populations are unaffected.
void decohere(QubitRegister& reg, double duration);

}  // namespace microtrap
