#pragma once

#include <optional>
#include <vector>

#include "tempath/kernels.hpp"
#include "tempath/lattice.hpp"
#include "tempath/normalization.hpp"
#include "tempath/types.hpp"

namespace tempath {

// Impulsive Stern-Gerlach-in-time pulse: the capacitor field E0 + E1 t
// applied for a lab-time window delta_T around T_bar, taken to the limit
// delta_T -> 0 with the products E0bar = E0 delta_T, E1bar = E1 delta_T
// held fixed. The sans-serif script-E products are stored directly.
struct ImpulsiveField {
  double E0_bar = 0.0;
  double E1_bar = 0.0;
  double T_bar = 0.0;
  double delta_T = 0.0;  // retained for finite-width cross-checks

  static ImpulsiveField from_field_strengths(double E0, double E1, double delta_T,
                                             double T_bar) {
    return {E0 * delta_T, E1 * delta_T, T_bar, delta_T};
  }
  // Finite-width realization for the lattice: window T_bar +- width/2.
  PotentialSpec finite_pulse(double p, double width) const {
    PotentialSpec pot;
    pot.kind = PotentialSpec::Kind::kLinearInTPulse;
    pot.E0 = E0_bar / width;
    pot.E1 = E1_bar / width;
    pot.T_start = T_bar - 0.5 * width;
    pot.T_end = T_bar + 0.5 * width;
    pot.dipole_p = p;
    return pot;
  }
};

// Electric-dipole eigenvalues and beam weights.
struct DipoleSpectrum {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> weights;      // >= 0, sum to 1

  static DipoleSpectrum make(std::vector<double> eigenvalues,
                             std::vector<double> weights);
};

// Cumulant-approximated dipole interaction: -tdot p (E0 + E1 t) inside the
// lab-time window, zero outside.
double dipole_interaction_energy(double p, double E0, double E1, double T_start,
                                 double T_end, double t, double tdot, double T);

// The impulsive dipole time kernel,
//   K_p = K_free^(t) exp(i p E0bar)
//         exp(i p E1bar [t3 (T_bar - T0) + t0 (T3 - T_bar)] / (T3 - T0)).
Amplitude dipole_time_kernel(double m, double p, const ImpulsiveField& imp, double T0,
                             double T3, double t0, double t3);

SeparableKernel4D dipole_kernel_separable(double m, double p,
                                          const ImpulsiveField& imp, double T0,
                                          double T3);

struct EvolvedComponent {
  double p = 0.0;
  double delta_omega = 0.0;         // asymptotic frequency shift (T3 -> inf)
  double delta_omega_finite = 0.0;  // same reading at the actual T3
  double delta_v = 0.0;             // velocity kick of the time coordinate
  GaussianPacket4D packet;
  double mean_arrival_t = 0.0;
};

// Closed-form evolution of one dipole component from T0 to T3. delta_v is
// kernel-derived: the shift of the center of probability between T_bar and
// T3 against the free evolution, per unit lab time. The optional window
// guards the detector range (DetectorWindow on violation).
EvolvedComponent evolve_dipole_component(
    const GaussianPacket4D& packet, double p, const ImpulsiveField& imp, double m,
    double T0, double T3,
    std::optional<std::pair<double, double>> detector_window = std::nullopt);

// Precession shift shared by both formalisms: -(p E0bar + p E1bar T_bar).
double precession_shift(double p, const ImpulsiveField& imp);

}  // namespace tempath
