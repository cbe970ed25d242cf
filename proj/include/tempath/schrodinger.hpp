#pragma once

#include "tempath/complex_gaussian.hpp"
#include "tempath/dipole.hpp"
#include "tempath/lattice.hpp"

namespace tempath {

// Reference calculation: the same pulse solved with the Schrodinger
// equation by separation of variables. The capacitor potential is
// spatially constant across the beam, so each dipole component picks up a
// global, p-dependent phase while its spatial packet evolves freely; there
// is no velocity splitting by construction.

struct PulseField {
  double E0 = 0.0;
  double E1 = 0.0;
  double T1 = 0.0;  // pulse on
  double T2 = 0.0;  // pulse off
};

struct SchrodingerComponent {
  double p = 0.0;
  double phase_shift = 0.0;  // accumulated -integral V dT over the pulse
  ComplexGaussian1D packet_x;
  double lab_time = 0.0;
};

SchrodingerComponent schrodinger_evolve(const ComplexGaussian1D& packet_x, double p,
                                        const PulseField& field, double m, double T0,
                                        double T3);

// Change in frequency per component, lowest order: -(p E0bar + p E1bar T_bar).
double schrodinger_precession(double p, const PulseField& field);
double schrodinger_precession(double p, const ImpulsiveField& imp);

// Split-step grid integrator (artifact plumbing, shares the lattice
// machinery on the space axis); oracle for the analytic phase.
GridWave schrodinger_split_step(const Grid1D& x_grid, const ComplexGaussian1D& psi0,
                                const PulseField& field, double p, double m,
                                double T0, double T3, int n_slices);

}  // namespace tempath
