#include "tempath/schrodinger.hpp"

#include <cmath>

namespace tempath {

SchrodingerComponent schrodinger_evolve(const ComplexGaussian1D& packet_x, double p,
                                        const PulseField& field, double m, double T0,
                                        double T3) {
  if (!(T0 <= field.T1 && field.T1 <= field.T2 && field.T2 <= T3))
    throw std::domain_error("schrodinger_evolve: requires T0 <= T1 <= T2 <= T3");
  SchrodingerComponent out;
  out.p = p;
  out.packet_x = packet_x;
  if (T3 > T0) out.packet_x.apply_free_kernel(-1, m, T3 - T0);
  // V(T) = -p (E0 + E1 T) across the beam; phase factor exp(-i int V dT).
  const double dT = field.T2 - field.T1;
  const double T_mid = 0.5 * (field.T1 + field.T2);
  out.phase_shift = p * (field.E0 * dT + field.E1 * T_mid * dT);
  out.packet_x.add_const_phase(out.phase_shift);
  out.lab_time = T3;
  return out;
}

double schrodinger_precession(double p, const PulseField& field) {
  const double dT = field.T2 - field.T1;
  const double T_mid = 0.5 * (field.T1 + field.T2);
  return -(p * field.E0 * dT + p * field.E1 * dT * T_mid);
}

double schrodinger_precession(double p, const ImpulsiveField& imp) {
  return -(p * imp.E0_bar + p * imp.E1_bar * imp.T_bar);
}

GridWave schrodinger_split_step(const Grid1D& x_grid, const ComplexGaussian1D& psi0,
                                const PulseField& field, double p, double m,
                                double T0, double T3, int n_slices) {
  LatticeConfig cfg;
  cfg.n_slices = n_slices;
  cfg.epsilon = (T3 - T0) / n_slices;
  cfg.T_start = T0;
  cfg.t_min = x_grid.min;
  cfg.t_max = x_grid.max;
  cfg.n_t = x_grid.n;
  GridWave psi = sample_factor(psi0, x_grid);
  const PotentialFn V = [field, p](double /*x*/, double, double T) {
    if (T < field.T1 || T > field.T2) return 0.0;
    return -p * (field.E0 + field.E1 * T);
  };
  // space-axis kinetic sign on the single active axis
  return trotter_propagate(cfg, V, psi, m, /*time_axis_sign=*/-1).wave;
}

}  // namespace tempath
