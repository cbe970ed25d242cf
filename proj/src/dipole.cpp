#include "tempath/dipole.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tempath {

DipoleSpectrum DipoleSpectrum::make(std::vector<double> eigenvalues,
                                    std::vector<double> weights) {
  if (eigenvalues.empty() || eigenvalues.size() != weights.size())
    throw std::domain_error("DipoleSpectrum: eigenvalues/weights size mismatch");
  std::vector<std::size_t> order(eigenvalues.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return eigenvalues[a] < eigenvalues[b]; });
  DipoleSpectrum s;
  double total = 0.0;
  for (std::size_t i : order) {
    if (weights[i] < 0.0) throw std::domain_error("DipoleSpectrum: negative weight");
    s.eigenvalues.push_back(eigenvalues[i]);
    s.weights.push_back(weights[i]);
    total += weights[i];
  }
  if (!(total > 0.0)) throw std::domain_error("DipoleSpectrum: zero total weight");
  for (double& w : s.weights) w /= total;
  return s;
}

double dipole_interaction_energy(double p, double E0, double E1, double T_start,
                                 double T_end, double t, double tdot, double T) {
  if (T < T_start || T > T_end) return 0.0;
  return -tdot * p * (E0 + E1 * t);
}

Amplitude dipole_time_kernel(double m, double p, const ImpulsiveField& imp, double T0,
                             double T3, double t0, double t3) {
  if (!(T0 < imp.T_bar && imp.T_bar < T3))
    throw std::domain_error("dipole_time_kernel: requires T0 < T_bar < T3");
  const double span = T3 - T0;
  const double phase =
      p * imp.E0_bar +
      p * imp.E1_bar * (t3 * (imp.T_bar - T0) + t0 * (T3 - imp.T_bar)) / span;
  return free_time_kernel(m, T0, T3, t0, t3) * std::exp(Amplitude(0.0, phase));
}

SeparableKernel4D dipole_kernel_separable(double m, double p,
                                          const ImpulsiveField& imp, double T0,
                                          double T3) {
  SeparableKernel4D k;
  k.time = [=](double a, double b) { return dipole_time_kernel(m, p, imp, T0, T3, a, b); };
  k.space = [=](double a, double b) { return free_space_kernel(m, T0, T3, a, b); };
  return k;
}

EvolvedComponent evolve_dipole_component(
    const GaussianPacket4D& packet, double p, const ImpulsiveField& imp, double m,
    double T0, double T3, std::optional<std::pair<double, double>> detector_window) {
  if (!(T0 < imp.T_bar && imp.T_bar < T3))
    throw std::domain_error("evolve_dipole_component: requires T0 < T_bar < T3");
  const double span = T3 - T0;
  const double boost_in = p * imp.E1_bar * (T3 - imp.T_bar) / span;
  const double phase_out = p * imp.E1_bar * (imp.T_bar - T0) / span;

  EvolvedComponent out;
  out.p = p;
  out.packet = packet;
  out.packet.time_factor.add_linear_phase(boost_in);
  out.packet.time_factor.apply_free_kernel(+1, m, span);
  out.packet.time_factor.add_linear_phase(phase_out);
  out.packet.time_factor.add_const_phase(p * imp.E0_bar);
  out.packet.space_factor.apply_free_kernel(-1, m, span);
  out.packet.lab_time = T3;

  const double free_mean_t = packet.t_a() + packet.omega_a() / m * span;
  out.mean_arrival_t = out.packet.t_a();
  out.delta_v = (out.mean_arrival_t - free_mean_t) / (T3 - imp.T_bar);

  // Phase of the pulse factor read at the packet's classical center; the
  // asymptotic value uses the center at the pulse, t_bar(T_bar).
  const double t_at_pulse = packet.t_a() + packet.omega_a() / m * (imp.T_bar - T0);
  out.delta_omega = -(p * imp.E0_bar + p * imp.E1_bar * t_at_pulse);
  out.delta_omega_finite =
      -(p * imp.E0_bar +
        p * imp.E1_bar *
            (free_mean_t * (imp.T_bar - T0) + packet.t_a() * (T3 - imp.T_bar)) / span);

  if (detector_window &&
      (out.mean_arrival_t < detector_window->first ||
       out.mean_arrival_t > detector_window->second))
    throw DetectorWindow("evolve_dipole_component: mean arrival outside the grid");
  return out;
}

double precession_shift(double p, const ImpulsiveField& imp) {
  return -(p * imp.E0_bar + p * imp.E1_bar * imp.T_bar);
}

}  // namespace tempath
