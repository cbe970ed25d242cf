// Development probe: runs the lattice oracle against the analytic dipole
// component to extract the regression constants frozen in the test suite.
#include <cstdio>

#include "tempath/dipole.hpp"
#include "tempath/kernels.hpp"
#include "tempath/lattice.hpp"
#include "tempath/normalization.hpp"

using namespace tempath;

namespace {
struct OracleRun {
  double delta_v;
  double mod_phase_l2;
};

OracleRun run_pulse(double width, int slices_per_width) {
  const double m = 1.0, p = 1.0, E1_bar = 0.05, T_bar = 1.0, T3 = 4.0;
  const ImpulsiveField imp{0.0, E1_bar, T_bar, width};
  const GaussianPacket4D packet = GaussianPacket4D::make(0, 0, 1.0, 0.0, 1.0, 1.0, 0.0);

  LatticeConfig cfg;
  cfg.epsilon = width / slices_per_width;
  cfg.n_slices = static_cast<int>(std::llround(T3 / cfg.epsilon));
  cfg.T_start = 0.0;
  cfg.t_min = -46.0;
  cfg.t_max = 50.0;
  cfg.n_t = 2048;

  GridWave psi0 = sample_packet(packet, cfg.t_grid());
  const PotentialSpec pot = imp.finite_pulse(p, width);
  const GridWave pulsed = trotter_propagate(cfg, pot, psi0, m).wave;
  const GridWave free_run = trotter_propagate(cfg, PotentialSpec{}, psi0, m).wave;

  auto mean_t = [](const GridWave& w) {
    double s0 = 0, s1 = 0;
    for (int i = 0; i < w.t.n; ++i) {
      const double rho = w.t.weight(i) * std::norm(w.data(i, 0));
      s0 += rho;
      s1 += rho * w.t.point(i);
    }
    return s1 / s0;
  };
  OracleRun out;
  out.delta_v = (mean_t(pulsed) - mean_t(free_run)) / (T3 - T_bar);

  const EvolvedComponent analytic =
      evolve_dipole_component(packet, p, imp, m, 0.0, T3);
  GridWave target = psi0;
  for (int i = 0; i < cfg.n_t; ++i)
    target.data(i, 0) =
        analytic.packet.amplitude_scale * analytic.packet.time_factor(target.t.point(i));
  out.mod_phase_l2 = rel_l2_error_mod_phase(pulsed, target);
  return out;
}
}  // namespace

int main() {
  std::printf("pulse-width sweep, p*E1bar = 0.05, T_bar = 1, T3 = 4 (expect dv -> -0.05)\n");
  double dv[3];
  double err[3];
  const double widths[3] = {0.1, 0.05, 0.025};
  for (int i = 0; i < 3; ++i) {
    const OracleRun r = run_pulse(widths[i], 8);
    dv[i] = r.delta_v;
    err[i] = r.mod_phase_l2;
    std::printf("  width %-6g  delta_v % .12f   mod-phase L2 vs impulsive %.6e\n",
                widths[i], r.delta_v, r.mod_phase_l2);
  }
  // linear extrapolation width -> 0 from the two smallest
  const double dv0 = 2.0 * dv[2] - dv[1];
  std::printf("  extrapolated delta_v     % .12f  (coefficient vs -p*E1bar/m: %.8f)\n",
              dv0, dv0 / (-0.05));
  std::printf("  L2 convergence orders: %.3f %.3f\n", std::log2(err[0] / err[1]),
              std::log2(err[1] / err[2]));

  const GaussianPacket4D packet = GaussianPacket4D::make(0, 0, 1.0, 0.4, 1.0, 1.0, 0.0);
  const NormalizationGrid grid = default_normalization_grid(packet, 1.0, 0.0, 2.0);
  const NormalizationResult free_norm = normalization_constant(
      free_kernel_separable(1.0, 0.0, 2.0), packet, 0.0, 2.0, grid);
  std::printf("free-kernel N_phi            %.12f\n", free_norm.n_phi);

  // unnormalized semiclassical free kernel, per-axis sqrt(m/dT) exp(iS)
  SeparableKernel4D vv;
  const double m = 1.0, dT = 2.0;
  vv.time = [m, dT](double a, double b) {
    return std::sqrt(m / dT) * std::exp(Amplitude(0, -m * (b - a) * (b - a) / (2 * dT)));
  };
  vv.space = [m, dT](double a, double b) {
    return std::sqrt(m / dT) * std::exp(Amplitude(0, m * (b - a) * (b - a) / (2 * dT)));
  };
  const NormalizationResult vv_norm =
      normalization_constant(vv, packet, 0.0, 2.0, grid);
  std::printf("van Vleck free N_phi         %.12f   (2 pi)^2 = %.12f\n", vv_norm.n_phi,
              4 * M_PI * M_PI);
  return 0;
}
