#include <doctest.h>

#include <cmath>
#include <complex>

#include "tempath/lattice.hpp"

using namespace tempath;

namespace {
GaussianPacket4D test_packet() {
  return GaussianPacket4D::make(0.0, 0.0, 1.0, 0.4, 1.0, 1.0, 0.0);
}

LatticeConfig free_config(int n_slices, double span, int n_t,
                          double window = 18.0) {
  LatticeConfig cfg;
  cfg.n_slices = n_slices;
  cfg.epsilon = span / n_slices;
  cfg.T_start = 0.0;
  cfg.t_min = -window;
  cfg.t_max = window + span;  // drift allowance: <t> moves with omega/m = 1
  cfg.n_t = n_t;
  return cfg;
}

// Direct quadrature application of the analytic one-step kernel.
GridWave apply_analytic_time_kernel(const GridWave& in, double m, double T1, double T2) {
  GridWave out = in;
  for (int i = 0; i < in.t.n; ++i) {
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < in.t.n; ++j)
      acc += in.t.weight(j) *
             free_time_kernel(m, T1, T2, in.t.point(j), in.t.point(i)) * in.data(j, 0);
    out.data(i, 0) = acc;
  }
  return out;
}
}  // namespace

TEST_CASE("one-slice propagation equals a single analytic kernel application") {
  const GaussianPacket4D p = test_packet();
  LatticeConfig cfg = free_config(1, 1.0, 1024);
  GridWave psi0 = sample_packet(p, cfg.t_grid());
  const TrotterResult lattice = trotter_propagate(cfg, PotentialSpec{}, psi0, 1.0);
  const GridWave direct = apply_analytic_time_kernel(psi0, 1.0, 0.0, 1.0);
  CHECK(rel_l2_error(lattice.wave, direct) < 1e-12);
}

TEST_CASE("free Trotter propagation matches the closed-form evolution") {
  const double m = 1.0, span = 1.0;
  const GaussianPacket4D p = test_packet();
  const GaussianPacket4D q = evolve_gaussian_free(p, m, 0.0, span);

  LatticeConfig cfg = free_config(256, span, 1024);
  GridWave psi0 = sample_packet(p, cfg.t_grid());
  const TrotterResult res = trotter_propagate(cfg, PotentialSpec{}, psi0, m);

  GridWave target = psi0;
  for (int i = 0; i < cfg.n_t; ++i)
    target.data(i, 0) = q.amplitude_scale * q.time_factor(target.t.point(i));

  CHECK(rel_l2_error(res.wave, target) < 1e-6);
  CHECK(res.max_leak < 1e-10);
}

TEST_CASE("mass conservation: free norm drift below 1e-9 per slice") {
  LatticeConfig cfg = free_config(64, 1.0, 512);
  GridWave psi0 = sample_packet(test_packet(), cfg.t_grid());
  const double n0 = psi0.norm_sq();
  const TrotterResult res = trotter_propagate(cfg, PotentialSpec{}, psi0, 1.0);
  CHECK(std::abs(res.wave.norm_sq() - n0) / n0 < 1e-9 * cfg.n_slices);
}

TEST_CASE("convergence vs slice count: error O(eps) or better, reported") {
  const double m = 1.0, span = 1.0;
  const GaussianPacket4D q = evolve_gaussian_free(test_packet(), m, 0.0, span);
  double prev_err = 1e9;
  for (int n_slices : {64, 128, 256}) {
    LatticeConfig cfg = free_config(n_slices, span, 512);
    GridWave psi0 = sample_packet(test_packet(), cfg.t_grid());
    const TrotterResult res = trotter_propagate(cfg, PotentialSpec{}, psi0, m);
    GridWave target = psi0;
    for (int i = 0; i < cfg.n_t; ++i)
      target.data(i, 0) = q.amplitude_scale * q.time_factor(target.t.point(i));
    const double err = rel_l2_error(res.wave, target);
    MESSAGE("N=", n_slices, " rel L2 err=", err);
    CHECK(err <= prev_err * 1.05 + 1e-12);  // never worse than halving the step allows
    CHECK(err < 1e-9);                      // the free step is exact on the band
    prev_err = err;
  }
}

TEST_CASE("spectral convolution path matches the dense default") {
  LatticeConfig cfg = free_config(32, 0.5, 512);
  GridWave psi0 = sample_packet(test_packet(), cfg.t_grid());
  const TrotterResult dense = trotter_propagate(cfg, PotentialSpec{}, psi0, 1.0);
  cfg.method = ConvolutionMethod::kSpectral;
  const TrotterResult spectral = trotter_propagate(cfg, PotentialSpec{}, psi0, 1.0);
  CHECK(rel_l2_error(spectral.wave, dense.wave) < 1e-10);
}

TEST_CASE("regularization independence after Richardson extrapolation") {
  const double m = 1.0;
  LatticeConfig cfg = free_config(16, 0.5, 512);
  GridWave psi0 = sample_packet(test_packet(), cfg.t_grid());

  cfg.reg_eta = 1e-4;
  const TrotterResult a = trotter_propagate(cfg, PotentialSpec{}, psi0, m);
  cfg.reg_eta = 5e-5;
  const TrotterResult b = trotter_propagate(cfg, PotentialSpec{}, psi0, m);
  CHECK(rel_l2_error(a.wave, b.wave) < 1e-6);
  CHECK(a.richardson_diff > 0.0);
}

TEST_CASE("boundary leak raises when the grid is too small") {
  LatticeConfig cfg = free_config(64, 4.0, 256, /*window=*/4.0);
  GridWave psi0 = sample_packet(test_packet(), cfg.t_grid());
  CHECK_THROWS_AS(trotter_propagate(cfg, PotentialSpec{}, psi0, 1.0), BoundaryLeak);
}

TEST_CASE("Chapman-Kolmogorov residuals") {
  SUBCASE("time kernel, three equal slices") {
    const double r =
        kernel_compose_check(1.0, {0.0, 1.0 / 3, 2.0 / 3, 1.0}, -1.0, 1.0, {});
    CHECK(r < 1e-8);
  }
  SUBCASE("space kernel, random split") {
    ComposeCheckOptions opts;
    opts.time_axis_sign = -1;
    opts.seed = 99;
    const double r = kernel_compose_check(1.0, {0.0, 0.37, 1.0}, -1.5, 1.5, opts);
    CHECK(r < 1e-8);
  }
  SUBCASE("degenerate quadrature is flagged, not silently wrong") {
    ComposeCheckOptions opts;
    opts.n_override = 3;  // single interior point
    const double r = kernel_compose_check(1.0, {0.0, 0.5, 1.0}, -1.0, 1.0, opts);
    CHECK(r > 1e-3);
  }
}

TEST_CASE("Fourier path sampler") {
  LatticeConfig cfg;
  cfg.seed = 42;
  cfg.n_slices = 1;
  cfg.epsilon = 1.0;
  cfg.t_min = -1;
  cfg.t_max = 2;
  cfg.n_t = 2;
  PathEndpoints ends{0.0, 0.0, 0.0, 1.0, 1.0, 0.5};
  const PotentialFn free_v = [](double, double, double) { return 0.0; };

  SUBCASE("zero amplitude reproduces the straight-line free action") {
    const PathEnsemble ens =
        sample_fourier_paths(cfg, ends, 4, 3, /*mode_scale=*/0.0, 1.0, free_v, 2048);
    const double exact = straight_line_free_action(1.0, ends);
    for (double s : ens.actions) CHECK(s == doctest::Approx(exact).epsilon(1e-8));
    for (double f : ens.overshoot_fraction) CHECK(f == 0.0);
  }

  SUBCASE("determinism: same seed, bit-identical ensembles") {
    const PathEnsemble a = sample_fourier_paths(cfg, ends, 16, 5, 0.3, 1.0, free_v);
    const PathEnsemble b = sample_fourier_paths(cfg, ends, 16, 5, 0.3, 1.0, free_v);
    REQUIRE(a.coefficients.size() == b.coefficients.size());
    for (std::size_t i = 0; i < a.coefficients.size(); ++i) {
      CHECK(a.actions[i] == b.actions[i]);
      CHECK(a.coefficients[i] == b.coefficients[i]);
    }
  }

  SUBCASE("overshoot shrinks with the mode amplitude") {
    double prev = 1.0;
    for (double scale : {0.8, 0.4, 0.2, 0.1}) {
      const PathEnsemble ens =
          sample_fourier_paths(cfg, ends, 64, 8, scale, 1.0, free_v);
      double mean_over = 0.0;
      for (double f : ens.overshoot_fraction) mean_over += f;
      mean_over /= static_cast<double>(ens.overshoot_fraction.size());
      CHECK(mean_over <= prev + 1e-12);
      prev = mean_over;
    }
  }

  SUBCASE("the stationary path minimizes |S - S_classical|") {
    const double s_classical = straight_line_free_action(1.0, ends);
    const PathEnsemble ens =
        sample_fourier_paths(cfg, ends, 64, 6, 0.5, 1.0, free_v, 2048);
    for (double s : ens.actions) {
      // time modes push the action down (negative-definite kinetic sign)
      CHECK(s <= s_classical + 1e-8);
    }
    // quadratic response: |S - S_cl| matches the exact mode sum
    for (std::size_t i = 0; i < ens.coefficients.size(); ++i) {
      double mode_sum = 0.0;
      for (int nmode = 1; nmode <= ens.n_modes; ++nmode) {
        const double w = nmode * M_PI / (ends.T2 - ends.T1);
        const double an = ens.coefficients[i][static_cast<std::size_t>(nmode - 1)];
        mode_sum += 0.25 * an * an * w * w * (ends.T2 - ends.T1);
      }
      CHECK(std::abs((s_classical - ens.actions[i]) - mode_sum) <
            1e-6 * (1.0 + mode_sum));
    }
  }
}
