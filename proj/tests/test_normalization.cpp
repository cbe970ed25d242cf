#include <doctest.h>

#include <cmath>
#include <random>

#include "tempath/dipole.hpp"
#include "tempath/lattice.hpp"
#include "tempath/normalization.hpp"

using namespace tempath;

namespace {
GaussianPacket4D probe_packet() {
  return GaussianPacket4D::make(0.0, 0.0, 1.0, 0.4, 1.0, 1.0, 0.0);
}
}  // namespace

TEST_CASE("free kernel normalization constant is 1 (frozen regression)") {
  const GaussianPacket4D p = probe_packet();
  const NormalizationGrid grid = default_normalization_grid(p, 1.0, 0.0, 2.0, 4096);
  const NormalizationResult res = normalization_constant(
      free_kernel_separable(1.0, 0.0, 2.0), p, 0.0, 2.0, grid);
  CHECK(res.n_phi == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.residual < 1e-8);
}

TEST_CASE("unnormalized semiclassical free kernel gives (2 pi)^2") {
  // the 1+1 D counterpart of the paper's (2 pi)^4
  const double m = 1.0, dT = 2.0;
  SeparableKernel4D vv;
  vv.time = [m, dT](double a, double b) {
    return std::sqrt(m / dT) * std::exp(Amplitude(0, -m * (b - a) * (b - a) / (2 * dT)));
  };
  vv.space = [m, dT](double a, double b) {
    return std::sqrt(m / dT) * std::exp(Amplitude(0, m * (b - a) * (b - a) / (2 * dT)));
  };
  const GaussianPacket4D p = probe_packet();
  const NormalizationGrid grid = default_normalization_grid(p, m, 0.0, dT, 2048);
  const NormalizationResult res = normalization_constant(vv, p, 0.0, dT, grid);
  CHECK(res.n_phi == doctest::Approx(4.0 * M_PI * M_PI).epsilon(1e-7));
}

TEST_CASE("homogeneity: N_{cK} = |c|^2 N_K, normalized evolution invariant") {
  const GaussianPacket4D p = probe_packet();
  const NormalizationGrid grid = default_normalization_grid(p, 1.0, 0.0, 1.5, 1024);
  const SeparableKernel4D base = free_kernel_separable(1.0, 0.0, 1.5);
  const NormalizationResult ref = normalization_constant(base, p, 0.0, 1.5, grid);
  const SampledWave4D ref_wave = normalized_evolve(base, p, 0.0, 1.5, grid);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mag(0.1, 4.0), ang(-M_PI, M_PI);
  for (int k = 0; k < 5; ++k) {
    const Amplitude c = std::polar(mag(rng), ang(rng));
    SeparableKernel4D scaled = base;
    scaled.scale = c;
    const NormalizationResult res = normalization_constant(scaled, p, 0.0, 1.5, grid);
    CHECK(res.n_phi == doctest::Approx(std::norm(c) * ref.n_phi).epsilon(1e-10));
    const SampledWave4D wave = normalized_evolve(scaled, p, 0.0, 1.5, grid);
    for (int i = 0; i < 64; ++i) {
      const int j = i * 15;
      CHECK(std::abs(wave.value(j, j)) ==
            doctest::Approx(std::abs(ref_wave.value(j, j))).epsilon(1e-10));
    }
  }
}

TEST_CASE("idempotence: normalizing a normalized kernel returns scale 1") {
  const GaussianPacket4D p = probe_packet();
  const NormalizationGrid grid = default_normalization_grid(p, 1.0, 0.0, 1.0, 1024);
  SeparableKernel4D k = free_kernel_separable(1.0, 0.0, 1.0);
  const NormalizationResult first = normalization_constant(k, p, 0.0, 1.0, grid);
  k.scale *= first.normalized_scale;
  const NormalizationResult second = normalization_constant(k, p, 0.0, 1.0, grid);
  CHECK(std::abs(second.n_phi - 1.0) < 1e-10);
}

TEST_CASE("normalized free evolution matches the closed-form route") {
  const GaussianPacket4D p = probe_packet();
  const double m = 1.0, T2 = 2.0;
  const NormalizationGrid grid = default_normalization_grid(p, m, 0.0, T2, 2048);
  const SampledWave4D via_kernel =
      normalized_evolve(free_kernel_separable(m, 0.0, T2), p, 0.0, T2, grid);
  CHECK(std::abs(via_kernel.norm_sq() - 1.0) < 1e-8);

  const GaussianPacket4D q = evolve_gaussian_free(p, m, 0.0, T2);
  SampledWave4D closed = via_kernel;
  for (int i = 0; i < grid.t.n; ++i) closed.f_t(i) = q.time_factor(grid.t.point(i));
  for (int j = 0; j < grid.x.n; ++j) closed.f_x(j) = q.space_factor(grid.x.point(j));
  closed.scale = q.amplitude_scale;
  CHECK(rel_l2_error(via_kernel, closed) < 1e-7);
}

TEST_CASE("a pure phase on the time factor cancels out during normalization") {
  const GaussianPacket4D p = probe_packet();
  const NormalizationGrid grid = default_normalization_grid(p, 1.0, 0.0, 1.0, 1024);
  const SeparableKernel4D base = free_kernel_separable(1.0, 0.0, 1.0);
  SeparableKernel4D phased = base;
  const AxisKernelFn base_time = base.time;
  phased.time = [base_time](double a, double b) {
    return base_time(a, b) * std::exp(Amplitude(0.0, 0.7));
  };
  const SampledWave4D w0 = normalized_evolve(base, p, 0.0, 1.0, grid);
  const SampledWave4D w1 = normalized_evolve(phased, p, 0.0, 1.0, grid);
  CHECK(std::abs(w1.norm_sq() - 1.0) < 1e-8);
  for (int i = 0; i < grid.t.n; i += 37)
    for (int j = 0; j < grid.x.n; j += 61)
      CHECK(std::norm(w1.value(i, j)) ==
            doctest::Approx(std::norm(w0.value(i, j))).epsilon(1e-10));
}

TEST_CASE("error paths: boundary leak and non-positive constants") {
  const GaussianPacket4D p = probe_packet();
  NormalizationGrid tiny;
  tiny.t = {-1.0, 1.0, 256};  // far too small for the evolved image
  tiny.x = {-1.0, 1.0, 256};
  CHECK_THROWS_AS(normalization_constant(free_kernel_separable(1.0, 0.0, 2.0), p, 0.0,
                                         2.0, tiny),
                  BoundaryLeak);

  SeparableKernel4D dead;
  dead.time = [](double, double) { return Amplitude(0.0, 0.0); };
  dead.space = [](double, double) { return Amplitude(0.0, 0.0); };
  const NormalizationGrid grid = default_normalization_grid(p, 1.0, 0.0, 1.0, 256);
  CHECK_THROWS_AS(normalization_constant(dead, p, 0.0, 1.0, grid), NonPositive);
}

TEST_CASE("decoupling: separable potentials leave the x-marginal at the x-only result") {
  // V(t,x,T) = V_t(t) + V_x(x) inside a window; 2D propagation stays a
  // product, so the normalized x-marginal equals the 1D x-only run.
  const double m = 1.0, span = 1.0;
  const GaussianPacket4D p = probe_packet();

  LatticeConfig cfg;
  cfg.n_slices = 32;
  cfg.epsilon = span / cfg.n_slices;
  cfg.T_start = 0.0;
  cfg.t_min = -14.0;
  cfg.t_max = 15.0;
  cfg.n_t = 256;
  cfg.n_x = 256;
  cfg.x_min = -14.0;
  cfg.x_max = 15.0;
  cfg.method = ConvolutionMethod::kSpectral;

  const PotentialFn v2d = [](double t, double x, double T) {
    if (T < 0.25 || T > 0.75) return 0.0;
    return -0.4 * t + 0.2 * x;
  };
  GridWave psi0 = sample_packet_2d(p, cfg.t_grid(), cfg.x_grid());
  GridWave evolved = trotter_propagate(cfg, v2d, psi0, m).wave;
  evolved.normalize();

  // x-only reference on the same axis
  const PotentialFn vx = [](double x, double, double T) {
    if (T < 0.25 || T > 0.75) return 0.0;
    return 0.2 * x;
  };
  GridWave psix = sample_factor(p.space_factor, cfg.x_grid());
  LatticeConfig cfg1 = cfg;
  cfg1.t_min = cfg.x_min;
  cfg1.t_max = cfg.x_max;
  cfg1.n_t = cfg.n_x;
  cfg1.n_x = 0;
  GridWave ref = trotter_propagate(cfg1, vx, psix, m, /*time_axis_sign=*/-1).wave;
  ref.normalize();

  // compare normalized x-marginals
  std::vector<double> marginal(static_cast<std::size_t>(cfg.n_x), 0.0);
  double total = 0.0;
  for (int j = 0; j < cfg.n_x; ++j) {
    for (int i = 0; i < cfg.n_t; ++i)
      marginal[static_cast<std::size_t>(j)] +=
          cfg.t_grid().weight(i) * std::norm(evolved.data(i, j));
    total += cfg.x_grid().weight(j) * marginal[static_cast<std::size_t>(j)];
  }
  double max_rel = 0.0;
  for (int j = 0; j < cfg.n_x; ++j) {
    const double a = marginal[static_cast<std::size_t>(j)] / total;
    const double b = std::norm(ref.data(j, 0));
    if (b > 1e-12) max_rel = std::max(max_rel, std::abs(a - b) / b);
  }
  CHECK(max_rel < 1e-6);
}
