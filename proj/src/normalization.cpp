#include "tempath/normalization.hpp"

#include <cmath>

namespace tempath {

SeparableKernel4D free_kernel_separable(double m, double T1, double T2) {
  SeparableKernel4D k;
  k.time = [m, T1, T2](double a, double b) { return free_time_kernel(m, T1, T2, a, b); };
  k.space = [m, T1, T2](double a, double b) {
    return free_space_kernel(m, T1, T2, a, b);
  };
  return k;
}

NormalizationGrid default_normalization_grid(const GaussianPacket4D& packet, double m,
                                             double T1, double T2, int n,
                                             double sigmas) {
  const GaussianPacket4D evolved = evolve_gaussian_free(packet, m, T1, T2);
  NormalizationGrid g;
  const double t_lo = std::min(packet.t_a() - sigmas * packet.sigma_t(),
                               evolved.t_a() - sigmas * evolved.sigma_t());
  const double t_hi = std::max(packet.t_a() + sigmas * packet.sigma_t(),
                               evolved.t_a() + sigmas * evolved.sigma_t());
  const double x_lo = std::min(packet.x_a() - sigmas * packet.sigma_x(),
                               evolved.x_a() - sigmas * evolved.sigma_x());
  const double x_hi = std::max(packet.x_a() + sigmas * packet.sigma_x(),
                               evolved.x_a() + sigmas * evolved.sigma_x());
  g.t = {t_lo, t_hi, n};
  g.x = {x_lo, x_hi, n};
  return g;
}

namespace {
Eigen::VectorXcd apply_axis(const AxisKernelFn& kernel, const ComplexGaussian1D& f,
                            const Grid1D& grid) {
  Eigen::VectorXcd in(grid.n), out(grid.n);
  for (int j = 0; j < grid.n; ++j) in(j) = f(grid.point(j));
  for (int i = 0; i < grid.n; ++i) {
    const double to = grid.point(i);
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < grid.n; ++j)
      acc += grid.weight(j) * kernel(grid.point(j), to) * in(j);
    out(i) = acc;
  }
  return out;
}

double axis_norm_sq(const Eigen::VectorXcd& v, const Grid1D& grid) {
  double s = 0.0;
  for (int i = 0; i < grid.n; ++i) s += grid.weight(i) * std::norm(v(i));
  return s;
}

void check_axis_leak(const Eigen::VectorXcd& v, const Grid1D& grid, const char* who) {
  const int guard = std::max(1, grid.n / 32);
  double edge = 0.0;
  const double total = axis_norm_sq(v, grid);
  for (int i = 0; i < grid.n; ++i)
    if (i < guard || i >= grid.n - guard) edge += grid.weight(i) * std::norm(v(i));
  if (total > 0.0 && edge > 1e-10 * total)
    throw BoundaryLeak(std::string(who) + ": evolved mass at the window edge");
}
}  // namespace

double SampledWave4D::norm_sq() const {
  return std::norm(scale) * axis_norm_sq(f_t, t) * axis_norm_sq(f_x, x);
}

NormalizationResult normalization_constant(const SeparableKernel4D& kernel,
                                           const GaussianPacket4D& packet, double T1,
                                           double T2, const NormalizationGrid& grid) {
  if (!(T2 > T1)) throw std::domain_error("normalization_constant: requires T2 > T1");
  grid.t.validate();
  grid.x.validate();

  const Eigen::VectorXcd ft = apply_axis(kernel.time, packet.time_factor, grid.t);
  const Eigen::VectorXcd fx = apply_axis(kernel.space, packet.space_factor, grid.x);
  check_axis_leak(ft, grid.t, "normalization_constant[t]");
  check_axis_leak(fx, grid.x, "normalization_constant[x]");

  const double n_phi = std::norm(packet.amplitude_scale * kernel.scale) *
                       axis_norm_sq(ft, grid.t) * axis_norm_sq(fx, grid.x);
  if (!std::isfinite(n_phi) || n_phi <= 0.0)
    throw NonPositive("normalization_constant: N_phi <= 0");

  NormalizationResult res;
  res.n_phi = n_phi;
  res.normalized_scale = Amplitude(1.0 / std::sqrt(n_phi), 0.0);
  // Residual of the rescaled evolution, recomputed from the pieces.
  res.residual = std::abs(n_phi * std::norm(res.normalized_scale) - 1.0);
  if (res.residual > 1e-8)
    throw NonConvergent("normalization_constant: residual above 1e-8");
  return res;
}

SampledWave4D normalized_evolve(const SeparableKernel4D& kernel,
                                const GaussianPacket4D& packet, double T1, double T2,
                                const NormalizationGrid& grid) {
  const NormalizationResult norm = normalization_constant(kernel, packet, T1, T2, grid);
  SampledWave4D w;
  w.t = grid.t;
  w.x = grid.x;
  w.f_t = apply_axis(kernel.time, packet.time_factor, grid.t);
  w.f_x = apply_axis(kernel.space, packet.space_factor, grid.x);
  w.scale = packet.amplitude_scale * kernel.scale * norm.normalized_scale;
  return w;
}

double rel_l2_error(const SampledWave4D& a, const SampledWave4D& b) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < a.t.n; ++i)
    for (int j = 0; j < a.x.n; ++j) {
      const double w = a.t.weight(i) * a.x.weight(j);
      num += w * std::norm(a.value(i, j) - b.value(i, j));
      den += w * std::norm(b.value(i, j));
    }
  return std::sqrt(num / den);
}

}  // namespace tempath
