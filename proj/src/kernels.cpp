#include "tempath/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace tempath {

namespace {
void require_ordered(double T1, double T2, const char* who) {
  if (!(T2 > T1)) throw std::domain_error(std::string(who) + ": requires T2 > T1");
}
}  // namespace

Amplitude free_time_kernel(double m, double T1, double T2, double t1, double t2) {
  require_ordered(T1, T2, "free_time_kernel");
  if (!(m > 0.0)) throw std::domain_error("free_time_kernel: requires m > 0");
  const double dT = T2 - T1;
  const double dt = t2 - t1;
  const Amplitude phase = std::exp(Amplitude(0.0, -m * dt * dt / (2.0 * dT)));
  return std::sqrt(m / (2.0 * M_PI * dT)) * kSqrtPlusI * phase;
}

Amplitude free_space_kernel(double m, double T1, double T2, double x1, double x2) {
  require_ordered(T1, T2, "free_space_kernel");
  if (!(m > 0.0)) throw std::domain_error("free_space_kernel: requires m > 0");
  const double dT = T2 - T1;
  const double dx = x2 - x1;
  const Amplitude phase = std::exp(Amplitude(0.0, m * dx * dx / (2.0 * dT)));
  return std::sqrt(m / (2.0 * M_PI * dT)) * kSqrtMinusI * phase;
}

Amplitude free_kernel_4d(double m, double T1, double T2, const Event& e1,
                         const Event& e2) {
  return free_time_kernel(m, T1, T2, e1.t, e2.t) *
         free_space_kernel(m, T1, T2, e1.x, e2.x);
}

GaussianPacket4D GaussianPacket4D::make(double t_a, double x_a, double omega_a,
                                        double k_a, double sigma_t, double sigma_x,
                                        double lab_time) {
  if (!(sigma_t > 0.0) || !(sigma_x > 0.0))
    throw std::domain_error("GaussianPacket4D: sigma_t and sigma_x must be > 0");
  GaussianPacket4D p;
  p.time_factor = ComplexGaussian1D::packet(t_a, omega_a, sigma_t, -1);
  p.space_factor = ComplexGaussian1D::packet(x_a, k_a, sigma_x, +1);
  p.amplitude_scale = {1.0, 0.0};
  p.lab_time = lab_time;
  return p;
}

GaussianPacket4D evolve_gaussian_free(const GaussianPacket4D& packet, double m,
                                      double T1, double T2) {
  if (!(T2 > T1)) throw std::domain_error("evolve_gaussian_free: requires T2 > T1");
  const double dT = T2 - T1;
  GaussianPacket4D out = packet;
  out.time_factor.apply_free_kernel(+1, m, dT);
  out.space_factor.apply_free_kernel(-1, m, dT);
  out.lab_time = T2;
  return out;
}

double packet_probability_density(const GaussianPacket4D& packet, double t, double x) {
  return std::norm(packet.amplitude(t, x));
}

namespace {
// Trapezoid moments of one marginal |f|^2 over center +- w sigmas.
struct AxisMoments {
  double mass, mean, var;
};
AxisMoments axis_moments(const ComplexGaussian1D& f, double window_sigmas, int n) {
  const double c = f.mean();
  const double w = window_sigmas * f.sigma();
  const double h = 2.0 * w / (n - 1);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = c - w + i * h;
    const double rho = std::norm(f(u));
    const double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    s0 += wgt * rho;
    s1 += wgt * rho * u;
    s2 += wgt * rho * u * u;
  }
  s0 *= h;
  s1 *= h;
  s2 *= h;
  const double mean = s1 / s0;
  return {s0, mean, s2 / s0 - mean * mean};
}
}  // namespace

Moments packet_moments(const GaussianPacket4D& packet, const MomentsOptions& opts) {
  const AxisMoments mt =
      axis_moments(packet.time_factor, opts.window_sigmas, opts.points_per_axis);
  const AxisMoments mx =
      axis_moments(packet.space_factor, opts.window_sigmas, opts.points_per_axis);
  const double scale = std::norm(packet.amplitude_scale);
  const double inside = scale * mt.mass * mx.mass;
  const double total = packet.total_norm_sq();
  if (std::abs(total - inside) > 1e-10 * total)
    throw NonConvergent("packet_moments: tail mass outside quadrature window");
  Moments m;
  m.mean_t = mt.mean;
  m.mean_x = mx.mean;
  m.var_t = mt.var;
  m.var_x = mx.var;
  m.lab_time = mt.mean;
  m.norm = inside;
  return m;
}

}  // namespace tempath
