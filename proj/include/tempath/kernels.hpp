#pragma once

#include <complex>

#include "tempath/complex_gaussian.hpp"
#include "tempath/types.hpp"

namespace tempath {

// Closed-form free kernels in 1 time + 1 space dimension, natural units.
//
// The 4D kernel factors into a time piece and a space piece,
//   K4 = K^(t) * K^(x),
// with opposite kinetic signs (metric signature +,-):
//   K^(t)(t2,t1) = sqrt(m/(-2 pi i dT)) exp(-i m (t2-t1)^2 / (2 dT))
//   K^(x)(x2,x1) = sqrt(m/(+2 pi i dT)) exp(+i m (x2-x1)^2 / (2 dT))
// Branch: sqrt(-i) = e^{-i pi/4}, so K^(t) = conj(K^(x)) at equal arguments;
// consequently conj(K4(e1;e2)) = K4(swap e1; swap e2) with swap(t,x)=(x,t),
// and K4 is symmetric under endpoint exchange.

Amplitude free_time_kernel(double m, double T1, double T2, double t1, double t2);
Amplitude free_space_kernel(double m, double T1, double T2, double x1, double x2);
Amplitude free_kernel_4d(double m, double T1, double T2, const Event& e1,
                         const Event& e2);

// A 4D Gaussian test function, the product of a time factor and a space
// factor:
//   phi(t,x) = scale * f_t(t) * f_x(x)
// prepared as
//   (pi s_t^2)^{-1/4} (pi s_x^2)^{-1/4}
//     exp(-(t-t_a)^2/(2 s_t^2) - i omega_a (t-t_a))
//     exp(-(x-x_a)^2/(2 s_x^2) + i k_a (x-x_a)).
// Free/impulsive evolution keeps the product form; the factors' complex
// widths are tracked exactly and the reported sigmas are derived from the
// probability density.
struct GaussianPacket4D {
  ComplexGaussian1D time_factor;
  ComplexGaussian1D space_factor;
  Amplitude amplitude_scale{1.0, 0.0};
  double lab_time = 0.0;
  // Marks a packet meant as the sigma_t -> 0 (three-dimensional) limit;
  // the stored sigma_t stays positive, consumers treat the time factor as
  // collapsed.
  bool sigma_t_limit = false;

  static GaussianPacket4D make(double t_a, double x_a, double omega_a, double k_a,
                               double sigma_t, double sigma_x, double lab_time);

  double t_a() const { return time_factor.mean(); }
  double x_a() const { return space_factor.mean(); }
  double omega_a() const { return time_factor.carrier(-1); }
  double k_a() const { return space_factor.carrier(+1); }
  // Probability-density standard deviations are sigma/sqrt(2) in this
  // width convention; sigma_t/sigma_x report the convention width.
  double sigma_t() const { return time_factor.sigma(); }
  double sigma_x() const { return space_factor.sigma(); }

  Amplitude amplitude(double t, double x) const {
    return amplitude_scale * time_factor(t) * space_factor(x);
  }
  double total_norm_sq() const {
    return std::norm(amplitude_scale) * time_factor.norm_sq() * space_factor.norm_sq();
  }
};

struct Moments {
  double mean_t = 0.0;
  double mean_x = 0.0;
  double var_t = 0.0;
  double var_x = 0.0;
  double lab_time = 0.0;  // = mean_t
  double norm = 0.0;
};

// Exact free evolution of a Gaussian packet from lab time T1 to T2.
GaussianPacket4D evolve_gaussian_free(const GaussianPacket4D& packet, double m,
                                      double T1, double T2);

double packet_probability_density(const GaussianPacket4D& packet, double t, double x);

struct MomentsOptions {
  double window_sigmas = 10.0;
  int points_per_axis = 4096;
};

// Moments by trapezoid quadrature over +-10 sigma per axis.  Throws
// NonConvergent if the mass outside the window exceeds 1e-10 of the total.
Moments packet_moments(const GaussianPacket4D& packet,
                       const MomentsOptions& opts = {});

}  // namespace tempath
