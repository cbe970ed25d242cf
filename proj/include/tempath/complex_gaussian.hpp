#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "tempath/types.hpp"

namespace tempath {

// One complex-Gaussian factor  f(u) = exp(gamma + beta*u - alpha*u^2),
// Re(alpha) > 0.  The family is closed under multiplication by linear
// phases and under application of the free Gaussian kernels, so free and
// impulsive-dipole evolution stay exact in this representation.
//
// |f|^2 = exp(2 Re gamma + 2 Re beta u - 2 Re alpha u^2) is a Gaussian with
//   mean      = Re beta / (2 Re alpha)
//   variance  = 1 / (4 Re alpha)
// and the amplitude-convention width sigma (f ~ exp(-(u-c)^2/(2 sigma^2)))
// is sigma = 1/sqrt(2 Re alpha), i.e. variance = sigma^2/2.
class ComplexGaussian1D {
 public:
  std::complex<double> alpha{0.5, 0.0};
  std::complex<double> beta{0.0, 0.0};
  std::complex<double> gamma{0.0, 0.0};

  // Normalized packet exp(-(u-c)^2/(2 sigma^2) + i s k (u-c)) / (pi sigma^2)^{1/4},
  // where s = +1 gives a space-like phase e^{+ik(u-c)} and s = -1 a
  // time-like phase e^{-i omega (u-c)}.
  static ComplexGaussian1D packet(double center, double carrier, double sigma,
                                  int phase_sign) {
    if (!(sigma > 0.0)) throw std::domain_error("ComplexGaussian1D: sigma must be > 0");
    ComplexGaussian1D g;
    const std::complex<double> ik(0.0, phase_sign > 0 ? carrier : -carrier);
    g.alpha = {1.0 / (2.0 * sigma * sigma), 0.0};
    g.beta = std::complex<double>(center / (sigma * sigma), 0.0) + ik;
    g.gamma = std::complex<double>(-center * center / (2.0 * sigma * sigma), 0.0) -
              ik * center - 0.25 * std::log(M_PI * sigma * sigma);
    return g;
  }

  double mean() const { return beta.real() / (2.0 * alpha.real()); }
  double variance() const { return 1.0 / (4.0 * alpha.real()); }
  double sigma() const { return 1.0 / std::sqrt(2.0 * alpha.real()); }

  // d(arg f)/du at u; the local wavenumber of the factor.
  double phase_slope(double u) const { return beta.imag() - 2.0 * alpha.imag() * u; }
  // Carrier at the packet center: +slope for space factors (k), -slope for
  // time factors (omega, e^{-i omega t} convention).
  double carrier(int phase_sign) const {
    return (phase_sign > 0 ? 1.0 : -1.0) * phase_slope(mean());
  }

  std::complex<double> operator()(double u) const {
    return std::exp(gamma + beta * u - alpha * u * u);
  }

  // integral |f|^2 du
  double norm_sq() const {
    const double ra = alpha.real(), rb = beta.real(), rg = gamma.real();
    return std::exp(2.0 * rg + rb * rb / (2.0 * ra)) * std::sqrt(M_PI / (2.0 * ra));
  }

  void normalize() { gamma -= 0.5 * std::log(norm_sq()); }

  void scale(std::complex<double> c) { gamma += std::log(c); }
  void add_linear_phase(double c) { beta += std::complex<double>(0.0, c); }
  void add_const_phase(double c) { gamma += std::complex<double>(0.0, c); }

  // Apply the free one-axis kernel over lab interval dT:
  //   time axis  (sign=+1): sqrt(m/(-2 pi i dT)) exp(-i m (u'-u)^2 / (2 dT))
  //   space axis (sign=-1): sqrt(m/(+2 pi i dT)) exp(+i m (u'-u)^2 / (2 dT))
  void apply_free_kernel(int time_sign, double m, double dT) {
    if (!(dT > 0.0)) throw std::domain_error("apply_free_kernel: dT must be > 0");
    const std::complex<double> kA(0.0, time_sign > 0 ? m / (2.0 * dT) : -m / (2.0 * dT));
    const std::complex<double> prefactor =
        std::sqrt(m / (2.0 * M_PI * dT)) * (time_sign > 0 ? kSqrtPlusI : kSqrtMinusI);
    const std::complex<double> denom = alpha + kA;  // Re(denom) = Re(alpha) > 0
    const std::complex<double> new_alpha = kA * alpha / denom;
    const std::complex<double> new_beta = kA * beta / denom;
    const std::complex<double> new_gamma = gamma + beta * beta / (4.0 * denom) +
                                           std::log(prefactor) +
                                           0.5 * (std::log(M_PI) - std::log(denom));
    alpha = new_alpha;
    beta = new_beta;
    gamma = new_gamma;
  }
};

}  // namespace tempath
