#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace tempath {

// Probability amplitude. Probabilities are conj(K)*K.
using Amplitude = std::complex<double>;

// An event in 1+1 dimensions: the particle's own time coordinate t and
// position x, both in natural units (hbar = c = 1). t is distinct from the
// lab time T that indexes propagation; paths may carry t outside the lab
// window.
struct Event {
  double t = 0.0;
  double x = 0.0;
};

inline bool finite(const Amplitude& a) {
  return std::isfinite(a.real()) && std::isfinite(a.imag());
}

// Branch convention, fixed once: sqrt(-i) = exp(-i pi/4).
// The time-kernel prefactor sqrt(m / (-2 pi i dT)) then carries phase
// +pi/4 and the space prefactor sqrt(m / (2 pi i dT)) carries -pi/4,
// which makes the two kernels complex conjugates of each other.
inline const Amplitude kSqrtMinusI{std::sqrt(0.5), -std::sqrt(0.5)};
inline const Amplitude kSqrtPlusI{std::sqrt(0.5), std::sqrt(0.5)};

struct BoundaryLeak : std::runtime_error {
  explicit BoundaryLeak(const std::string& m) : std::runtime_error(m) {}
};
struct NonConvergent : std::runtime_error {
  explicit NonConvergent(const std::string& m) : std::runtime_error(m) {}
};
struct NoTrajectory : std::runtime_error {
  explicit NoTrajectory(const std::string& m) : std::runtime_error(m) {}
};
struct CausticError : std::runtime_error {
  explicit CausticError(const std::string& m) : std::runtime_error(m) {}
};
struct StepRejected : std::runtime_error {
  explicit StepRejected(const std::string& m) : std::runtime_error(m) {}
};
struct DetectorWindow : std::runtime_error {
  explicit DetectorWindow(const std::string& m) : std::runtime_error(m) {}
};
struct NonPositive : std::runtime_error {
  explicit NonPositive(const std::string& m) : std::runtime_error(m) {}
};
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace tempath
