#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "tempath/grid.hpp"
#include "tempath/kernels.hpp"
#include "tempath/types.hpp"

namespace tempath {

// Brute-force Trotter-product oracle: propagate a sampled wave function
// over a t-grid (and optionally a (t,x) grid) by alternating the exact
// one-slice kinetic convolution with the potential phase exp(-i eps V).
// This is the independent check for every analytic kernel in the project.

enum class ConvolutionMethod { kDense, kSpectral };

struct LatticeConfig {
  int n_slices = 1;        // lab-time steps N
  double epsilon = 0.0;    // slice width; n_slices * epsilon = T'' - T'
  double T_start = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  int n_t = 0;
  int n_x = 0;  // 0 disables the space axis
  double x_min = 0.0;
  double x_max = 0.0;
  double reg_eta = 0.0;  // oscillatory-integral damping; Richardson pair {eta, eta/2}
  std::uint64_t seed = 0;
  ConvolutionMethod method = ConvolutionMethod::kDense;

  double T_end() const { return T_start + n_slices * epsilon; }
  Grid1D t_grid() const { return {t_min, t_max, n_t}; }
  Grid1D x_grid() const { return {x_min, x_max, n_x}; }
  void validate(double expected_span = -1.0) const;
};

struct PotentialSpec {
  enum class Kind { kFree, kLinearInTPulse };
  Kind kind = Kind::kFree;
  double E0 = 0.0;
  double E1 = 0.0;
  double T_start = 0.0;
  double T_end = 0.0;
  double dipole_p = 0.0;

  // V(t, x, T); the shipped pulse is x-independent: -p (E0 + E1 t) inside
  // the lab-time window.
  double value(double t, double /*x*/, double T) const {
    if (kind == Kind::kFree) return 0.0;
    if (T < T_start || T > T_end) return 0.0;
    return -dipole_p * (E0 + E1 * t);
  }
  std::function<double(double, double, double)> as_function() const {
    PotentialSpec copy = *this;
    return [copy](double t, double x, double T) { return copy.value(t, x, T); };
  }
};

// Sampled wave function: rows index the t-grid, columns the x-grid
// (single column when the x axis is disabled).
struct GridWave {
  Grid1D t;
  Grid1D x;          // valid only when has_x
  bool has_x = false;
  Eigen::MatrixXcd data;

  double norm_sq() const;
  void normalize();
};

GridWave sample_packet(const GaussianPacket4D& packet, const Grid1D& t_grid);
GridWave sample_packet_2d(const GaussianPacket4D& packet, const Grid1D& t_grid,
                          const Grid1D& x_grid);
// Sample a single-axis factor (used for x-only reference calculations).
GridWave sample_factor(const ComplexGaussian1D& f, const Grid1D& grid);

double rel_l2_error(const GridWave& a, const GridWave& b);
// L2 distance after aligning the global phase of a to b.
double rel_l2_error_mod_phase(const GridWave& a, const GridWave& b);

struct TrotterResult {
  GridWave wave;
  double max_leak = 0.0;         // boundary mass fraction, worst slice
  double richardson_diff = 0.0;  // |psi(eta) - psi(eta/2)| / |psi|, 0 if eta = 0
};

using PotentialFn = std::function<double(double t, double x, double T)>;

// Generic-potential propagation. time_axis_sign applies the time-kernel
// (+1, exponent -i m dt^2/2eps) along rows; the x axis (when present)
// always gets the space kernel. With reg_eta > 0 the kinetic kernels are
// damped by exp(-eta m du^2/eps) and the {eta, eta/2} pair is Richardson
// extrapolated to eta -> 0.
TrotterResult trotter_propagate(const LatticeConfig& config, const PotentialFn& V,
                                const GridWave& psi0, double m,
                                int time_axis_sign = +1);
TrotterResult trotter_propagate(const LatticeConfig& config,
                                const PotentialSpec& potential,
                                const GridWave& psi0, double m);

// The band-limited one-slice kernel sampled at grid offsets j*h,
// j = -(n-1) .. n-1 (offset + n-1 indexes the array). Exposed for tests.
std::vector<std::complex<double>> step_kernel(int time_axis_sign, double m,
                                              double eps, double eta, double h,
                                              int n);

// Numerical Chapman-Kolmogorov harness for the analytic one-axis kernels.
// For adjacent pairs of lab times, composes the kernel through a damped
// trapezoid quadrature over the intermediate coordinate (three dampings,
// Richardson extrapolated to zero damping) and returns the worst relative
// residual against the direct kernel.
struct ComposeCheckOptions {
  int time_axis_sign = +1;
  double eta = 2e-4;
  int samples_per_pair = 2;
  std::uint64_t seed = 7;
  long max_points = (1 << 23);
  int n_override = 0;  // force a (bad) point count; used to flag degenerate windows
};
double kernel_compose_check(double m, const std::vector<double>& T_points,
                            double t_window_lo, double t_window_hi,
                            const ComposeCheckOptions& opts = {});

// Fourier-mode path sampler: t(T) = straight line + sum a_n sin(omega_n (T-T')),
// omega_n = n pi / dT; a_n ~ N(0, (scale/n)^2). x follows the straight line.
struct PathEndpoints {
  double T1 = 0.0, t1 = 0.0, x1 = 0.0;
  double T2 = 0.0, t2 = 0.0, x2 = 0.0;
};

struct PathEnsemble {
  int n_modes = 0;
  double mode_scale = 0.0;
  std::vector<std::vector<double>> coefficients;
  std::vector<double> actions;
  std::vector<double> overshoot_fraction;
  double action_mean = 0.0;
  double action_var = 0.0;
};

PathEnsemble sample_fourier_paths(const LatticeConfig& config,
                                  const PathEndpoints& endpoints, int n_paths,
                                  int n_modes, double mode_scale, double m,
                                  const PotentialFn& V, int n_quad = 512);

// Free action of the straight-line path; the classical reference value.
double straight_line_free_action(double m, const PathEndpoints& e);

}  // namespace tempath
