#include "tempath/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tempath/fft.hpp"

namespace tempath {

void LatticeConfig::validate(double expected_span) const {
  if (n_slices < 1) throw std::domain_error("LatticeConfig: n_slices >= 1");
  if (!(epsilon > 0.0)) throw std::domain_error("LatticeConfig: epsilon > 0");
  if (reg_eta < 0.0) throw std::domain_error("LatticeConfig: reg_eta >= 0");
  t_grid().validate();
  if (n_x > 0) x_grid().validate();
  if (expected_span > 0.0 &&
      std::abs(n_slices * epsilon - expected_span) > 1e-12 * std::max(1.0, expected_span))
    throw std::domain_error("LatticeConfig: epsilon * n_slices != T'' - T'");
}

double GridWave::norm_sq() const {
  // Trapezoid weights along each active axis.
  const int nt = static_cast<int>(data.rows());
  const int nx = static_cast<int>(data.cols());
  double total = 0.0;
  for (int i = 0; i < nt; ++i) {
    const double wt = t.weight(i);
    if (!has_x) {
      total += wt * std::norm(data(i, 0));
    } else {
      double row = 0.0;
      for (int j = 0; j < nx; ++j) row += x.weight(j) * std::norm(data(i, j));
      total += wt * row;
    }
  }
  return total;
}

void GridWave::normalize() { data /= std::sqrt(norm_sq()); }

GridWave sample_packet(const GaussianPacket4D& packet, const Grid1D& t_grid) {
  GridWave w;
  w.t = t_grid;
  w.has_x = false;
  w.data.resize(t_grid.n, 1);
  for (int i = 0; i < t_grid.n; ++i)
    w.data(i, 0) = packet.amplitude_scale * packet.time_factor(t_grid.point(i));
  return w;
}

GridWave sample_packet_2d(const GaussianPacket4D& packet, const Grid1D& t_grid,
                          const Grid1D& x_grid) {
  GridWave w;
  w.t = t_grid;
  w.x = x_grid;
  w.has_x = true;
  w.data.resize(t_grid.n, x_grid.n);
  for (int i = 0; i < t_grid.n; ++i) {
    const std::complex<double> ft =
        packet.amplitude_scale * packet.time_factor(t_grid.point(i));
    for (int j = 0; j < x_grid.n; ++j)
      w.data(i, j) = ft * packet.space_factor(x_grid.point(j));
  }
  return w;
}

GridWave sample_factor(const ComplexGaussian1D& f, const Grid1D& grid) {
  GridWave w;
  w.t = grid;
  w.has_x = false;
  w.data.resize(grid.n, 1);
  for (int i = 0; i < grid.n; ++i) w.data(i, 0) = f(grid.point(i));
  return w;
}

double rel_l2_error(const GridWave& a, const GridWave& b) {
  GridWave diff = a;
  diff.data -= b.data;
  return std::sqrt(diff.norm_sq() / b.norm_sq());
}

double rel_l2_error_mod_phase(const GridWave& a, const GridWave& b) {
  // Optimal global phase: overlap <a|b> weighted like the norm.
  std::complex<double> overlap(0.0, 0.0);
  const int nt = static_cast<int>(a.data.rows());
  const int nx = static_cast<int>(a.data.cols());
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nx; ++j) {
      const double wgt = a.t.weight(i) * (a.has_x ? a.x.weight(j) : 1.0);
      overlap += wgt * std::conj(a.data(i, j)) * b.data(i, j);
    }
  const double mag = std::abs(overlap);
  const std::complex<double> phase = mag > 0.0 ? overlap / mag : 1.0;
  GridWave shifted = a;
  shifted.data *= phase;
  return rel_l2_error(shifted, b);
}

// ---------------------------------------------------------------------------
// One-slice kinetic kernel, band-limited.
//
// Sampling the raw continuum kernel aliases badly once the chirp
// m u^2 / (2 eps) oscillates faster than the grid, so the step kernel is
// built as the inverse transform of the exact spectral multiplier
// exp(i s eps k^2 / (2m)) restricted to the grid band, with a smooth
// erfc roll-off at the band edge (the physical spectrum lives far below
// it). The Toeplitz application of this kernel *is* the continuum
// evolution of the band-limited interpolant, with hard truncation at the
// window edges.
std::vector<std::complex<double>> step_kernel(int time_axis_sign, double m,
                                              double eps, double eta, double h,
                                              int n) {
  const std::size_t M = next_pow2(std::max<std::size_t>(16 * n, 8192));
  const double dk = 2.0 * M_PI / (h * static_cast<double>(M));
  const double k_nyq = M_PI / h;
  const double k_cut = 0.85 * k_nyq;
  const double k_width = 0.04 * k_nyq;
  const double s = time_axis_sign > 0 ? 1.0 : -1.0;

  std::vector<std::complex<double>> u(M);
  for (std::size_t l = 0; l < M; ++l) {
    const double k = (static_cast<double>(l) - static_cast<double>(M) / 2.0) * dk;
    const double taper = 0.5 * std::erfc((std::abs(k) - k_cut) / k_width);
    u[l] = taper * std::exp(std::complex<double>(0.0, s * eps * k * k / (2.0 * m)));
  }
  fft(u, +1);  // unnormalized backward transform

  std::vector<std::complex<double>> kernel(2 * n - 1);
  const double scale = dk / (2.0 * M_PI);
  for (int j = -(n - 1); j <= n - 1; ++j) {
    const std::size_t idx = static_cast<std::size_t>((j % static_cast<long>(M) +
                                                      static_cast<long>(M)) %
                                                     static_cast<long>(M));
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;  // e^{-i pi j} from the k shift
    std::complex<double> v = scale * sign * u[idx];
    if (eta > 0.0) v *= std::exp(-eta * m * (j * h) * (j * h) / eps);
    kernel[static_cast<std::size_t>(j + n - 1)] = v;
  }
  return kernel;
}

namespace {

Eigen::MatrixXcd kernel_matrix(const std::vector<std::complex<double>>& kern, int n,
                               double h) {
  Eigen::MatrixXcd mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mat(i, j) = h * kern[static_cast<std::size_t>(i - j + n - 1)];
  return mat;
}

// Linear (non-circular) convolution of each column of data with kern.
void convolve_columns_fft(Eigen::MatrixXcd& data,
                          const std::vector<std::complex<double>>& kern, double h) {
  const int n = static_cast<int>(data.rows());
  const std::size_t P = next_pow2(static_cast<std::size_t>(2 * n));
  std::vector<std::complex<double>> kpad(P, 0.0);
  for (int d = -(n - 1); d <= n - 1; ++d)
    kpad[static_cast<std::size_t>((d + static_cast<long>(P)) % static_cast<long>(P))] =
        h * kern[static_cast<std::size_t>(d + n - 1)];
  fft(kpad, -1);

  std::vector<std::complex<double>> buf(P);
  for (int c = 0; c < data.cols(); ++c) {
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    for (int i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = data(i, c);
    fft(buf, -1);
    for (std::size_t l = 0; l < P; ++l) buf[l] *= kpad[l];
    fft(buf, +1);
    const double inv = 1.0 / static_cast<double>(P);
    for (int i = 0; i < n; ++i) data(i, c) = buf[static_cast<std::size_t>(i)] * inv;
  }
}

struct AxisOperator {
  ConvolutionMethod method;
  Eigen::MatrixXcd dense;  // only for kDense
  std::vector<std::complex<double>> kern;
  double h = 0.0;

  void apply_rows(Eigen::MatrixXcd& data) const {  // contract over the t index
    if (method == ConvolutionMethod::kDense)
      data = dense * data;
    else
      convolve_columns_fft(data, kern, h);
  }
  void apply_cols(Eigen::MatrixXcd& data) const {  // contract over the x index
    if (method == ConvolutionMethod::kDense) {
      data = data * dense.transpose();
    } else {
      Eigen::MatrixXcd tmp = data.transpose();
      convolve_columns_fft(tmp, kern, h);
      data = tmp.transpose();
    }
  }
};

AxisOperator make_axis_operator(int time_axis_sign, double m, double eps, double eta,
                                const Grid1D& grid, ConvolutionMethod method) {
  AxisOperator op;
  op.method = method;
  op.h = grid.h();
  op.kern = step_kernel(time_axis_sign, m, eps, eta, grid.h(), grid.n);
  if (method == ConvolutionMethod::kDense) op.dense = kernel_matrix(op.kern, grid.n, op.h);
  return op;
}

double boundary_fraction(const GridWave& w) {
  const int nt = static_cast<int>(w.data.rows());
  const int nx = static_cast<int>(w.data.cols());
  const int gt = std::max(1, nt / 32);
  const int gx = w.has_x ? std::max(1, nx / 32) : 0;
  double edge = 0.0, total = 0.0;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nx; ++j) {
      const double wgt = w.t.weight(i) * (w.has_x ? w.x.weight(j) : 1.0);
      const double mass = wgt * std::norm(w.data(i, j));
      total += mass;
      const bool t_edge = (i < gt || i >= nt - gt);
      const bool x_edge = w.has_x && (j < gx || j >= nx - gx);
      if (t_edge || x_edge) edge += mass;
    }
  return total > 0.0 ? edge / total : 0.0;
}

GridWave propagate_fixed_eta(const LatticeConfig& config, const PotentialFn& V,
                             const GridWave& psi0, double m, int time_axis_sign,
                             double eta, double* max_leak) {
  const Grid1D tg = config.t_grid();
  AxisOperator t_op = make_axis_operator(time_axis_sign, m, config.epsilon, eta, tg,
                                         config.method);
  AxisOperator x_op;
  if (config.n_x > 0)
    x_op = make_axis_operator(-1, m, config.epsilon, eta, config.x_grid(),
                              config.method);

  GridWave psi = psi0;
  for (int slice = 0; slice < config.n_slices; ++slice) {
    t_op.apply_rows(psi.data);
    if (config.n_x > 0) x_op.apply_cols(psi.data);

    const double T_mid = config.T_start + (slice + 0.5) * config.epsilon;
    bool any_potential = false;
    for (int i = 0; i < tg.n && !any_potential; ++i)
      any_potential = V(tg.point(i), psi.has_x ? psi.x.point(0) : 0.0, T_mid) != 0.0;
    if (any_potential) {
      for (int i = 0; i < tg.n; ++i) {
        if (!psi.has_x) {
          const double v = V(tg.point(i), 0.0, T_mid);
          psi.data(i, 0) *= std::exp(std::complex<double>(0.0, -config.epsilon * v));
        } else {
          for (int j = 0; j < psi.x.n; ++j) {
            const double v = V(tg.point(i), psi.x.point(j), T_mid);
            psi.data(i, j) *= std::exp(std::complex<double>(0.0, -config.epsilon * v));
          }
        }
      }
    }

    const double leak = boundary_fraction(psi);
    if (max_leak) *max_leak = std::max(*max_leak, leak);
    if (leak > 1e-10)
      throw BoundaryLeak("trotter_propagate: boundary mass " + std::to_string(leak));
  }
  return psi;
}

}  // namespace

TrotterResult trotter_propagate(const LatticeConfig& config, const PotentialFn& V,
                                const GridWave& psi0, double m, int time_axis_sign) {
  config.validate();
  TrotterResult result;
  result.max_leak = 0.0;
  if (config.reg_eta <= 0.0) {
    result.wave = propagate_fixed_eta(config, V, psi0, m, time_axis_sign, 0.0,
                                      &result.max_leak);
    return result;
  }
  // Linear Richardson extrapolation of the damping to eta -> 0.
  GridWave full = propagate_fixed_eta(config, V, psi0, m, time_axis_sign,
                                      config.reg_eta, &result.max_leak);
  GridWave half = propagate_fixed_eta(config, V, psi0, m, time_axis_sign,
                                      0.5 * config.reg_eta, &result.max_leak);
  GridWave diff = half;
  diff.data -= full.data;
  result.richardson_diff = std::sqrt(diff.norm_sq() / half.norm_sq());
  if (!std::isfinite(result.richardson_diff) || result.richardson_diff > 0.5)
    throw NonConvergent("trotter_propagate: eta extrapolation failed");
  result.wave = half;
  result.wave.data = 2.0 * half.data - full.data;
  return result;
}

TrotterResult trotter_propagate(const LatticeConfig& config,
                                const PotentialSpec& potential, const GridWave& psi0,
                                double m) {
  return trotter_propagate(config, potential.as_function(), psi0, m, +1);
}

// ---------------------------------------------------------------------------
// Chapman-Kolmogorov quadrature harness.

namespace {
Amplitude axis_kernel(int sign, double m, double Ta, double Tb, double u1, double u2) {
  return sign > 0 ? free_time_kernel(m, Ta, Tb, u1, u2)
                  : free_space_kernel(m, Ta, Tb, u1, u2);
}
}  // namespace

double kernel_compose_check(double m, const std::vector<double>& T_points,
                            double t_window_lo, double t_window_hi,
                            const ComposeCheckOptions& opts) {
  if (T_points.size() < 3)
    throw std::domain_error("kernel_compose_check: need at least 3 lab times");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> endpoint(t_window_lo, t_window_hi);
  const double sgn = opts.time_axis_sign > 0 ? -1.0 : 1.0;  // kinetic phase sign

  double worst = 0.0;
  for (std::size_t seg = 0; seg + 2 < T_points.size(); ++seg) {
    const double Ta = T_points[seg], Tb = T_points[seg + 1], Tc = T_points[seg + 2];
    if (!(Tb > Ta && Tc > Tb))
      throw std::domain_error("kernel_compose_check: lab times not increasing");
    const double a = Tb - Ta, b = Tc - Tb;

    for (int sample = 0; sample < opts.samples_per_pair; ++sample) {
      const double u1 = endpoint(rng);
      const double u3 = endpoint(rng);

      // Envelope center of the damped integrand; straight-line midpoint.
      const double uc = (u1 * b + u3 * a) / (a + b);
      const double eta_min = opts.eta / 4.0;
      const double wdamp =
          std::sqrt(32.5 / (eta_min * m * (1.0 / a + 1.0 / b)));
      const double reach = wdamp + std::max(std::abs(u1 - uc), std::abs(u3 - uc));
      const double k_max = m * reach * (1.0 / a + 1.0 / b);
      long n = opts.n_override > 0
                   ? opts.n_override
                   : std::min<long>(opts.max_points,
                                    static_cast<long>(2.0 * wdamp * 2.5 * k_max / M_PI) + 8);
      const double h = 2.0 * wdamp / static_cast<double>(n - 1);

      // One pass, three damping strengths sharing the oscillatory factor.
      const double etas[3] = {opts.eta, opts.eta / 2.0, opts.eta / 4.0};
      std::complex<double> sums[3] = {0.0, 0.0, 0.0};
      for (long i = 0; i < n; ++i) {
        const double u = uc - wdamp + i * h;
        const double g = (u - u1) * (u - u1) / a + (u3 - u) * (u3 - u) / b;
        const double phase = sgn * 0.5 * m * g;
        const std::complex<double> osc(std::cos(phase), std::sin(phase));
        const double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        for (int e = 0; e < 3; ++e)
          sums[e] += wgt * osc * std::exp(-etas[e] * m * g);
      }
      const Amplitude pref = axis_kernel(opts.time_axis_sign, m, Ta, Tb, 0.0, 0.0) *
                             axis_kernel(opts.time_axis_sign, m, Tb, Tc, 0.0, 0.0) /
                             (std::sqrt(m / (2.0 * M_PI * a)) *
                              std::sqrt(m / (2.0 * M_PI * b)));
      // pref carries the two prefactors including their phases; the moduli
      // were divided out above and restored here.
      const double mods = std::sqrt(m / (2.0 * M_PI * a)) * std::sqrt(m / (2.0 * M_PI * b));
      Amplitude vals[3];
      for (int e = 0; e < 3; ++e) vals[e] = pref * mods * h * sums[e];

      const Amplitude extrapolated = (8.0 * vals[2] - 6.0 * vals[1] + vals[0]) / 3.0;
      const Amplitude direct = axis_kernel(opts.time_axis_sign, m, Ta, Tc, u1, u3);
      worst = std::max(worst, std::abs(extrapolated - direct) / std::abs(direct));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Fourier path sampler.

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace

double straight_line_free_action(double m, const PathEndpoints& e) {
  const double dT = e.T2 - e.T1;
  const double dt = e.t2 - e.t1;
  const double dx = e.x2 - e.x1;
  return -0.5 * m * dt * dt / dT + 0.5 * m * dx * dx / dT;
}

PathEnsemble sample_fourier_paths(const LatticeConfig& config,
                                  const PathEndpoints& endpoints, int n_paths,
                                  int n_modes, double mode_scale, double m,
                                  const PotentialFn& V, int n_quad) {
  if (n_modes < 1) throw std::domain_error("sample_fourier_paths: n_modes >= 1");
  const double dT = endpoints.T2 - endpoints.T1;
  if (!(dT > 0.0)) throw std::domain_error("sample_fourier_paths: T2 > T1");

  PathEnsemble ens;
  ens.n_modes = n_modes;
  ens.mode_scale = mode_scale;
  ens.coefficients.resize(static_cast<std::size_t>(n_paths));
  ens.actions.resize(static_cast<std::size_t>(n_paths));
  ens.overshoot_fraction.resize(static_cast<std::size_t>(n_paths));

  const double t_lo = std::min(endpoints.t1, endpoints.t2);
  const double t_hi = std::max(endpoints.t1, endpoints.t2);
  const double slope_t = (endpoints.t2 - endpoints.t1) / dT;
  const double slope_x = (endpoints.x2 - endpoints.x1) / dT;
  const double hq = dT / (n_quad - 1);

  for (int pidx = 0; pidx < n_paths; ++pidx) {
    std::mt19937_64 rng(splitmix64(config.seed ^ (0x6A09E667F3BCC909ULL +
                                                  static_cast<std::uint64_t>(pidx))));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> a(static_cast<std::size_t>(n_modes));
    for (int nmode = 1; nmode <= n_modes; ++nmode)
      a[static_cast<std::size_t>(nmode - 1)] = mode_scale / nmode * gauss(rng);

    double action = 0.0;
    int outside = 0;
    for (int i = 0; i < n_quad; ++i) {
      const double tau = i * hq;
      const double T = endpoints.T1 + tau;
      double t = endpoints.t1 + slope_t * tau;
      double tdot = slope_t;
      for (int nmode = 1; nmode <= n_modes; ++nmode) {
        const double w = nmode * M_PI / dT;
        t += a[static_cast<std::size_t>(nmode - 1)] * std::sin(w * tau);
        tdot += a[static_cast<std::size_t>(nmode - 1)] * w * std::cos(w * tau);
      }
      const double x = endpoints.x1 + slope_x * tau;
      const double lagr = -0.5 * m * (tdot * tdot - slope_x * slope_x) - V(t, x, T);
      action += (i == 0 || i == n_quad - 1 ? 0.5 : 1.0) * lagr * hq;
      if (t < t_lo || t > t_hi) ++outside;
    }
    ens.coefficients[static_cast<std::size_t>(pidx)] = std::move(a);
    ens.actions[static_cast<std::size_t>(pidx)] = action;
    ens.overshoot_fraction[static_cast<std::size_t>(pidx)] =
        static_cast<double>(outside) / n_quad;
  }

  const double n = static_cast<double>(n_paths);
  ens.action_mean = std::accumulate(ens.actions.begin(), ens.actions.end(), 0.0) / n;
  double var = 0.0;
  for (double s : ens.actions) var += (s - ens.action_mean) * (s - ens.action_mean);
  ens.action_var = var / n;
  return ens;
}

}  // namespace tempath
