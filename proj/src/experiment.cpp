#include "tempath/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <mutex>
#include <thread>

namespace tempath {

GaussianPacket4D ExperimentConfig::make_packet() const {
  const double omega = packet.omega_a > 0.0
                           ? packet.omega_a
                           : std::sqrt(packet.k_a * packet.k_a + mass * mass);
  return GaussianPacket4D::make(packet.t_a, packet.x_a, omega, packet.k_a,
                                packet.sigma_t, packet.sigma_x, T0);
}

void ExperimentConfig::validate() const {
  if (!(mass > 0.0)) throw ConfigError("experiment: mass must be > 0");
  if (!(packet.sigma_t > 0.0) || !(packet.sigma_x > 0.0))
    throw ConfigError("experiment: packet widths must be > 0");
  if (spectrum.eigenvalues.empty())
    throw ConfigError("experiment: empty dipole spectrum");
  if (!(T0 < field.T_bar && field.T_bar < T3))
    throw ConfigError("experiment: requires T0 < T_bar < T3");
  if (curve_points < 16) throw ConfigError("experiment: curve_points too small");
}

int thread_budget(int requested_components) {
  int budget = static_cast<int>(std::thread::hardware_concurrency());
  if (budget < 1) budget = 1;
  if (const char* env = std::getenv("TEMPATH_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) budget = std::min(budget, cap);
  }
  return std::max(1, std::min(budget, requested_components));
}

namespace {
double gaussian(double u, double c, double sigma) {
  const double z = (u - c) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

Curve mixture_curve(const std::vector<double>& centers,
                    const std::vector<double>& sigmas,
                    const std::vector<double>& weights, double lo, double hi, int n) {
  Curve c;
  c.coordinate.resize(static_cast<std::size_t>(n));
  c.density.assign(static_cast<std::size_t>(n), 0.0);
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double u = lo + i * h;
    c.coordinate[static_cast<std::size_t>(i)] = u;
    double rho = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k)
      rho += weights[k] * gaussian(u, centers[k], sigmas[k]);
    c.density[static_cast<std::size_t>(i)] = rho;
  }
  return c;
}

struct Axis {
  double lo, hi;
};

Axis cover(const std::vector<double>& centers, const std::vector<double>& sigmas,
           double pad_sigmas = 6.0) {
  double lo = centers[0], hi = centers[0];
  for (std::size_t i = 0; i < centers.size(); ++i) {
    lo = std::min(lo, centers[i] - pad_sigmas * sigmas[i]);
    hi = std::max(hi, centers[i] + pad_sigmas * sigmas[i]);
  }
  return {lo, hi};
}

// Mod-phase L2 of the lattice pulse run (width pair, Richardson in width)
// against the analytic impulsive component.
double oracle_component_error(const ExperimentConfig& cfg,
                              const GaussianPacket4D& packet, double p,
                              double t_lo, double t_hi) {
  const double w = cfg.oracle_width;
  LatticeConfig lat;
  lat.T_start = cfg.T0;
  lat.t_min = t_lo;
  lat.t_max = t_hi;
  lat.n_t = cfg.lattice_n_t > 0 ? cfg.lattice_n_t : 1024;
  lat.reg_eta = cfg.lattice_reg_eta;
  lat.method = cfg.lattice_method;

  const EvolvedComponent analytic =
      evolve_dipole_component(packet, p, cfg.field, cfg.mass, cfg.T0, cfg.T3);
  GridWave target;
  target.t = lat.t_grid();
  target.has_x = false;
  target.data.resize(lat.n_t, 1);
  for (int i = 0; i < lat.n_t; ++i)
    target.data(i, 0) = analytic.packet.amplitude_scale *
                        analytic.packet.time_factor(target.t.point(i));

  auto run = [&](double width) {
    LatticeConfig c = lat;
    c.epsilon = width / cfg.lattice_slices_per_width;
    c.n_slices = static_cast<int>(std::llround((cfg.T3 - cfg.T0) / c.epsilon));
    c.epsilon = (cfg.T3 - cfg.T0) / c.n_slices;
    GridWave psi0 = sample_packet(packet, c.t_grid());
    GridWave out = trotter_propagate(c, cfg.field.finite_pulse(p, width), psi0,
                                     cfg.mass)
                       .wave;
    // align the global phase to the target before extrapolating
    std::complex<double> ov(0, 0);
    for (int i = 0; i < c.n_t; ++i)
      ov += out.t.weight(i) * std::conj(out.data(i, 0)) * target.data(i, 0);
    out.data *= ov / std::abs(ov);
    return out;
  };
  GridWave full = run(w);
  const GridWave half = run(0.5 * w);
  full.data = 2.0 * half.data - full.data;
  return rel_l2_error_mod_phase(full, target);
}
}  // namespace

Detectability detectability(double delta_omega_split, const GaussianPacket4D& packet) {
  Detectability d;
  const double omega = packet.omega_a();
  const double width_t = 1.0 / packet.sigma_t();
  const double width_x =
      omega != 0.0 ? std::abs(packet.k_a() / omega) / packet.sigma_x() : 0.0;
  d.delta_omega_width = std::max(width_t, width_x);
  d.margin = std::abs(delta_omega_split) / d.delta_omega_width;
  d.detectable = d.margin > 1.0;
  return d;
}

int count_humps(const Curve& curve, double threshold_fraction) {
  const std::size_t n = curve.density.size();
  if (n < 3) return 0;
  const double gmax = *std::max_element(curve.density.begin(), curve.density.end());
  const double threshold = threshold_fraction * gmax;
  int humps = 0;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (curve.density[i] > curve.density[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && curve.density[j + 1] == curve.density[j]) ++j;  // plateau
      if (j + 1 < n && curve.density[j + 1] < curve.density[j] &&
          curve.density[i] > threshold)
        ++humps;
      i = j + 1;
    } else {
      ++i;
    }
  }
  return humps;
}

double curve_l1_distance(const Curve& a, const Curve& b) {
  if (a.coordinate.size() != b.coordinate.size())
    throw std::domain_error("curve_l1_distance: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < a.coordinate.size(); ++i) {
    const double h = a.coordinate[i + 1] - a.coordinate[i];
    acc += 0.5 * h *
           (std::abs(a.density[i] - b.density[i]) +
            std::abs(a.density[i + 1] - b.density[i + 1]));
  }
  return acc;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate();
  const GaussianPacket4D packet = config.make_packet();
  const double m = config.mass;
  const double span = config.T3 - config.T0;
  const double v0 = packet.omega_a() / m;
  const std::size_t n_comp = config.spectrum.eigenvalues.size();

  // Shared axes, derived from the config so both formalisms line up.
  std::vector<double> v_centers_all{v0};
  for (double p : config.spectrum.eigenvalues)
    v_centers_all.push_back(v0 - p * config.field.E1_bar / m);
  double min_gap = 0.0;
  {
    std::vector<double> sorted = v_centers_all;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      const double gap = sorted[i + 1] - sorted[i];
      if (gap > 1e-14 && (min_gap == 0.0 || gap < min_gap)) min_gap = gap;
    }
  }
  const Detectability det_probe = detectability(0.0, packet);
  const double sigma_v_phys = det_probe.delta_omega_width / m;
  const double sigma_v_res =
      config.velocity_resolution > 0.0
          ? config.velocity_resolution
          : (min_gap > 0.0 ? min_gap / 8.0 : sigma_v_phys);

  const Axis v_axis = cover(v_centers_all,
                            std::vector<double>(v_centers_all.size(),
                                                std::max(sigma_v_res, 1e-12)),
                            8.0);
  const Axis v_axis_phys = cover(
      v_centers_all, std::vector<double>(v_centers_all.size(), sigma_v_phys), 8.0);

  // Detector window (auto unless configured).
  const GaussianPacket4D free_end = evolve_gaussian_free(packet, m, config.T0, config.T3);
  double t_lo = config.detector_t_min, t_hi = config.detector_t_max;
  if (!(t_hi > t_lo)) {
    const double reach = 11.0 * free_end.sigma_t() +
                         std::abs(config.field.E1_bar) *
                             *std::max_element(config.spectrum.eigenvalues.begin(),
                                               config.spectrum.eigenvalues.end(),
                                               [](double a, double b) {
                                                 return std::abs(a) < std::abs(b);
                                               }) *
                             span / m;
    t_lo = std::min(packet.t_a() - 11.0 * packet.sigma_t(), free_end.t_a() - reach);
    t_hi = free_end.t_a() + reach;
  }

  ExperimentOutput out;
  const bool want_p4 =
      config.formalism == Formalism::kPath4D || config.formalism == Formalism::kBoth;
  const bool want_s = config.formalism == Formalism::kSchrodinger ||
                      config.formalism == Formalism::kBoth;

  // Per-component evolutions (parallel across components).
  std::vector<EvolvedComponent> p4_components(n_comp);
  std::vector<SchrodingerComponent> s_components(n_comp);
  std::vector<double> oracle_errors(n_comp, -1.0);
  {
    const int threads = thread_budget(static_cast<int>(n_comp));
    std::vector<std::future<void>> jobs;
    std::size_t next = 0;
    auto worker = [&](std::size_t idx) {
      const double p = config.spectrum.eigenvalues[idx];
      if (want_p4) {
        p4_components[idx] = evolve_dipole_component(
            packet, p, config.field, m, config.T0, config.T3,
            std::make_pair(t_lo, t_hi));
        if (config.oracle_check)
          oracle_errors[idx] = oracle_component_error(config, packet, p, t_lo, t_hi);
      }
      if (want_s) {
        PulseField pulse;
        const double width = config.field.delta_T > 0.0 ? config.field.delta_T
                                                        : std::min(0.05, span / 16.0);
        pulse.E0 = config.field.E0_bar / width;
        pulse.E1 = config.field.E1_bar / width;
        pulse.T1 = config.field.T_bar - 0.5 * width;
        pulse.T2 = config.field.T_bar + 0.5 * width;
        s_components[idx] =
            schrodinger_evolve(packet.space_factor, p, pulse, m, config.T0, config.T3);
      }
    };
    if (threads <= 1) {
      for (; next < n_comp; ++next) worker(next);
    } else {
      std::vector<std::thread> pool;
      std::mutex mtx;
      for (int k = 0; k < threads; ++k)
        pool.emplace_back([&]() {
          for (;;) {
            std::size_t idx;
            {
              std::lock_guard<std::mutex> lock(mtx);
              if (next >= n_comp) return;
              idx = next++;
            }
            worker(idx);
          }
        });
      for (auto& th : pool) th.join();
    }
  }

  auto assemble = [&](Formalism which) {
    ExperimentResult res;
    res.formalism = which;
    res.velocity_resolution = sigma_v_res;

    std::vector<double> v_centers, t_centers, t_sigmas, x_centers, x_sigmas, weights;
    for (std::size_t i = 0; i < n_comp; ++i) {
      const double p = config.spectrum.eigenvalues[i];
      ComponentOutcome c;
      c.p = p;
      c.weight = config.spectrum.weights[i];
      c.precession = precession_shift(p, config.field);
      if (which == Formalism::kPath4D) {
        const EvolvedComponent& e = p4_components[i];
        c.delta_omega = e.delta_omega;
        c.delta_omega_finite = e.delta_omega_finite;
        c.delta_v = e.delta_v;
        c.mean_arrival_t = e.mean_arrival_t;
        c.oracle_rel_l2 = oracle_errors[i];
        t_centers.push_back(e.packet.time_factor.mean());
        t_sigmas.push_back(std::sqrt(e.packet.time_factor.variance()));
        x_centers.push_back(e.packet.space_factor.mean());
        x_sigmas.push_back(std::sqrt(e.packet.space_factor.variance()));
      } else {
        const SchrodingerComponent& s = s_components[i];
        c.delta_omega = c.precession;
        c.delta_omega_finite = c.precession;
        c.delta_v = 0.0;  // no splitting by construction
        c.mean_arrival_t = config.T3;
        c.phase_shift = s.phase_shift;
        x_centers.push_back(s.packet_x.mean());
        x_sigmas.push_back(std::sqrt(s.packet_x.variance()));
      }
      c.v_center = v0 + c.delta_v;
      v_centers.push_back(c.v_center);
      weights.push_back(c.weight);
      res.components.push_back(c);
    }

    // spacing between adjacent component centers (eigenvalues ascending)
    for (std::size_t i = 0; i + 1 < v_centers.size(); ++i)
      res.hump_spacing_v =
          std::max(res.hump_spacing_v, std::abs(v_centers[i + 1] - v_centers[i]));
    res.hump_spacing_omega = res.hump_spacing_v * m;

    const Detectability det = detectability(res.hump_spacing_omega, packet);
    res.delta_omega_width = det.delta_omega_width;
    res.margin = det.margin;
    res.detectable = det.detectable;

    const int n_pts = config.curve_points;
    const std::vector<double> res_sigmas(n_comp, sigma_v_res);
    const std::vector<double> phys_sigmas(n_comp, sigma_v_phys);
    res.distributions.combined_v =
        mixture_curve(v_centers, res_sigmas, weights, v_axis.lo, v_axis.hi, n_pts);
    res.distributions.combined_v_physical = mixture_curve(
        v_centers, phys_sigmas, weights, v_axis_phys.lo, v_axis_phys.hi, n_pts);
    for (std::size_t i = 0; i < n_comp; ++i)
      res.distributions.component_v.push_back(
          mixture_curve({v_centers[i]}, {sigma_v_res}, {1.0}, v_axis.lo, v_axis.hi,
                        n_pts));
    if (which == Formalism::kPath4D) {
      const Axis t_axis = cover(t_centers, t_sigmas);
      res.distributions.combined_t =
          mixture_curve(t_centers, t_sigmas, weights, t_axis.lo, t_axis.hi, n_pts);
    }
    const Axis x_axis = cover(x_centers, x_sigmas);
    res.distributions.combined_x =
        mixture_curve(x_centers, x_sigmas, weights, x_axis.lo, x_axis.hi, n_pts);

    res.hump_count = count_humps(res.distributions.combined_v);
    return res;
  };

  if (want_p4) out.path4d = assemble(Formalism::kPath4D);
  if (want_s) out.schrodinger = assemble(Formalism::kSchrodinger);
  return out;
}

ComparisonReport compare_formalisms(const ExperimentResult& path4d,
                                    const ExperimentResult& schrodinger) {
  if (path4d.components.size() != schrodinger.components.size())
    throw std::domain_error("compare_formalisms: component count mismatch");
  ComparisonReport rep;
  for (std::size_t i = 0; i < path4d.components.size(); ++i)
    rep.max_precession_diff =
        std::max(rep.max_precession_diff,
                 std::abs(path4d.components[i].precession -
                          schrodinger.components[i].precession));
  rep.hump_count_path4d = path4d.hump_count;
  rep.hump_count_schrodinger = schrodinger.hump_count;
  rep.hump_spacing_v_path4d = path4d.hump_spacing_v;
  rep.split_only_in_path4d =
      path4d.hump_spacing_v > 0.0 && schrodinger.hump_spacing_v == 0.0;
  rep.l1_physical_velocity =
      curve_l1_distance(path4d.distributions.combined_v_physical,
                        schrodinger.distributions.combined_v_physical);
  double max_diff = 0.0;
  auto pointwise = [&max_diff](const Curve& a, const Curve& b) {
    for (std::size_t i = 0; i < a.density.size(); ++i)
      max_diff = std::max(max_diff, std::abs(a.density[i] - b.density[i]));
  };
  pointwise(path4d.distributions.combined_x, schrodinger.distributions.combined_x);
  pointwise(path4d.distributions.combined_v, schrodinger.distributions.combined_v);
  pointwise(path4d.distributions.combined_v_physical,
            schrodinger.distributions.combined_v_physical);
  rep.max_observable_diff = max_diff;
  return rep;
}

}  // namespace tempath
