#include "tempath/classical.hpp"

#include <algorithm>
#include <cmath>

namespace tempath {

namespace {
constexpr double kDerivStep = 1e-6;

double eval(const PotentialFn3& f, double t, double x, double T) {
  return f ? f(t, x, T) : 0.0;
}
double dV_dt(const PotentialFn3& f, double t, double x, double T) {
  if (!f) return 0.0;
  return (f(t + kDerivStep, x, T) - f(t - kDerivStep, x, T)) / (2.0 * kDerivStep);
}
double dV_dx(const PotentialFn3& f, double t, double x, double T) {
  if (!f) return 0.0;
  return (f(t, x + kDerivStep, T) - f(t, x - kDerivStep, T)) / (2.0 * kDerivStep);
}
}  // namespace

double ScalarField::dt(double t, double x) const {
  if (!f) return 0.0;
  if (df_dt) return df_dt(t, x);
  return (f(t + kDerivStep, x) - f(t - kDerivStep, x)) / (2.0 * kDerivStep);
}

double ScalarField::dx(double t, double x) const {
  if (!f) return 0.0;
  if (df_dx) return df_dx(t, x);
  return (f(t, x + kDerivStep) - f(t, x - kDerivStep)) / (2.0 * kDerivStep);
}

namespace {
// State + action accumulator.
struct Phase {
  double t, x, tdot, xdot, S;
};

Phase derivative(const FieldConfig& fields, double m, double q, double T,
                 const Phase& p) {
  const double E = -fields.phi.dx(p.t, p.x) - fields.A_x.dt(p.t, p.x);
  Phase d;
  d.t = p.tdot;
  d.x = p.xdot;
  d.tdot = (q * p.xdot * E + dV_dt(fields.V, p.t, p.x, T)) / m;
  d.xdot = (q * p.tdot * E - dV_dx(fields.V, p.t, p.x, T)) / m;
  d.S = -0.5 * m * (p.tdot * p.tdot - p.xdot * p.xdot) -
        q * (p.tdot * fields.phi.value(p.t, p.x) -
             p.xdot * fields.A_x.value(p.t, p.x)) -
        eval(fields.V, p.t, p.x, T);
  return d;
}

Phase axpy(const Phase& a, double c, const Phase& b) {
  return {a.t + c * b.t, a.x + c * b.x, a.tdot + c * b.tdot, a.xdot + c * b.xdot,
          a.S + c * b.S};
}

Phase rk4_step(const FieldConfig& fields, double m, double q, double T,
               const Phase& p, double h) {
  const Phase k1 = derivative(fields, m, q, T, p);
  const Phase k2 = derivative(fields, m, q, T + 0.5 * h, axpy(p, 0.5 * h, k1));
  const Phase k3 = derivative(fields, m, q, T + 0.5 * h, axpy(p, 0.5 * h, k2));
  const Phase k4 = derivative(fields, m, q, T + h, axpy(p, h, k3));
  Phase out = p;
  out.t += h / 6.0 * (k1.t + 2 * k2.t + 2 * k3.t + k4.t);
  out.x += h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
  out.tdot += h / 6.0 * (k1.tdot + 2 * k2.tdot + 2 * k3.tdot + k4.tdot);
  out.xdot += h / 6.0 * (k1.xdot + 2 * k2.xdot + 2 * k3.xdot + k4.xdot);
  out.S += h / 6.0 * (k1.S + 2 * k2.S + 2 * k3.S + k4.S);
  return out;
}

double phase_dist(const Phase& a, const Phase& b) {
  return std::max({std::abs(a.t - b.t), std::abs(a.x - b.x), std::abs(a.tdot - b.tdot),
                   std::abs(a.xdot - b.xdot)});
}

// Advance from Ta to Tb with step-doubling error control.
Phase advance(const FieldConfig& fields, double m, double q, Phase p, double Ta,
              double Tb, const IntegrationOptions& opts) {
  struct Seg {
    double T0, T1;
    int depth;
  };
  std::vector<Seg> stack{{Ta, Tb, 0}};
  while (!stack.empty()) {
    const Seg seg = stack.back();
    stack.pop_back();
    const double h = seg.T1 - seg.T0;
    const Phase full = rk4_step(fields, m, q, seg.T0, p, h);
    const Phase half1 = rk4_step(fields, m, q, seg.T0, p, 0.5 * h);
    const Phase half2 = rk4_step(fields, m, q, seg.T0 + 0.5 * h, half1, 0.5 * h);
    const double err = phase_dist(full, half2) / 15.0;
    if (err <= opts.local_error_tol || std::abs(h) < 1e-14) {
      p = half2;
    } else {
      if (seg.depth >= opts.max_halvings)
        throw StepRejected("integrate_trajectory: local error above tolerance");
      stack.push_back({seg.T0 + 0.5 * h, seg.T1, seg.depth + 1});
      stack.push_back({seg.T0, seg.T0 + 0.5 * h, seg.depth + 1});
    }
  }
  return p;
}

// Split [Ta, Tb] at field breakpoints so steps never straddle a switch.
std::vector<double> split_points(const FieldConfig& fields, double Ta, double Tb) {
  std::vector<double> pts{Ta, Tb};
  for (double b : fields.time_breakpoints)
    if (b > Ta + 1e-15 && b < Tb - 1e-15) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  return pts;
}
}  // namespace

std::vector<ClassicalState> integrate_trajectory(const FieldConfig& fields, double m,
                                                 double q, const ClassicalState& init,
                                                 double T_end, double dT_step,
                                                 const IntegrationOptions& opts) {
  if (!(dT_step > 0.0)) throw std::domain_error("integrate_trajectory: dT_step > 0");
  const int n_steps = static_cast<int>(std::llround((T_end - init.T) / dT_step));
  if (n_steps < 1 || std::abs(init.T + n_steps * dT_step - T_end) > 1e-9)
    throw std::domain_error("integrate_trajectory: T_end not reachable in dT_step units");

  std::vector<ClassicalState> out;
  out.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.push_back(init);
  Phase p{init.t, init.x, init.tdot, init.xdot, 0.0};
  for (int i = 0; i < n_steps; ++i) {
    const double Ta = init.T + i * dT_step;
    const double Tb = init.T + (i + 1) * dT_step;
    const std::vector<double> pts = split_points(fields, Ta, Tb);
    for (std::size_t s = 0; s + 1 < pts.size(); ++s)
      p = advance(fields, m, q, p, pts[s], pts[s + 1], opts);
    out.push_back({Tb, p.t, p.x, p.tdot, p.xdot});
  }
  return out;
}

double lagrangian(const FieldConfig& fields, double m, double q,
                  const ClassicalState& s) {
  return -0.5 * m * (s.tdot * s.tdot - s.xdot * s.xdot) -
         q * (s.tdot * fields.phi.value(s.t, s.x) -
              s.xdot * fields.A_x.value(s.t, s.x)) -
         eval(fields.V, s.t, s.x, s.T);
}

double classical_action(const std::vector<ClassicalState>& trajectory,
                        const FieldConfig& fields, double m, double q) {
  if (trajectory.size() < 2)
    throw std::domain_error("classical_action: need at least two samples");
  const double h = trajectory[1].T - trajectory[0].T;
  double S = 0.0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const double w = (i == 0 || i + 1 == trajectory.size()) ? 0.5 : 1.0;
    S += w * lagrangian(fields, m, q, trajectory[i]);
  }
  return S * h;
}

double time_conjugate_momentum(const FieldConfig& fields, double m, double q,
                               const ClassicalState& s) {
  return -m * s.tdot - q * fields.phi.value(s.t, s.x);
}

double electric_field(const FieldConfig& fields, double t, double x) {
  return -fields.phi.dx(t, x) - fields.A_x.dt(t, x);
}

FieldConfig gauge_transform(const FieldConfig& fields, const GaugeFunction& lambda) {
  FieldConfig out = fields;
  const ScalarField phi0 = fields.phi;
  const ScalarField ax0 = fields.A_x;
  const GaugeFunction lam = lambda;

  auto lam_dt = [lam](double t, double x) {
    if (lam.dt) return lam.dt(t, x);
    return (lam.f(t + kDerivStep, x) - lam.f(t - kDerivStep, x)) / (2.0 * kDerivStep);
  };
  auto lam_dx = [lam](double t, double x) {
    if (lam.dx) return lam.dx(t, x);
    return (lam.f(t, x + kDerivStep) - lam.f(t, x - kDerivStep)) / (2.0 * kDerivStep);
  };

  out.phi.f = [phi0, lam_dt](double t, double x) {
    return phi0.value(t, x) - lam_dt(t, x);
  };
  out.A_x.f = [ax0, lam_dx](double t, double x) {
    return ax0.value(t, x) + lam_dx(t, x);
  };
  // Propagate analytic derivatives when the gauge function supplies its
  // second derivatives; otherwise fall back to numeric differentiation.
  if (lam.dtt)
    out.phi.df_dt = [phi0, lam](double t, double x) {
      return phi0.dt(t, x) - lam.dtt(t, x);
    };
  else
    out.phi.df_dt = nullptr;
  if (lam.dtx) {
    out.phi.df_dx = [phi0, lam](double t, double x) {
      return phi0.dx(t, x) - lam.dtx(t, x);
    };
    out.A_x.df_dt = [ax0, lam](double t, double x) {
      return ax0.dt(t, x) + lam.dtx(t, x);
    };
  } else {
    out.phi.df_dx = nullptr;
    out.A_x.df_dt = nullptr;
  }
  if (lam.dxx)
    out.A_x.df_dx = [ax0, lam](double t, double x) {
      return ax0.dx(t, x) + lam.dxx(t, x);
    };
  else
    out.A_x.df_dx = nullptr;

  out.gauge_term.f = lam.f;
  out.gauge_term.df_dt = lam.dt;
  out.gauge_term.df_dx = lam.dx;
  return out;
}

namespace {
struct BvpSolution {
  Phase end;
  double tdot0, xdot0;
};

BvpSolution solve_bvp(double m, double q, const FieldConfig& fields, const Event& e1,
                      const Event& e2, double T1, double T2,
                      const VanVleckOptions& opts) {
  const double dT = T2 - T1;
  if (!(dT > 0.0)) throw std::domain_error("van_vleck_kernel: requires T2 > T1");
  double v[2] = {(e2.t - e1.t) / dT, (e2.x - e1.x) / dT};

  const double h = dT / opts.n_steps;
  auto propagate = [&](double tdot0, double xdot0) {
    Phase p{e1.t, e1.x, tdot0, xdot0, 0.0};
    const std::vector<double> pts = split_points(fields, T1, T2);
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
      const double len = pts[s + 1] - pts[s];
      const int n = std::max(1, static_cast<int>(std::ceil(len / h)));
      for (int i = 0; i < n; ++i)
        p = rk4_step(fields, m, q, pts[s] + i * len / n, p, len / n);
    }
    return p;
  };

  for (int iter = 0; iter < opts.shoot_max_iter; ++iter) {
    const Phase end = propagate(v[0], v[1]);
    const double r[2] = {end.t - e2.t, end.x - e2.x};
    if (std::abs(r[0]) < opts.shoot_tol && std::abs(r[1]) < opts.shoot_tol)
      return {end, v[0], v[1]};

    const double dv = 1e-6;
    const Phase pt = propagate(v[0] + dv, v[1]);
    const Phase px = propagate(v[0], v[1] + dv);
    const double J[2][2] = {{(pt.t - end.t) / dv, (px.t - end.t) / dv},
                            {(pt.x - end.x) / dv, (px.x - end.x) / dv}};
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (!std::isfinite(det) || std::abs(det) < 1e-300)
      throw NoTrajectory("van_vleck_kernel: singular shooting Jacobian");
    v[0] -= (J[1][1] * r[0] - J[0][1] * r[1]) / det;
    v[1] -= (-J[1][0] * r[0] + J[0][0] * r[1]) / det;
  }
  throw NoTrajectory("van_vleck_kernel: shooting did not converge");
}
}  // namespace

double boundary_value_action(double m, double q, const FieldConfig& fields,
                             const Event& e1, const Event& e2, double T1, double T2,
                             const VanVleckOptions& opts) {
  const BvpSolution sol = solve_bvp(m, q, fields, e1, e2, T1, T2, opts);
  // First-order endpoint correction: dS/d(end) is the conjugate momentum,
  // so the residual shooting mismatch does not leak into the Hessian.
  const double p_t = -m * sol.end.tdot - q * fields.phi.value(sol.end.t, sol.end.x);
  const double p_x = m * sol.end.xdot + q * fields.A_x.value(sol.end.t, sol.end.x);
  return sol.end.S + p_t * (e2.t - sol.end.t) + p_x * (e2.x - sol.end.x);
}

VanVleckResult van_vleck_kernel(double m, double q, const FieldConfig& fields,
                                const Event& e1, const Event& e2, double T1,
                                double T2, const VanVleckOptions& opts) {
  auto S = [&](double dt1, double dx1, double dt2, double dx2) {
    return boundary_value_action(m, q, fields, {e1.t + dt1, e1.x + dx1},
                                 {e2.t + dt2, e2.x + dx2}, T1, T2, opts);
  };

  // M_ab = -d^2 S / d e1_a d e2_b; central differences, Richardson pair
  // {h, h/2} to cancel the h^2 truncation without driving h into the
  // roundoff floor that 1/(4h^2) amplifies.
  auto mixed_at = [&](int a, int b, double h) {
    const double a_t = a == 0 ? h : 0.0, a_x = a == 0 ? 0.0 : h;
    const double b_t = b == 0 ? h : 0.0, b_x = b == 0 ? 0.0 : h;
    const double v = (S(a_t, a_x, b_t, b_x) - S(a_t, a_x, -b_t, -b_x) -
                      S(-a_t, -a_x, b_t, b_x) + S(-a_t, -a_x, -b_t, -b_x)) /
                     (4.0 * h * h);
    return -v;
  };
  auto mixed = [&](int a, int b) {
    const double full = mixed_at(a, b, opts.hessian_h);
    const double half = mixed_at(a, b, 0.5 * opts.hessian_h);
    return (4.0 * half - full) / 3.0;
  };

  VanVleckResult res;
  res.M_tt = mixed(0, 0);
  res.M_tx = mixed(0, 1);
  res.M_xt = mixed(1, 0);
  res.M_xx = mixed(1, 1);
  res.D = res.M_tt * res.M_xx - res.M_tx * res.M_xt;
  if (!std::isfinite(res.D) || std::abs(res.D) > opts.caustic_threshold)
    throw CausticError("van_vleck_kernel: determinant out of range");
  res.action = S(0, 0, 0, 0);
  const std::complex<double> root = std::sqrt(std::complex<double>(-res.D, 0.0));
  res.K = root * std::exp(std::complex<double>(0.0, res.action));
  return res;
}

}  // namespace tempath
