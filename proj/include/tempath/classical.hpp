#pragma once

#include <functional>
#include <vector>

#include "tempath/types.hpp"

namespace tempath {

// Classical side of the quadratic Lorentz-invariant Lagrangian,
// reparameterized by lab time T (overdots are d/dT):
//
//   L = -(m/2)(tdot^2 - xdot^2) - q (tdot phi(t,x) - xdot A_x(t,x)) - V(t,x,T)
//
// Equations of motion, with E = -d phi/dx - d A_x/dt:
//   m tddot = q xdot E + dV/dt
//   m xddot = q tdot E - dV/dx

struct ClassicalState {
  double T = 0.0;
  double t = 0.0;
  double x = 0.0;
  double tdot = 1.0;
  double xdot = 0.0;
};

// Scalar field of (t, x) with optional analytic derivatives; central
// differences at h = 1e-6 fill in whatever is missing.
struct ScalarField {
  std::function<double(double t, double x)> f;
  std::function<double(double t, double x)> df_dt;
  std::function<double(double t, double x)> df_dx;

  double value(double t, double x) const { return f ? f(t, x) : 0.0; }
  double dt(double t, double x) const;
  double dx(double t, double x) const;
  bool empty() const { return !f; }
};

using PotentialFn3 = std::function<double(double t, double x, double T)>;

struct FieldConfig {
  ScalarField phi;
  ScalarField A_x;
  PotentialFn3 V;          // direct lab-time-windowed potential, empty = 0
  ScalarField gauge_term;  // record of the last applied gauge function
  // Lab times where the fields switch discontinuously (pulse edges);
  // integration steps are split there.
  std::vector<double> time_breakpoints;
};

// Gauge function Lambda with the derivatives needed to transform fields
// while keeping their derivative information analytic.
struct GaugeFunction {
  std::function<double(double t, double x)> f;
  std::function<double(double t, double x)> dt;
  std::function<double(double t, double x)> dx;
  std::function<double(double t, double x)> dtt;
  std::function<double(double t, double x)> dtx;
  std::function<double(double t, double x)> dxx;
};

struct IntegrationOptions {
  double local_error_tol = 1e-8;
  int max_halvings = 24;
};

std::vector<ClassicalState> integrate_trajectory(const FieldConfig& fields, double m,
                                                 double q, const ClassicalState& init,
                                                 double T_end, double dT_step,
                                                 const IntegrationOptions& opts = {});

// Trapezoid quadrature of L over a uniformly sampled trajectory.
double classical_action(const std::vector<ClassicalState>& trajectory,
                        const FieldConfig& fields, double m, double q);

double lagrangian(const FieldConfig& fields, double m, double q,
                  const ClassicalState& s);

// Conjugate momentum to t, -m tdot - q phi; conserved for static fields.
double time_conjugate_momentum(const FieldConfig& fields, double m, double q,
                               const ClassicalState& s);

// phi -> phi - dLambda/dt, A_x -> A_x + dLambda/dx. The action along any
// trajectory shifts by q (Lambda(end) - Lambda(start)); E is unchanged.
FieldConfig gauge_transform(const FieldConfig& fields, const GaugeFunction& lambda);

double electric_field(const FieldConfig& fields, double t, double x);

struct VanVleckOptions {
  int n_steps = 400;        // RK4 steps per action evaluation
  double hessian_h = 1e-2;  // base displacement; Richardson pair {h, h/2}
  double shoot_tol = 1e-10;
  int shoot_max_iter = 200;
  double caustic_threshold = 1e12;
};

struct VanVleckResult {
  Amplitude K;    // sqrt(-D) exp(i S), overall constant left to normalization
  double action;  // S(e1 -> e2)
  double D;       // det of -d^2 S / d e1 d e2 (2x2)
  double M_tt, M_tx, M_xt, M_xx;
};

// Semiclassical kernel between fixed endpoint events. The classical
// trajectory is found by shooting on the initial velocities; D is the
// van Vleck-Pauli determinant of the action by Richardson-extrapolated
// central differences. The Wick rotation enters only as the -D under the
// root (principal branch).
VanVleckResult van_vleck_kernel(double m, double q, const FieldConfig& fields,
                                const Event& e1, const Event& e2, double T1,
                                double T2, const VanVleckOptions& opts = {});

// Action of the shooting solution alone (RK4-integrated along with the
// trajectory, endpoint-corrected through the conjugate momenta).
double boundary_value_action(double m, double q, const FieldConfig& fields,
                             const Event& e1, const Event& e2, double T1, double T2,
                             const VanVleckOptions& opts = {});

}  // namespace tempath
