#include <doctest.h>

#include <cmath>
#include <random>

#include "tempath/classical.hpp"
#include "tempath/dipole.hpp"
#include "tempath/lattice.hpp"
#include "tempath/schrodinger.hpp"

using namespace tempath;

namespace {
GaussianPacket4D standard_packet() {
  return GaussianPacket4D::make(0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0);
}

// Lattice run of the finite-width pulse against the t-grid packet.
GridWave lattice_pulse_run(const ImpulsiveField& imp, double p, double width,
                           double T3, int n_t = 1024) {
  LatticeConfig cfg;
  cfg.epsilon = width / 8.0;
  cfg.n_slices = static_cast<int>(std::llround(T3 / cfg.epsilon));
  cfg.T_start = 0.0;
  cfg.t_min = -46.0;
  cfg.t_max = 50.0;
  cfg.n_t = n_t;
  GridWave psi0 = sample_packet(standard_packet(), cfg.t_grid());
  return trotter_propagate(cfg, imp.finite_pulse(p, width), psi0, 1.0).wave;
}

GridWave analytic_component_wave(const ImpulsiveField& imp, double p, double T3,
                                 const Grid1D& grid) {
  const EvolvedComponent c =
      evolve_dipole_component(standard_packet(), p, imp, 1.0, 0.0, T3);
  GridWave w;
  w.t = grid;
  w.has_x = false;
  w.data.resize(grid.n, 1);
  for (int i = 0; i < grid.n; ++i)
    w.data(i, 0) = c.packet.amplitude_scale * c.packet.time_factor(grid.point(i));
  return w;
}
}  // namespace

TEST_CASE("dipole interaction energy") {
  CHECK(dipole_interaction_energy(0.0, 1.0, 2.0, 0.0, 1.0, 0.5, 1.0, 0.5) == 0.0);
  CHECK(dipole_interaction_energy(0.7, 1.2, 2.0, 0.0, 1.0, 0.0, 1.0, 0.5) ==
        doctest::Approx(-0.7 * 1.2).epsilon(1e-14));
  CHECK(dipole_interaction_energy(0.7, 1.2, 2.0, 0.0, 1.0, 0.3, 1.0, 2.0) == 0.0);

  // matches -p E with E = -d phi/dx from the capacitor potential
  FieldConfig cap;
  cap.phi.f = [](double t, double x) { return -(1.2 + 2.0 * t) * x; };
  for (double t : {0.0, 0.4, 1.3}) {
    const double E = electric_field(cap, t, 0.8);
    CHECK(dipole_interaction_energy(0.7, 1.2, 2.0, 0.0, 1.0, t, 1.0, 0.5) ==
          doctest::Approx(-0.7 * E).epsilon(1e-9));
  }
}

TEST_CASE("dipole time kernel: zero-field reduction, modulus, domain") {
  const ImpulsiveField zero{0.0, 0.0, 1.0, 0.0};
  const ImpulsiveField imp{0.3, 0.2, 1.0, 0.0};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ts(-8.0, 8.0);
  for (int i = 0; i < 1000; ++i) {
    const double t0 = ts(rng), t3 = ts(rng);
    const Amplitude kfree = free_time_kernel(1.0, 0.0, 4.0, t0, t3);
    const Amplitude kzero = dipole_time_kernel(1.0, 0.7, zero, 0.0, 4.0, t0, t3);
    CHECK(std::abs(kzero - kfree) <= 1e-12 * std::abs(kfree));
    const Amplitude kp = dipole_time_kernel(1.0, 0.7, imp, 0.0, 4.0, t0, t3);
    CHECK(std::abs(kp) == doctest::Approx(std::abs(kfree)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(dipole_time_kernel(1.0, 1.0, imp, 2.0, 4.0, 0.0, 0.0),
                  std::domain_error);  // T_bar outside (T0, T3)
}

TEST_CASE("evolved component: precession-only and splitting regimes") {
  const GaussianPacket4D p4 = standard_packet();

  SUBCASE("pE1 = 0, pE0 != 0: pure precession") {
    const ImpulsiveField imp{0.4, 0.0, 1.0, 0.0};
    const EvolvedComponent c = evolve_dipole_component(p4, 1.0, imp, 1.0, 0.0, 4.0);
    CHECK(c.delta_v == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c.delta_omega == doctest::Approx(-0.4).epsilon(1e-14));
    CHECK(c.delta_omega_finite == doctest::Approx(-0.4).epsilon(1e-14));
  }

  SUBCASE("pE1 > 0: velocity reduced by |p E1bar|/m") {
    const ImpulsiveField imp{0.0, 0.05, 1.0, 0.0};
    const EvolvedComponent c = evolve_dipole_component(p4, 1.0, imp, 1.0, 0.0, 4.0);
    CHECK(c.delta_v < 0.0);
    CHECK(c.delta_v == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(c.mean_arrival_t == doctest::Approx(4.0 - 0.05 * 3.0).epsilon(1e-10));
  }

  SUBCASE("antisymmetry: delta_v(p) = -delta_v(-p)") {
    const ImpulsiveField imp{0.1, 0.07, 1.5, 0.0};
    for (double p : {0.3, 0.9, 2.0}) {
      const EvolvedComponent plus = evolve_dipole_component(p4, p, imp, 1.0, 0.0, 4.0);
      const EvolvedComponent minus =
          evolve_dipole_component(p4, -p, imp, 1.0, 0.0, 4.0);
      CHECK(plus.delta_v == doctest::Approx(-minus.delta_v).epsilon(1e-12));
    }
  }

  SUBCASE("zero field reduces to the free evolution exactly") {
    const ImpulsiveField zero{0.0, 0.0, 1.0, 0.0};
    const EvolvedComponent c = evolve_dipole_component(p4, 1.0, zero, 1.0, 0.0, 4.0);
    const GaussianPacket4D free = evolve_gaussian_free(p4, 1.0, 0.0, 4.0);
    for (double t : {2.0, 3.5, 4.0, 5.5})
      CHECK(std::abs(c.packet.time_factor(t) - free.time_factor(t)) < 1e-12);
    CHECK(c.delta_v == 0.0);
  }

  SUBCASE("detector window guard") {
    const ImpulsiveField imp{0.0, 0.05, 1.0, 0.0};
    CHECK_THROWS_AS(evolve_dipole_component(p4, 1.0, imp, 1.0, 0.0, 4.0,
                                            std::make_pair(-1.0, 1.0)),
                    DetectorWindow);
  }
}

TEST_CASE("lattice oracle validates the impulsive component") {
  const ImpulsiveField imp{0.0, 0.05, 1.0, 0.0};
  const double p = 1.0, T3 = 4.0;

  SUBCASE("finite width 0.05: mean arrival and wave agree to O(width)") {
    const GridWave pulsed = lattice_pulse_run(imp, p, 0.05, T3);
    double s0 = 0, s1 = 0;
    for (int i = 0; i < pulsed.t.n; ++i) {
      const double rho = pulsed.t.weight(i) * std::norm(pulsed.data(i, 0));
      s0 += rho;
      s1 += rho * pulsed.t.point(i);
    }
    const double mean_lattice = s1 / s0;
    const EvolvedComponent analytic =
        evolve_dipole_component(standard_packet(), p, imp, 1.0, 0.0, T3);
    CHECK(std::abs(mean_lattice - analytic.mean_arrival_t) < 2.5e-4);
    const GridWave target = analytic_component_wave(imp, p, T3, pulsed.t);
    CHECK(rel_l2_error_mod_phase(pulsed, target) < 2e-4);
  }

  SUBCASE("three-slice composition: width extrapolation hits the closed form") {
    // widths {0.1, 0.05, 0.025}, quadratic Richardson in the width;
    // residual drops the O(width) and O(E^2) pieces the formula discards
    const GridWave w1 = lattice_pulse_run(imp, p, 0.1, T3);
    const GridWave w2 = lattice_pulse_run(imp, p, 0.05, T3);
    const GridWave w3 = lattice_pulse_run(imp, p, 0.025, T3);
    const GridWave target = analytic_component_wave(imp, p, T3, w1.t);
    // align phases against the target before extrapolating
    auto aligned = [&](const GridWave& w) {
      std::complex<double> ov(0, 0);
      for (int i = 0; i < w.t.n; ++i)
        ov += w.t.weight(i) * std::conj(w.data(i, 0)) * target.data(i, 0);
      GridWave out = w;
      out.data *= ov / std::abs(ov);
      return out;
    };
    GridWave extrap = aligned(w3);
    extrap.data = (8.0 * aligned(w3).data - 6.0 * aligned(w2).data + aligned(w1).data) / 3.0;
    CHECK(rel_l2_error_mod_phase(extrap, target) < 1e-5);
  }
}

TEST_CASE("precession shift: closed form and equality with the reference") {
  const ImpulsiveField imp{0.1, 0.0, 3.0, 0.0};
  CHECK(precession_shift(0.0, imp) == 0.0);
  CHECK(precession_shift(1.0, imp) == doctest::Approx(-0.1).epsilon(1e-15));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const ImpulsiveField f{u(rng), u(rng), u(rng), 0.0};
    const double p = u(rng);
    CHECK(precession_shift(p, f) == schrodinger_precession(p, f));
  }
}
