#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "tempath/experiment.hpp"

using namespace tempath;

namespace {
ExperimentConfig headline_config(double sigma_t = 1.0, double e1_bar = 0.05) {
  ExperimentConfig cfg;
  cfg.mass = 1.0;
  cfg.packet = {0.0, 0.0, 1.0, 0.1, sigma_t, 1.0};
  cfg.spectrum = DipoleSpectrum::make({-1.0, 1.0}, {0.5, 0.5});
  cfg.field = {0.0, e1_bar, 1.0, 0.0};
  cfg.T0 = 0.0;
  cfg.T3 = 4.0;
  cfg.formalism = Formalism::kBoth;
  return cfg;
}

double curve_mass(const Curve& c) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < c.coordinate.size(); ++i)
    acc += 0.5 * (c.coordinate[i + 1] - c.coordinate[i]) *
           (c.density[i] + c.density[i + 1]);
  return acc;
}
}  // namespace

TEST_CASE("headline scenario: two humps vs one") {
  const ExperimentConfig cfg = headline_config();
  const ExperimentOutput out = run_experiment(cfg);
  REQUIRE(out.path4d.has_value());
  REQUIRE(out.schrodinger.has_value());

  SUBCASE("path4d splits into one hump per eigenvalue") {
    CHECK(out.path4d->hump_count == 2);
    CHECK(out.path4d->hump_spacing_v == doctest::Approx(2.0 * 0.05).epsilon(1e-12));
    // sense: the +p component is shifted by sign(-p E1)
    for (const auto& c : out.path4d->components) {
      CHECK(c.delta_v == doctest::Approx(-c.p * 0.05).epsilon(1e-12));
      if (c.p > 0) CHECK(c.v_center < 1.0);
      if (c.p < 0) CHECK(c.v_center > 1.0);
    }
  }

  SUBCASE("schrodinger shows exactly one hump, phase differences only") {
    CHECK(out.schrodinger->hump_count == 1);
    CHECK(out.schrodinger->hump_spacing_v == 0.0);
    for (const auto& c : out.schrodinger->components) {
      CHECK(c.delta_v == 0.0);
      CHECK(c.phase_shift != 0.0);
    }
  }

  SUBCASE("margin honestly reports the humps as unresolved at these widths") {
    CHECK(out.path4d->margin == doctest::Approx(0.1).epsilon(1e-10));
    CHECK_FALSE(out.path4d->detectable);
  }

  SUBCASE("combined distributions are normalized and weighted sums") {
    CHECK(std::abs(curve_mass(out.path4d->distributions.combined_v) - 1.0) < 1e-6);
    CHECK(std::abs(curve_mass(out.path4d->distributions.combined_x) - 1.0) < 1e-6);
    CHECK(std::abs(curve_mass(out.path4d->distributions.combined_t) - 1.0) < 1e-6);
    const auto& d = out.path4d->distributions;
    for (std::size_t i = 0; i < d.combined_v.density.size(); i += 97) {
      double sum = 0.0;
      for (std::size_t k = 0; k < d.component_v.size(); ++k)
        sum += out.path4d->components[k].weight * d.component_v[k].density[i];
      CHECK(d.combined_v.density[i] == doctest::Approx(sum).epsilon(1e-12));
    }
  }

  SUBCASE("comparison report") {
    const ComparisonReport rep = compare_formalisms(*out.path4d, *out.schrodinger);
    CHECK(rep.max_precession_diff == 0.0);
    CHECK(rep.hump_count_path4d == 2);
    CHECK(rep.hump_count_schrodinger == 1);
    CHECK(rep.split_only_in_path4d);
  }
}

TEST_CASE("detectability") {
  const GaussianPacket4D packet = GaussianPacket4D::make(0, 0, 1.0, 0.1, 1.0, 1.0, 0.0);

  SUBCASE("zero split is never detectable") {
    const Detectability d = detectability(0.0, packet);
    CHECK_FALSE(d.detectable);
    CHECK(d.margin == 0.0);
  }

  SUBCASE("margin = 1 is reported but flagged false (strict inequality)") {
    const Detectability probe = detectability(0.0, packet);
    const Detectability d = detectability(probe.delta_omega_width, packet);
    CHECK(d.margin == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_FALSE(d.detectable);
  }

  SUBCASE("sigma_t -> 0 drives the margin to zero") {
    double prev = 1e300;
    for (double st : {1.0, 0.1, 0.01}) {
      const GaussianPacket4D p = GaussianPacket4D::make(0, 0, 1.0, 0.1, st, 1.0, 0.0);
      const Detectability d = detectability(0.1, p);
      CHECK(d.margin < prev);
      prev = d.margin;
    }
    CHECK(prev < 1e-2);
  }
}

TEST_CASE("detectable flag flips along a sigma_t sweep at strong coupling") {
  bool seen_true = false, seen_false = false;
  double prev_margin = 1e300;
  for (double st : {1.0, 0.56, 0.32, 0.18, 0.1, 0.056, 0.032, 0.018, 0.01}) {
    ExperimentConfig cfg = headline_config(st, /*e1_bar=*/2.0);
    cfg.formalism = Formalism::kPath4D;
    const ExperimentOutput out = run_experiment(cfg);
    CHECK(out.path4d->margin < prev_margin);
    prev_margin = out.path4d->margin;
    (out.path4d->detectable ? seen_true : seen_false) = true;
  }
  CHECK(seen_true);
  CHECK(seen_false);
}

TEST_CASE("sigma_t sweep: path4d converges to the schrodinger distribution") {
  double prev_l1 = 1e300;
  double last = 0.0;
  for (double st : {1.0, 0.32, 0.1, 0.032, 0.01}) {
    const ExperimentOutput out = run_experiment(headline_config(st));
    const ComparisonReport rep = compare_formalisms(*out.path4d, *out.schrodinger);
    CHECK(rep.l1_physical_velocity < prev_l1);
    prev_l1 = rep.l1_physical_velocity;
    last = rep.l1_physical_velocity;
  }
  CHECK(last < 1e-3);
}

TEST_CASE("margin grows with the coupling") {
  double prev = 0.0;
  for (double e1 : {0.05, 0.1, 0.2, 0.4}) {
    const ExperimentOutput out = run_experiment(headline_config(1.0, e1));
    CHECK(out.path4d->margin > prev);
    prev = out.path4d->margin;
  }
}

TEST_CASE("zero E1: both formalisms give identical observables") {
  ExperimentConfig cfg = headline_config(1.0, 0.0);
  cfg.field.E0_bar = 0.3;  // pure precession pulse
  const ExperimentOutput out = run_experiment(cfg);
  const ComparisonReport rep = compare_formalisms(*out.path4d, *out.schrodinger);
  CHECK(rep.max_observable_diff < 1e-8);
  CHECK(rep.hump_count_path4d == 1);
  CHECK(rep.hump_count_schrodinger == 1);
  CHECK_FALSE(rep.split_only_in_path4d);
  CHECK(rep.max_precession_diff == 0.0);
  for (const auto& c : out.path4d->components)
    CHECK(c.delta_omega == doctest::Approx(-c.p * 0.3).epsilon(1e-12));
}

TEST_CASE("config and window guards") {
  ExperimentConfig bad = headline_config();
  bad.field.T_bar = 9.0;  // outside (T0, T3)
  CHECK_THROWS_AS(run_experiment(bad), ConfigError);

  ExperimentConfig tight = headline_config();
  tight.detector_t_min = -0.5;
  tight.detector_t_max = 0.5;  // the beam drifts to t ~ 4
  CHECK_THROWS_AS(run_experiment(tight), DetectorWindow);
}

TEST_CASE("determinism and thread-cap equivalence") {
  ExperimentConfig cfg = headline_config();
  cfg.spectrum = DipoleSpectrum::make({-1.0, -0.3, 0.3, 1.0}, {0.25, 0.25, 0.25, 0.25});
  const ExperimentOutput a = run_experiment(cfg);
  setenv("TEMPATH_THREADS", "2", 1);
  const ExperimentOutput b = run_experiment(cfg);
  unsetenv("TEMPATH_THREADS");
  REQUIRE(a.path4d.has_value());
  REQUIRE(b.path4d.has_value());
  for (std::size_t i = 0; i < a.path4d->components.size(); ++i) {
    CHECK(a.path4d->components[i].delta_v == b.path4d->components[i].delta_v);
    CHECK(a.path4d->components[i].mean_arrival_t ==
          b.path4d->components[i].mean_arrival_t);
  }
  for (std::size_t i = 0; i < a.path4d->distributions.combined_v.density.size(); ++i)
    CHECK(a.path4d->distributions.combined_v.density[i] ==
          b.path4d->distributions.combined_v.density[i]);
}

TEST_CASE("oracle check attaches per-component lattice errors") {
  ExperimentConfig cfg = headline_config();
  cfg.spectrum = DipoleSpectrum::make({1.0}, {1.0});
  cfg.formalism = Formalism::kPath4D;
  cfg.oracle_check = true;
  cfg.lattice_n_t = 1024;
  const ExperimentOutput out = run_experiment(cfg);
  REQUIRE(out.path4d.has_value());
  for (const auto& c : out.path4d->components) {
    CHECK(c.oracle_rel_l2 >= 0.0);
    CHECK(c.oracle_rel_l2 < 1e-4);
  }
}
