#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tempath/dipole.hpp"
#include "tempath/kernels.hpp"
#include "tempath/lattice.hpp"
#include "tempath/schrodinger.hpp"

namespace tempath {

// End-to-end Stern-Gerlach-in-time harness: decompose the prepared packet
// over the dipole spectrum, evolve each component in the selected
// formalism(s), and assemble velocity/time/position distributions, hump
// structure, and the detectability verdict.
//
// The velocity axis is the drift rate of the particle's time coordinate,
// v = d<t>/dT (= omega/m for the free packet); the pulse shifts component p
// by delta_v = -p E1bar / m. Two renderings are produced:
//  - a structure rendering with a configurable resolution width (default
//    min spacing / 8), which shows the beam's component structure and is
//    what the hump counter sees;
//  - a physical rendering whose per-component width is the packet's energy
//    width delta-omega mapped to velocity (delta_omega/m), shared by both
//    formalisms since the prepared packet is the same. Resolvability is
//    carried by the margin, not by the structure rendering.

enum class Formalism { kPath4D, kSchrodinger, kBoth };

struct PacketParams {
  double t_a = 0.0;
  double x_a = 0.0;
  double omega_a = -1.0;  // <= 0: use sqrt(k_a^2 + m^2)
  double k_a = 0.0;
  double sigma_t = 1.0;
  double sigma_x = 1.0;
};

struct ExperimentConfig {
  double mass = 1.0;
  PacketParams packet;
  DipoleSpectrum spectrum;
  ImpulsiveField field;
  double T0 = 0.0;
  double T3 = 4.0;
  Formalism formalism = Formalism::kBoth;
  bool oracle_check = false;
  // Detector t-window; also the oracle grid. n_t <= 0 disables the window guard.
  double detector_t_min = 0.0;
  double detector_t_max = 0.0;
  int lattice_n_t = 0;
  int lattice_slices_per_width = 8;
  double lattice_reg_eta = 0.0;
  ConvolutionMethod lattice_method = ConvolutionMethod::kDense;
  double oracle_width = 0.05;  // finite pulse width for the cross-check
  double velocity_resolution = 0.0;  // 0 = auto
  int curve_points = 801;
  int n_threads = 0;  // 0 = TEMPATH_THREADS, else 1

  GaussianPacket4D make_packet() const;
  void validate() const;
};

struct Curve {
  std::vector<double> coordinate;
  std::vector<double> density;
};

struct ComponentOutcome {
  double p = 0.0;
  double weight = 0.0;
  double delta_omega = 0.0;
  double delta_omega_finite = 0.0;
  double delta_v = 0.0;
  double v_center = 0.0;
  double mean_arrival_t = 0.0;
  double precession = 0.0;    // formula-level -(p E0bar + p E1bar T_bar)
  double phase_shift = 0.0;   // Schrodinger accumulated phase (0 for path4d)
  double oracle_rel_l2 = -1.0;  // < 0 when the oracle check did not run
};

struct Distributions {
  Curve combined_t;  // arrival-time marginal (path4d only)
  Curve combined_x;
  Curve combined_v;           // structure rendering
  Curve combined_v_physical;  // energy-width rendering
  std::vector<Curve> component_v;
};

struct ExperimentResult {
  Formalism formalism = Formalism::kPath4D;
  std::vector<ComponentOutcome> components;
  double hump_spacing_v = 0.0;
  double hump_spacing_omega = 0.0;
  double delta_omega_width = 0.0;  // energy width of the prepared packet
  double margin = 0.0;
  bool detectable = false;
  int hump_count = 0;
  double velocity_resolution = 0.0;  // width actually used for the structure curve
  Distributions distributions;
};

struct ExperimentOutput {
  std::optional<ExperimentResult> path4d;
  std::optional<ExperimentResult> schrodinger;
};

ExperimentOutput run_experiment(const ExperimentConfig& config);

// Energy width of the prepared packet, max(1/sigma_t, (k/omega)/sigma_x);
// margin = |delta_omega_split| / delta_omega; detectable iff margin > 1.
struct Detectability {
  bool detectable = false;
  double margin = 0.0;
  double delta_omega_width = 0.0;
};
Detectability detectability(double delta_omega_split, const GaussianPacket4D& packet);

struct ComparisonReport {
  double max_precession_diff = 0.0;
  int hump_count_path4d = 0;
  int hump_count_schrodinger = 0;
  bool split_only_in_path4d = false;
  double hump_spacing_v_path4d = 0.0;
  double l1_physical_velocity = 0.0;
  // max pointwise density difference across the shared x and v observables
  double max_observable_diff = 0.0;
};

ComparisonReport compare_formalisms(const ExperimentResult& path4d,
                                    const ExperimentResult& schrodinger);

// Local maxima above 5% of the global maximum.
int count_humps(const Curve& curve, double threshold_fraction = 0.05);

// L1 distance between two curves sampled on the same coordinates.
double curve_l1_distance(const Curve& a, const Curve& b);

int thread_budget(int requested_components);

}  // namespace tempath
