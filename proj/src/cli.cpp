#include "tempath/cli.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "tempath/io.hpp"
#include "tempath/lattice.hpp"

namespace tempath::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
const std::vector<std::string> kAllowedKeys = {
    "mass", "formalism", "seed", "oracle_check",
    "packet.t_a", "packet.x_a", "packet.omega_a", "packet.k_a",
    "packet.sigma_t", "packet.sigma_x",
    "spectrum.eigenvalues", "spectrum.weights",
    "field.e0_bar", "field.e1_bar", "field.e0", "field.e1", "field.delta_t",
    "field.t_bar",
    "times.t0", "times.t3",
    "lattice.n_t", "lattice.t_min", "lattice.t_max", "lattice.slices_per_width",
    "lattice.reg_eta", "lattice.method", "lattice.oracle_width",
    "experiment.velocity_resolution", "experiment.curve_points",
};

Formalism parse_formalism(const std::string& s) {
  if (s == "path4d") return Formalism::kPath4D;
  if (s == "schrodinger") return Formalism::kSchrodinger;
  if (s == "both") return Formalism::kBoth;
  throw ConfigError("config: formalism must be path4d | schrodinger | both");
}

std::string formalism_name(Formalism f) {
  switch (f) {
    case Formalism::kPath4D: return "path4d";
    case Formalism::kSchrodinger: return "schrodinger";
    default: return "both";
  }
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return buf;
}

struct OutputTracker {
  fs::path dir;
  std::vector<fs::path> files;

  std::ofstream open(const fs::path& rel) {
    const fs::path full = dir / rel;
    fs::create_directories(full.parent_path());
    std::ofstream out(full);
    if (!out) throw std::ios_base::failure("cannot open " + full.string());
    files.push_back(rel);
    return out;
  }
  void track(const fs::path& rel) { files.push_back(rel); }

  void write_manifest(const std::string& config_path, long seed,
                      const std::string& started) {
    json manifest;
    manifest["version"] = kVersion;
    manifest["config_path"] = config_path;
    manifest["output_dir"] = dir.string();
    manifest["seed"] = seed;
    manifest["started_at"] = started;
    manifest["finished_at"] = iso_timestamp();
    json entries = json::array();
    for (const auto& rel : files) {
      json e;
      e["name"] = rel.generic_string();
      e["bytes"] = static_cast<std::uint64_t>(fs::file_size(dir / rel));
      char hex[24];
      std::snprintf(hex, sizeof hex, "%016llx",
                    static_cast<unsigned long long>(fnv1a64_file((dir / rel).string())));
      e["fnv1a64"] = hex;
      entries.push_back(e);
    }
    manifest["files"] = entries;
    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::ios_base::failure("cannot open manifest.json");
    out << manifest.dump(2) << "\n";
  }
};

void emit_curve_rows(std::ofstream& out, const std::string& formalism,
                     const std::string& p, const std::string& axis, const Curve& c) {
  for (std::size_t i = 0; i < c.coordinate.size(); ++i)
    out << formalism << ',' << p << ',' << axis << ',' << format_double(c.coordinate[i])
        << ',' << format_double(c.density[i]) << "\n";
}

void emit_distributions(std::ofstream& out, const ExperimentResult& res) {
  const std::string name = formalism_name(res.formalism);
  emit_curve_rows(out, name, "combined", "v", res.distributions.combined_v);
  for (std::size_t k = 0; k < res.distributions.component_v.size(); ++k)
    emit_curve_rows(out, name, format_double(res.components[k].p), "v",
                    res.distributions.component_v[k]);
  if (!res.distributions.combined_t.coordinate.empty())
    emit_curve_rows(out, name, "combined", "t", res.distributions.combined_t);
  emit_curve_rows(out, name, "combined", "x", res.distributions.combined_x);
}

json result_json(const ExperimentResult& res) {
  json r;
  r["margin"] = res.margin;
  r["detectable"] = res.detectable;
  r["delta_omega_width"] = res.delta_omega_width;
  r["hump_count"] = res.hump_count;
  r["hump_spacing_v"] = res.hump_spacing_v;
  r["hump_spacing_omega"] = res.hump_spacing_omega;
  r["velocity_resolution"] = res.velocity_resolution;
  json comps = json::array();
  for (const auto& c : res.components) {
    json jc;
    jc["p"] = c.p;
    jc["weight"] = c.weight;
    jc["delta_omega"] = c.delta_omega;
    jc["delta_omega_finite"] = c.delta_omega_finite;
    jc["delta_v"] = c.delta_v;
    jc["v_center"] = c.v_center;
    jc["mean_arrival_t"] = c.mean_arrival_t;
    jc["precession"] = c.precession;
    if (res.formalism == Formalism::kSchrodinger) jc["phase_shift"] = c.phase_shift;
    if (c.oracle_rel_l2 >= 0.0) jc["oracle_rel_l2"] = c.oracle_rel_l2;
    comps.push_back(jc);
  }
  r["components"] = comps;
  return r;
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}
}  // namespace

ExperimentConfig experiment_config_from(const KeyValueConfig& cfg) {
  cfg.require_known(kAllowedKeys);
  ExperimentConfig ex;
  ex.mass = cfg.get_double("mass", 1.0);
  ex.formalism = parse_formalism(cfg.get_string("formalism", "both"));
  ex.oracle_check = cfg.get_bool("oracle_check", false);

  ex.packet.t_a = cfg.get_double("packet.t_a", cfg.get_double("times.t0", 0.0));
  ex.packet.x_a = cfg.get_double("packet.x_a", 0.0);
  const std::string omega = cfg.get_string("packet.omega_a", "auto");
  ex.packet.omega_a = omega == "auto" ? -1.0 : cfg.get_double("packet.omega_a", -1.0);
  ex.packet.k_a = cfg.get_double("packet.k_a", 0.0);
  ex.packet.sigma_t = cfg.get_double("packet.sigma_t", 1.0);
  ex.packet.sigma_x = cfg.get_double("packet.sigma_x", 1.0);

  std::vector<double> eigenvalues = cfg.get_list("spectrum.eigenvalues");
  if (eigenvalues.empty()) throw ConfigError("config: spectrum.eigenvalues required");
  std::vector<double> weights = cfg.get_list("spectrum.weights");
  if (weights.empty()) weights.assign(eigenvalues.size(), 1.0);
  ex.spectrum = DipoleSpectrum::make(eigenvalues, weights);

  ex.field.T_bar = cfg.get_double("field.t_bar", 1.0);
  ex.field.delta_T = cfg.get_double("field.delta_t", 0.0);
  const bool has_bars = cfg.has("field.e0_bar") || cfg.has("field.e1_bar");
  const bool has_strengths = cfg.has("field.e0") || cfg.has("field.e1");
  if (has_bars && has_strengths)
    throw ConfigError("config: give either field.e{0,1}_bar or field.e{0,1} with field.delta_t");
  if (has_strengths) {
    if (!(ex.field.delta_T > 0.0))
      throw ConfigError("config: field.e0/e1 require field.delta_t > 0");
    ex.field.E0_bar = cfg.get_double("field.e0", 0.0) * ex.field.delta_T;
    ex.field.E1_bar = cfg.get_double("field.e1", 0.0) * ex.field.delta_T;
  } else {
    ex.field.E0_bar = cfg.get_double("field.e0_bar", 0.0);
    ex.field.E1_bar = cfg.get_double("field.e1_bar", 0.0);
  }

  ex.T0 = cfg.get_double("times.t0", 0.0);
  ex.T3 = cfg.get_double("times.t3", 4.0);

  ex.lattice_n_t = cfg.get_int("lattice.n_t", 0);
  ex.detector_t_min = cfg.get_double("lattice.t_min", 0.0);
  ex.detector_t_max = cfg.get_double("lattice.t_max", 0.0);
  ex.lattice_slices_per_width = cfg.get_int("lattice.slices_per_width", 8);
  ex.lattice_reg_eta = cfg.get_double("lattice.reg_eta", 0.0);
  const std::string method = cfg.get_string("lattice.method", "dense");
  if (method == "dense")
    ex.lattice_method = ConvolutionMethod::kDense;
  else if (method == "spectral")
    ex.lattice_method = ConvolutionMethod::kSpectral;
  else
    throw ConfigError("config: lattice.method must be dense | spectral");
  ex.oracle_width = cfg.get_double("lattice.oracle_width", 0.05);

  const std::string vres = cfg.get_string("experiment.velocity_resolution", "auto");
  ex.velocity_resolution =
      vres == "auto" ? 0.0 : cfg.get_double("experiment.velocity_resolution", 0.0);
  ex.curve_points = cfg.get_int("experiment.curve_points", 801);
  return ex;
}

int cmd_run(const CommandOptions& opts) {
  return guarded([&]() {
    const std::string started = iso_timestamp();
    const KeyValueConfig raw = KeyValueConfig::parse_file(opts.config_path);
    ExperimentConfig ex = experiment_config_from(raw);
    long seed = opts.seed.value_or(raw.get_int("seed", 1));
    if (opts.oracle_check) ex.oracle_check = *opts.oracle_check;
    if (opts.formalism) ex.formalism = parse_formalism(*opts.formalism);

    const ExperimentOutput out = run_experiment(ex);

    OutputTracker tracker;
    tracker.dir = opts.out_dir;
    fs::create_directories(tracker.dir);

    {
      std::ofstream csv = tracker.open("distributions.csv");
      csv << "formalism,p,axis,coordinate,probability_density\n";
      if (out.path4d) emit_distributions(csv, *out.path4d);
      if (out.schrodinger) emit_distributions(csv, *out.schrodinger);
    }

    json summary;
    summary["schema_version"] = 1;
    summary["version"] = kVersion;
    summary["seed"] = seed;
    json cfg_echo;
    for (const auto& [k, v] : raw.items()) cfg_echo[k] = v;
    summary["config"] = cfg_echo;
    if (out.path4d) summary["results"]["path4d"] = result_json(*out.path4d);
    if (out.schrodinger)
      summary["results"]["schrodinger"] = result_json(*out.schrodinger);
    if (out.path4d && out.schrodinger) {
      const ComparisonReport rep = compare_formalisms(*out.path4d, *out.schrodinger);
      json jc;
      jc["max_precession_diff"] = rep.max_precession_diff;
      jc["hump_count_path4d"] = rep.hump_count_path4d;
      jc["hump_count_schrodinger"] = rep.hump_count_schrodinger;
      jc["split_only_in_path4d"] = rep.split_only_in_path4d;
      jc["hump_spacing_v_path4d"] = rep.hump_spacing_v_path4d;
      jc["l1_physical_velocity"] = rep.l1_physical_velocity;
      jc["max_observable_diff"] = rep.max_observable_diff;
      summary["comparison"] = jc;
    }
    {
      std::ofstream js = tracker.open("summary.json");
      js << summary.dump(2) << "\n";
    }

    if (ex.oracle_check && out.path4d) {
      std::ofstream csv = tracker.open("oracle_errors.csv");
      csv << "formalism,p,rel_l2\n";
      for (const auto& c : out.path4d->components)
        csv << "path4d," << format_double(c.p) << ',' << format_double(c.oracle_rel_l2)
            << "\n";
    }

    {
      std::vector<SvgSeries> vs;
      if (out.path4d)
        vs.push_back({"path4d", &out.path4d->distributions.combined_v, "#1f77b4"});
      if (out.schrodinger)
        vs.push_back(
            {"schrodinger", &out.schrodinger->distributions.combined_v, "#d62728"});
      fs::create_directories(tracker.dir / "plots");
      write_svg_plot((tracker.dir / "plots/velocity.svg").string(),
                     "Combined velocity distribution", "v", vs);
      tracker.track("plots/velocity.svg");

      std::vector<SvgSeries> xs;
      if (out.path4d)
        xs.push_back({"path4d", &out.path4d->distributions.combined_x, "#1f77b4"});
      if (out.schrodinger)
        xs.push_back(
            {"schrodinger", &out.schrodinger->distributions.combined_x, "#d62728"});
      write_svg_plot((tracker.dir / "plots/position.svg").string(),
                     "Position distribution", "x", xs);
      tracker.track("plots/position.svg");

      if (out.path4d) {
        std::vector<SvgSeries> ts{
            {"path4d", &out.path4d->distributions.combined_t, "#1f77b4"}};
        write_svg_plot((tracker.dir / "plots/arrival_time.svg").string(),
                       "Arrival-time distribution", "t", ts);
        tracker.track("plots/arrival_time.svg");
      }
    }

    tracker.write_manifest(opts.config_path, seed, started);
  });
}

int cmd_oracle(const CommandOptions& opts) {
  return guarded([&]() {
    const std::string started = iso_timestamp();
    const KeyValueConfig raw = KeyValueConfig::parse_file(opts.config_path);
    const ExperimentConfig ex = experiment_config_from(raw);
    const long seed = opts.seed.value_or(raw.get_int("seed", 1));
    const GaussianPacket4D packet = ex.make_packet();
    const double span = ex.T3 - ex.T0;

    LatticeConfig base;
    base.T_start = ex.T0;
    base.n_t = ex.lattice_n_t > 0 ? ex.lattice_n_t : 1024;
    base.reg_eta = ex.lattice_reg_eta;
    base.method = ex.lattice_method;
    if (ex.detector_t_max > ex.detector_t_min) {
      base.t_min = ex.detector_t_min;
      base.t_max = ex.detector_t_max;
    } else {
      const GaussianPacket4D end = evolve_gaussian_free(packet, ex.mass, ex.T0, ex.T3);
      base.t_min = packet.t_a() - 11.0 * end.sigma_t();
      base.t_max = end.t_a() + 11.0 * end.sigma_t() + 2.0;
    }

    auto free_target = [&](const Grid1D& grid) {
      const GaussianPacket4D end = evolve_gaussian_free(packet, ex.mass, ex.T0, ex.T3);
      GridWave w;
      w.t = grid;
      w.has_x = false;
      w.data.resize(grid.n, 1);
      for (int i = 0; i < grid.n; ++i)
        w.data(i, 0) = end.amplitude_scale * end.time_factor(grid.point(i));
      return w;
    };

    OutputTracker tracker;
    tracker.dir = opts.out_dir;
    fs::create_directories(tracker.dir);

    {
      std::ofstream csv = tracker.open("oracle_free_convergence.csv");
      csv << "n_slices,rel_l2\n";
      for (int n : {64, 128, 256}) {
        LatticeConfig cfg = base;
        cfg.n_slices = n;
        cfg.epsilon = span / n;
        GridWave psi0 = sample_packet(packet, cfg.t_grid());
        const GridWave res = trotter_propagate(cfg, PotentialSpec{}, psi0, ex.mass).wave;
        csv << n << ',' << format_double(rel_l2_error(res, free_target(cfg.t_grid())))
            << "\n";
      }
    }

    const double p_ref = ex.spectrum.eigenvalues.back();
    {
      // fixed finite pulse, refined slicing; self-convergence against N = 1024
      const double width = std::min(0.5, 0.5 * (ex.field.T_bar - ex.T0));
      auto run_n = [&](int n) {
        LatticeConfig cfg = base;
        cfg.n_slices = n;
        cfg.epsilon = span / n;
        GridWave psi0 = sample_packet(packet, cfg.t_grid());
        return trotter_propagate(cfg, ex.field.finite_pulse(p_ref, width), psi0,
                                 ex.mass)
            .wave;
      };
      const GridWave ref = run_n(1024);
      std::ofstream csv = tracker.open("oracle_pulse_convergence.csv");
      csv << "n_slices,rel_l2\n";
      for (int n : {64, 128, 256})
        csv << n << ',' << format_double(rel_l2_error_mod_phase(run_n(n), ref)) << "\n";
    }

    {
      // impulsive limit: width sweep at slicing tied to the width
      const EvolvedComponent analytic =
          evolve_dipole_component(packet, p_ref, ex.field, ex.mass, ex.T0, ex.T3);
      GridWave target = free_target(base.t_grid());
      for (int i = 0; i < base.n_t; ++i)
        target.data(i, 0) = analytic.packet.amplitude_scale *
                            analytic.packet.time_factor(target.t.point(i));
      std::ofstream csv = tracker.open("oracle_impulsive_convergence.csv");
      csv << "width,rel_l2,order\n";
      double prev = 0.0;
      bool first = true;
      for (double width : {0.1, 0.05, 0.025}) {
        LatticeConfig cfg = base;
        cfg.epsilon = width / ex.lattice_slices_per_width;
        cfg.n_slices = static_cast<int>(std::llround(span / cfg.epsilon));
        cfg.epsilon = span / cfg.n_slices;
        GridWave psi0 = sample_packet(packet, cfg.t_grid());
        const GridWave res =
            trotter_propagate(cfg, ex.field.finite_pulse(p_ref, width), psi0, ex.mass)
                .wave;
        const double err = rel_l2_error_mod_phase(res, target);
        csv << format_double(width) << ',' << format_double(err) << ',';
        if (first)
          csv << "nan";
        else
          csv << format_double(std::log2(prev / err));
        csv << "\n";
        prev = err;
        first = false;
      }
    }

    tracker.write_manifest(opts.config_path, seed, started);
  });
}

}  // namespace tempath::cli
