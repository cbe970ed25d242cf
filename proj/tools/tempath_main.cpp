#include <CLI11.hpp>

#include "tempath/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tempath: 4D path-integral Stern-Gerlach-in-time simulator"};
  app.require_subcommand(1);

  tempath::cli::CommandOptions opts;
  std::string formalism;
  long seed = -1;
  bool oracle_check = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "configuration file (key = value)")
        ->required();
    cmd->add_option("--out", opts.out_dir, "output directory")->required();
    cmd->add_option("--seed", seed, "seed recorded in the manifest");
    cmd->add_option("--formalism", formalism, "path4d | schrodinger | both");
  };

  CLI::App* run = app.add_subcommand("run", "run the experiment and write results");
  add_common(run);
  run->add_flag("--oracle-check", oracle_check,
                "re-derive each path4d component on the lattice");

  CLI::App* oracle =
      app.add_subcommand("oracle", "lattice-vs-analytic validation tables");
  add_common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tempath::cli::kExitConfig;
  }

  if (seed >= 0) opts.seed = seed;
  if (!formalism.empty()) opts.formalism = formalism;
  if (oracle_check) opts.oracle_check = true;

  if (run->parsed()) return tempath::cli::cmd_run(opts);
  return tempath::cli::cmd_oracle(opts);
}
