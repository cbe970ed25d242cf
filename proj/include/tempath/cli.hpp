#pragma once

#include <optional>
#include <string>

#include "tempath/config.hpp"
#include "tempath/experiment.hpp"

namespace tempath::cli {

inline constexpr const char* kVersion = "0.1.0";

struct CommandOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<long> seed;
  std::optional<bool> oracle_check;
  std::optional<std::string> formalism;
};

// Exit codes: 0 ok, 1 I/O failure, 2 config error, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

int cmd_run(const CommandOptions& opts);
int cmd_oracle(const CommandOptions& opts);

// Exposed for tests: build the experiment config from a parsed file.
ExperimentConfig experiment_config_from(const KeyValueConfig& cfg);

}  // namespace tempath::cli
