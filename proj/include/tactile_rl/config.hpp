#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tactile_rl/envs.hpp"
#include "tactile_rl/picontrol.hpp"
#include "tactile_rl/td3.hpp"

namespace tactile_rl::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a run needs. Files use a TOML subset: [section] headers,
// `key = value` lines, `#` comments; values are numbers, booleans, quoted
// strings, or flat arrays of numbers. Unknown sections and keys are errors.
struct RunConfig {
  envs::EnvConfig env = envs::make_env_config(envs::EnvKind::GripperTactile);
  pi::PIGains pi;
  td3::TD3Config td3;
  std::string out_dir = "out";
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  int n_trials = 10;
  // Evaluation trials randomise the object offset when true.
  bool eval_random_offset = false;
};

void validate(const RunConfig& config);

// Applied after the file is read; `env_kind` is applied before any other key
// so that joint tables match the requested environment.
struct Overrides {
  std::optional<envs::EnvKind> env_kind;
  std::optional<std::uint64_t> seed;          // replaces the seed list and env seed
  std::optional<long> total_timesteps;
  std::optional<bool> noise_enabled;
  std::optional<envs::ForceMode> force_mode;
  std::optional<std::string> out_dir;
};

RunConfig parse_run_config(const std::string& text, const std::string& source_name = "<config>",
                           const Overrides& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides = {});
void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Full effective configuration with every default written out. Parsing the
/// result reproduces `config` exactly.
std::string to_toml(const RunConfig& config);

/// Formats a double so that it parses back to the identical value.
std::string format_double(double v);

}  // namespace tactile_rl::config
