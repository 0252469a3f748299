#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tactile_rl/envs.hpp"
#include "tactile_rl/picontrol.hpp"
#include "tactile_rl/td3.hpp"

namespace tactile_rl::bench {

enum class Method { PiBaseline, Td3Policy, Random, Zero };

std::string_view to_string(Method method);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // n-1 denominator; 0 for a single sample
};

MeanStd mean_std(std::span<const double> values);

/// "mean ± std" with two decimals, e.g. "-198.01 ± 14.52".
std::string format_mean_std(const MeanStd& stats);

struct TrialReport {
  Method method = Method::PiBaseline;
  std::vector<double> returns;
  std::vector<std::uint64_t> seeds;
  double mean = 0.0;
  double std = 0.0;
  nlohmann::ordered_json config;  // effective configuration snapshot

  /// True when mean/std recomputed from `returns` equal the stored values.
  bool consistent() const;
};

nlohmann::ordered_json to_json(const TrialReport& report);
TrialReport report_from_json(const nlohmann::json& j);

/// Seed for trial i of a run started from `base_seed`.
inline std::uint64_t trial_seed(std::uint64_t base_seed, int i) {
  return base_seed + static_cast<std::uint64_t>(i);
}

/// One episode per seed, each on a fresh environment instance.
TrialReport run_trials(const envs::EnvConfig& env_config, Method method, int n_trials,
                       std::uint64_t base_seed, const pi::PIGains& gains = {},
                       const td3::Agent* policy = nullptr);

/// Mean return of uniformly random joint-velocity actions.
TrialReport random_baseline(const envs::EnvConfig& env_config, int n_episodes,
                            std::uint64_t base_seed);

struct Comparison {
  TrialReport baseline;
  TrialReport policy;
  std::optional<TrialReport> random;
  std::string verdict;  // which method had the higher mean return
};

Comparison compare(const envs::EnvConfig& env_config, const pi::PIGains& gains,
                   const td3::Agent& policy, int n_trials, std::uint64_t base_seed,
                   bool include_random = true);

/// Loads the policy first; an unreadable checkpoint throws td3::CheckpointError.
Comparison compare(const envs::EnvConfig& env_config, const pi::PIGains& gains,
                   const std::filesystem::path& checkpoint, int n_trials, std::uint64_t base_seed,
                   bool include_random = true);

nlohmann::ordered_json to_json(const Comparison& comparison);

/// Elementwise median of equal-length curves. For an even count the lower of
/// the two middle values is taken.
std::vector<double> median_curve(const std::vector<std::vector<double>>& curves);

void write_curve_csv(std::ostream& out, std::span<const td3::CurvePoint> curve);
void write_returns_csv(std::ostream& out, const Comparison& comparison);

}  // namespace tactile_rl::bench
