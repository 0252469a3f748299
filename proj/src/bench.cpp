#include "tactile_rl/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "tactile_rl/checkpoint.hpp"
#include "tactile_rl/config.hpp"

namespace tactile_rl::bench {

namespace {

nlohmann::ordered_json env_snapshot(const envs::EnvConfig& env_config, const pi::PIGains& gains) {
  config::RunConfig cfg;
  cfg.env = env_config;
  cfg.pi = gains;
  nlohmann::ordered_json j;
  j["toml"] = config::to_toml(cfg);
  return j;
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::PiBaseline, Method::Td3Policy, Method::Random, Method::Zero}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name + "'");
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::PiBaseline: return "pi_baseline";
    case Method::Td3Policy: return "td3_policy";
    case Method::Random: return "random";
    case Method::Zero: return "zero";
  }
  return "?";
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_std of an empty sample");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::string format_mean_std(const MeanStd& stats) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", stats.mean, stats.std);
  return buf;
}

bool TrialReport::consistent() const {
  if (returns.empty()) return false;
  const auto s = mean_std(returns);
  return s.mean == mean && s.std == std;
}

nlohmann::ordered_json to_json(const TrialReport& report) {
  nlohmann::ordered_json j;
  j["method"] = to_string(report.method);
  j["n_trials"] = report.returns.size();
  j["mean"] = report.mean;
  j["std"] = report.std;
  j["summary"] = format_mean_std({report.mean, report.std});
  j["returns"] = report.returns;
  j["seeds"] = report.seeds;
  j["config"] = report.config;
  return j;
}

TrialReport report_from_json(const nlohmann::json& j) {
  TrialReport r;
  r.method = parse_method(j.at("method").get<std::string>());
  r.returns = j.at("returns").get<std::vector<double>>();
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  r.mean = j.at("mean").get<double>();
  r.std = j.at("std").get<double>();
  if (j.contains("config")) r.config = j.at("config");
  return r;
}

TrialReport run_trials(const envs::EnvConfig& env_config, Method method, int n_trials,
                       std::uint64_t base_seed, const pi::PIGains& gains,
                       const td3::Agent* policy) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");
  if (method == Method::Td3Policy && policy == nullptr) {
    throw std::invalid_argument("td3_policy trials need a policy");
  }
  TrialReport report;
  report.method = method;
  report.config = env_snapshot(env_config, gains);
  for (int i = 0; i < n_trials; ++i) {
    const std::uint64_t seed = trial_seed(base_seed, i);
    envs::TactileEnv env(env_config);
    double ret = 0.0;
    switch (method) {
      case Method::PiBaseline:
        ret = pi::run_baseline(env, gains, seed).episode_return;
        break;
      case Method::Td3Policy: {
        td3::Rng unused(seed);
        ret = envs::episode_return(
            env, [&](const envs::Observation& obs) { return policy->act(obs, false, unused); },
            seed);
        break;
      }
      case Method::Random: {
        td3::Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
        const auto high = env.action_high();
        ret = envs::episode_return(
            env,
            [&](const envs::Observation&) {
              envs::Action a(high.size());
              for (std::size_t k = 0; k < a.size(); ++k) {
                a[k] = std::uniform_real_distribution<double>(-high[k], high[k])(rng);
              }
              return a;
            },
            seed);
        break;
      }
      case Method::Zero: {
        const envs::Action zero(env.action_dim(), 0.0);
        ret = envs::episode_return(env, [&](const envs::Observation&) { return zero; }, seed);
        break;
      }
    }
    report.returns.push_back(ret);
    report.seeds.push_back(seed);
  }
  const auto stats = mean_std(report.returns);
  report.mean = stats.mean;
  report.std = stats.std;
  return report;
}

TrialReport random_baseline(const envs::EnvConfig& env_config, int n_episodes,
                            std::uint64_t base_seed) {
  return run_trials(env_config, Method::Random, n_episodes, base_seed);
}

Comparison compare(const envs::EnvConfig& env_config, const pi::PIGains& gains,
                   const td3::Agent& policy, int n_trials, std::uint64_t base_seed,
                   bool include_random) {
  Comparison c;
  c.baseline = run_trials(env_config, Method::PiBaseline, n_trials, base_seed, gains);
  c.policy = run_trials(env_config, Method::Td3Policy, n_trials, base_seed, gains, &policy);
  if (include_random) c.random = run_trials(env_config, Method::Random, n_trials, base_seed, gains);
  if (c.policy.mean > c.baseline.mean) {
    c.verdict = "td3_policy > pi_baseline";
  } else if (c.policy.mean < c.baseline.mean) {
    c.verdict = "pi_baseline > td3_policy";
  } else {
    c.verdict = "tie";
  }
  return c;
}

Comparison compare(const envs::EnvConfig& env_config, const pi::PIGains& gains,
                   const std::filesystem::path& checkpoint, int n_trials, std::uint64_t base_seed,
                   bool include_random) {
  const td3::Agent policy = td3::load_checkpoint(checkpoint);
  return compare(env_config, gains, policy, n_trials, base_seed, include_random);
}

nlohmann::ordered_json to_json(const Comparison& comparison) {
  nlohmann::ordered_json j;
  j["verdict"] = comparison.verdict;
  j["pi_baseline"] = to_json(comparison.baseline);
  j["td3_policy"] = to_json(comparison.policy);
  if (comparison.random) j["random"] = to_json(*comparison.random);
  return j;
}

std::vector<double> median_curve(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) throw std::invalid_argument("median_curve needs at least one curve");
  const std::size_t len = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != len) throw std::invalid_argument("median_curve: curves differ in length");
  }
  std::vector<double> out(len);
  std::vector<double> column(curves.size());
  const std::size_t mid = (curves.size() - 1) / 2;  // lower median for even counts
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t k = 0; k < curves.size(); ++k) column[k] = curves[k][t];
    std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(mid), column.end());
    out[t] = column[mid];
  }
  return out;
}

void write_curve_csv(std::ostream& out, std::span<const td3::CurvePoint> curve) {
  out << "step,rolling_mean_return,best_so_far\n";
  for (const auto& p : curve) {
    out << p.step << ',' << config::format_double(p.rolling_mean) << ','
        << config::format_double(p.best_so_far) << '\n';
  }
}

void write_returns_csv(std::ostream& out, const Comparison& comparison) {
  out << "method,trial,seed,return\n";
  const auto rows = [&](const TrialReport& r) {
    for (std::size_t i = 0; i < r.returns.size(); ++i) {
      out << to_string(r.method) << ',' << i << ',' << r.seeds[i] << ','
          << config::format_double(r.returns[i]) << '\n';
    }
  };
  rows(comparison.baseline);
  rows(comparison.policy);
  if (comparison.random) rows(*comparison.random);
}

}  // namespace tactile_rl::bench
