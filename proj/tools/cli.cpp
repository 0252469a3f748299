#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tactile_rl/bench.hpp"
#include "tactile_rl/checkpoint.hpp"
#include "tactile_rl/config.hpp"
#include "tactile_rl/picontrol.hpp"
#include "tactile_rl/tactile.hpp"
#include "tactile_rl/td3.hpp"
#include "tactile_rl/trace.hpp"

namespace tactile_rl::cli {
namespace {

namespace fs = std::filesystem;

// Usage and configuration problems map to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool no_noise = false;
  std::string force_mode;
  std::string env;
  std::optional<long> total_timesteps;
};

struct PolicyOptions {
  std::string policy;
  std::string checkpoint;
  std::optional<int> trials;
};

config::RunConfig load(const GlobalOptions& g) {
  config::Overrides o;
  try {
    if (!g.env.empty()) o.env_kind = envs::parse_env_kind(g.env);
    if (!g.force_mode.empty()) o.force_mode = envs::parse_force_mode(g.force_mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  o.seed = g.seed;
  o.total_timesteps = g.total_timesteps;
  if (g.no_noise) o.noise_enabled = false;
  if (g.config_path.empty()) return config::parse_run_config("", "<defaults>", o);
  return config::load_run_config(g.config_path, o);
}

std::string timestamp_id(const std::string& command) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  localtime_r(&t, &tm);
  std::ostringstream id;
  id << std::put_time(&tm, "%Y%m%d-%H%M%S") << '-' << command;
  return id.str();
}

// `--out` names the run directory itself; otherwise a fresh timestamped
// directory is created below the configured output root.
fs::path make_run_dir(const GlobalOptions& g, const config::RunConfig& cfg,
                      const std::string& command) {
  fs::path dir;
  if (!g.out.empty()) {
    dir = g.out;
  } else {
    const fs::path base = fs::path(cfg.out_dir) / timestamp_id(command);
    dir = base;
    for (int i = 1; fs::exists(dir); ++i) dir = base.string() + "-" + std::to_string(i);
  }
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

envs::EnvConfig eval_env(const config::RunConfig& cfg) {
  auto env = cfg.env;
  if (cfg.eval_random_offset) env.placement = envs::ObjectPlacement::RandomOffset;
  return env;
}

bench::Method parse_policy(const PolicyOptions& p) {
  std::string name = p.policy;
  if (name.empty()) name = p.checkpoint.empty() ? "pi" : "checkpoint";
  if (name == "pi") return bench::Method::PiBaseline;
  if (name == "checkpoint") {
    if (p.checkpoint.empty()) throw UsageError("--policy checkpoint requires --checkpoint PATH");
    return bench::Method::Td3Policy;
  }
  if (name == "random") return bench::Method::Random;
  if (name == "zero") return bench::Method::Zero;
  throw UsageError("unknown policy '" + name + "' (expected pi, checkpoint, random or zero)");
}

int cmd_train(const GlobalOptions& g, std::ostream& out) {
  const auto cfg = load(g);
  const fs::path dir = make_run_dir(g, cfg, "train");
  write_text(dir / "config.snapshot", config::to_toml(cfg));

  const bool multi = cfg.seeds.size() > 1;
  nlohmann::ordered_json report;
  report["command"] = "train";
  report["env"] = envs::to_string(cfg.env.kind);
  report["total_timesteps"] = cfg.td3.total_timesteps;
  report["seeds"] = nlohmann::ordered_json::array();
  std::vector<std::vector<double>> rolling, best;
  std::vector<std::vector<td3::CurvePoint>> curves;

  for (const std::uint64_t seed : cfg.seeds) {
    const fs::path seed_dir = multi ? dir / ("seed-" + std::to_string(seed)) : dir;
    fs::create_directories(seed_dir / "checkpoints");
    envs::TactileEnv env(cfg.env);
    td3::TrainHooks hooks;
    hooks.on_checkpoint = [&](const td3::Agent& agent, const td3::CheckpointEvent&) {
      td3::save_checkpoint(seed_dir / "checkpoints" / "best.ckpt", agent);
    };
    const auto result = td3::train(env, cfg.td3, seed, hooks);
    td3::save_checkpoint(seed_dir / "checkpoints" / "final.ckpt", result.final_agent);

    std::ostringstream csv;
    bench::write_curve_csv(csv, result.curve);
    write_text(seed_dir / "curve.csv", csv.str());

    nlohmann::ordered_json s;
    s["seed"] = seed;
    s["episodes"] = result.curve.empty() ? 0 : result.curve.back().episode;
    if (!result.curve.empty()) {
      s["final_rolling_mean"] = result.curve.back().rolling_mean;
      s["best_rolling_mean"] = result.curve.back().best_so_far;
    }
    s["checkpoints"] = nlohmann::ordered_json::array();
    for (const auto& c : result.checkpoints) {
      s["checkpoints"].push_back({{"step", c.step}, {"episode", c.episode}, {"rolling_mean", c.rolling_mean}});
    }
    report["seeds"].push_back(s);

    out << "seed " << seed << ": ";
    if (result.curve.empty()) {
      out << "no full " << cfg.td3.eval_window << "-episode window\n";
    } else {
      out << "final rolling mean " << std::fixed << std::setprecision(2)
          << result.curve.back().rolling_mean << ", best " << result.curve.back().best_so_far
          << std::defaultfloat << '\n';
    }
    curves.push_back(result.curve);
  }

  if (multi) {
    bool aligned = !curves.front().empty();
    for (const auto& c : curves) aligned = aligned && c.size() == curves.front().size();
    if (aligned) {
      for (const auto& c : curves) {
        rolling.emplace_back();
        best.emplace_back();
        for (const auto& p : c) {
          rolling.back().push_back(p.rolling_mean);
          best.back().push_back(p.best_so_far);
        }
      }
      const auto med = bench::median_curve(rolling);
      const auto med_best = bench::median_curve(best);
      std::vector<td3::CurvePoint> median = curves.front();
      for (std::size_t i = 0; i < median.size(); ++i) {
        median[i].rolling_mean = med[i];
        median[i].best_so_far = med_best[i];
      }
      std::ostringstream csv;
      bench::write_curve_csv(csv, median);
      write_text(dir / "curve.csv", csv.str());
    }
  }
  write_json(dir / "report.json", report);
  out << "run directory: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_eval(const GlobalOptions& g, const PolicyOptions& p, std::ostream& out) {
  const auto cfg = load(g);
  const auto method = parse_policy(p);
  std::optional<td3::Agent> agent;
  if (method == bench::Method::Td3Policy) agent = td3::load_checkpoint(p.checkpoint, cfg.td3);
  const fs::path dir = make_run_dir(g, cfg, "eval");
  write_text(dir / "config.snapshot", config::to_toml(cfg));
  const int n = p.trials.value_or(cfg.n_trials);
  const auto report = bench::run_trials(eval_env(cfg), method, n, cfg.seeds.front(), cfg.pi,
                                        agent ? &*agent : nullptr);
  write_json(dir / "report.json", bench::to_json(report));
  out << bench::to_string(method) << ": " << bench::format_mean_std({report.mean, report.std})
      << " over " << n << " trials\n";
  return kExitOk;
}

int cmd_compare(const GlobalOptions& g, const PolicyOptions& p, std::ostream& out) {
  if (p.checkpoint.empty()) throw UsageError("compare requires --checkpoint PATH");
  const auto cfg = load(g);
  const td3::Agent agent = td3::load_checkpoint(p.checkpoint, cfg.td3);
  const fs::path dir = make_run_dir(g, cfg, "compare");
  write_text(dir / "config.snapshot", config::to_toml(cfg));
  const int n = p.trials.value_or(cfg.n_trials);
  const auto c = bench::compare(eval_env(cfg), cfg.pi, agent, n, cfg.seeds.front());
  auto j = bench::to_json(c);
  j["checkpoint"] = p.checkpoint;
  write_json(dir / "report.json", j);
  std::ostringstream csv;
  bench::write_returns_csv(csv, c);
  write_text(dir / "returns.csv", csv.str());
  out << "pi_baseline: " << bench::format_mean_std({c.baseline.mean, c.baseline.std}) << '\n'
      << "td3_policy:  " << bench::format_mean_std({c.policy.mean, c.policy.std}) << '\n';
  if (c.random) out << "random:      " << bench::format_mean_std({c.random->mean, c.random->std}) << '\n';
  out << "verdict: " << c.verdict << '\n';
  return kExitOk;
}

int cmd_rollout(const GlobalOptions& g, const PolicyOptions& p, std::ostream& out) {
  const auto cfg = load(g);
  const auto method = parse_policy(p);
  std::optional<td3::Agent> agent;
  if (method == bench::Method::Td3Policy) agent = td3::load_checkpoint(p.checkpoint, cfg.td3);
  const fs::path dir = make_run_dir(g, cfg, "rollout");
  write_text(dir / "config.snapshot", config::to_toml(cfg));

  const std::uint64_t seed = cfg.seeds.front();
  envs::TactileEnv env(cfg.env);
  std::vector<envs::TraceRecord> trace;
  double total = 0.0;
  if (method == bench::Method::PiBaseline) {
    auto run = pi::run_baseline(env, cfg.pi, seed);
    trace = std::move(run.trace);
    total = run.episode_return;
  } else {
    td3::Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const auto high = env.action_high();
    auto obs = env.reset(seed);
    while (!env.done()) {
      envs::Action a(env.action_dim(), 0.0);
      if (method == bench::Method::Td3Policy) {
        a = agent->act(obs, false, rng);
      } else if (method == bench::Method::Random) {
        for (std::size_t k = 0; k < a.size(); ++k) {
          a[k] = std::uniform_real_distribution<double>(-high[k], high[k])(rng);
        }
      }
      auto result = env.step(a);
      total += result.reward;
      trace.push_back(envs::make_record(env, a, result));
      obs = std::move(result.obs);
    }
  }
  std::ostringstream jsonl;
  envs::write_jsonl(jsonl, trace);
  write_text(dir / "trace.jsonl", jsonl.str());
  out << bench::to_string(method) << " rollout return " << config::format_double(total) << '\n'
      << "trace: " << (dir / "trace.jsonl").string() << '\n';
  return kExitOk;
}

std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read samples file '" + path + "'");
  std::vector<double> samples;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": not a number: '" +
                       std::string(begin, end) + "'");
    }
    samples.push_back(v);
  }
  if (samples.empty()) throw UsageError(path + ": no samples");
  if (samples.size() < 2) throw UsageError(path + ": need at least two samples");
  return samples;
}

int cmd_calibrate(const GlobalOptions& g, const std::string& samples_path, bool patch,
                  std::ostream& out) {
  const auto samples = read_samples(samples_path);
  const auto cal = sensor::calibrate_threshold(samples);
  out << "samples = " << samples.size() << '\n'
      << "sigma_est = " << config::format_double(cal.sigma_est) << '\n'
      << "f_thresh = " << config::format_double(cal.f_thresh) << '\n';
  if (patch) {
    if (g.config_path.empty()) throw UsageError("--patch needs --config PATH");
    auto cfg = config::load_run_config(g.config_path);
    cfg.env.sensor.sigma = cal.sigma_est;
    cfg.env.sensor.f_thresh = {cal.f_thresh, cal.f_thresh};
    write_text(g.config_path, config::to_toml(cfg));
    out << "patched " << g.config_path << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tactile gripper simulation, PI baseline and TD3 force-control training"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "Run configuration file");
  app.add_option("--seed", g.seed, "Single seed replacing the configured seed list");
  app.add_option("--out", g.out, "Run directory (default: timestamped under [run] out)");
  app.add_flag("--no-noise", g.no_noise, "Disable sensor noise");
  app.add_option("--force-mode", g.force_mode, "Force observation mode")
      ->check(CLI::IsMember({"raw", "binary"}));
  app.add_option("--env", g.env, "Environment")
      ->check(CLI::IsMember({"gripper", "tiago", "tiago-nosensor"}));
  app.add_option("--total-timesteps", g.total_timesteps, "Training steps per seed")
      ->check(CLI::PositiveNumber);

  PolicyOptions p;
  const auto add_policy = [&](CLI::App* sub) {
    sub->add_option("--policy", p.policy, "pi, checkpoint, random or zero")
        ->check(CLI::IsMember({"pi", "checkpoint", "random", "zero"}));
    sub->add_option("--checkpoint", p.checkpoint, "Policy checkpoint file");
  };
  const auto add_trials = [&](CLI::App* sub) {
    sub->add_option("--trials", p.trials, "Number of evaluation trials")->check(CLI::PositiveNumber);
  };

  auto* train = app.add_subcommand("train", "Train TD3 agents, one per seed");
  auto* eval = app.add_subcommand("eval", "Evaluate one policy over seeded trials");
  add_policy(eval);
  add_trials(eval);
  auto* compare = app.add_subcommand("compare", "PI baseline against a trained policy");
  compare->add_option("--checkpoint", p.checkpoint, "Policy checkpoint file")->required();
  add_trials(compare);
  auto* rollout = app.add_subcommand("rollout", "Record one episode as a JSONL trace");
  add_policy(rollout);
  std::string samples_path;
  bool patch = false;
  auto* calibrate = app.add_subcommand("calibrate", "Noise threshold from no-contact samples");
  calibrate->add_option("samples", samples_path, "File with one reading per line")->required();
  calibrate->add_flag("--patch", patch, "Write sigma and thresholds into the --config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(g, out);
    if (*eval) return cmd_eval(g, p, out);
    if (*compare) return cmd_compare(g, p, out);
    if (*rollout) return cmd_rollout(g, p, out);
    if (*calibrate) return cmd_calibrate(g, samples_path, patch, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const config::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const td3::CheckpointError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace tactile_rl::cli
