#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "tactile_rl/config.hpp"

namespace fs = std::filesystem;
using tactile_rl::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "tactile-rl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("tactile_rl_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const char* kShortRun =
    "[env]\nepisode_length = 40\n[td3]\nstart_steps = 100\nbatch_size = 16\neval_window = 3\n"
    "hidden = [16, 16]\n";

}  // namespace

TEST_F(CliTest, TrainWritesArtifacts) {
  const auto cfg = write("run.toml", kShortRun);
  const auto r = invoke({"train", "--config", cfg.string(), "--seed", "3", "--total-timesteps",
                         "400", "--out", path("train")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "train" / "curve.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "train" / "checkpoints" / "best.ckpt"));
  EXPECT_TRUE(fs::exists(dir_ / "train" / "checkpoints" / "final.ckpt"));
  EXPECT_TRUE(fs::exists(dir_ / "train" / "report.json"));
  const auto snapshot = tactile_rl::config::load_run_config(dir_ / "train" / "config.snapshot");
  EXPECT_EQ(snapshot.td3.total_timesteps, 400);
  EXPECT_EQ(snapshot.seeds, (std::vector<std::uint64_t>{3}));
  EXPECT_EQ(slurp(dir_ / "train" / "curve.csv").rfind("step,rolling_mean_return,best_so_far\n", 0), 0u);
}

TEST_F(CliTest, TrainIsBitReproducible) {
  const auto cfg = write("run.toml", kShortRun);
  for (const char* out : {"a", "b"}) {
    ASSERT_EQ(invoke({"train", "--config", cfg.string(), "--seed", "5", "--total-timesteps", "400",
                      "--out", path(out)})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(dir_ / "a" / "curve.csv"), slurp(dir_ / "b" / "curve.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "checkpoints" / "final.ckpt"),
            slurp(dir_ / "b" / "checkpoints" / "final.ckpt"));
}

TEST_F(CliTest, MultiSeedTrainWritesMedianCurve) {
  const auto cfg = write("run.toml", std::string(kShortRun) + "[run]\nseeds = [0, 1, 2]\n");
  const auto r = invoke({"train", "--config", cfg.string(), "--total-timesteps", "240", "--out", path("m")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* s : {"seed-0", "seed-1", "seed-2"}) {
    EXPECT_TRUE(fs::exists(dir_ / "m" / s / "curve.csv")) << s;
  }
  EXPECT_TRUE(fs::exists(dir_ / "m" / "curve.csv"));
}

TEST_F(CliTest, TimestampedRunDirectoriesAreFresh) {
  const auto cfg = write("run.toml", "[run]\nout = \"" + path("runs") + "\"\n");
  ASSERT_EQ(invoke({"rollout", "--config", cfg.string(), "--policy", "zero"}).code, 0);
  ASSERT_EQ(invoke({"rollout", "--config", cfg.string(), "--policy", "zero"}).code, 0);
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "runs")) {
    EXPECT_TRUE(fs::exists(e.path() / "trace.jsonl"));
    ++n;
  }
  EXPECT_EQ(n, 2);
}

TEST_F(CliTest, MissingConfigNamesPath) {
  const auto r = invoke({"train", "--config", path("absent.toml")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("absent.toml"), std::string::npos);
}

TEST_F(CliTest, InvalidConfigReportsLine) {
  const auto cfg = write("bad.toml", "[td3]\ngamma = 0.99\nlearning_rat = 0.1\n");
  const auto r = invoke({"train", "--config", cfg.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.toml:3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("learning_rat"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"fly"}).code, 1);
  EXPECT_EQ(invoke({"rollout", "--force-mode", "analog"}).code, 1);
  EXPECT_EQ(invoke({"rollout", "--policy", "checkpoint", "--out", path("x")}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, PiRolloutTraceShape) {
  const auto r = invoke({"rollout", "--policy", "pi", "--no-noise", "--seed", "0", "--out", path("r")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir_ / "r" / "trace.jsonl");
  std::vector<double> fr;
  std::string line;
  while (std::getline(in, line)) fr.push_back(nlohmann::json::parse(line)["f_raw"][0].get<double>());
  ASSERT_EQ(fr.size(), 300u);
  EXPECT_EQ(fr.front(), 0.0);
  for (std::size_t i = 200; i < 300; ++i) EXPECT_NEAR(fr[i], 1.0, 0.05);
}

TEST_F(CliTest, RolloutBytesRepeat) {
  for (const char* out : {"a", "b"}) {
    ASSERT_EQ(invoke({"rollout", "--policy", "random", "--seed", "4", "--out", path(out)}).code, 0);
  }
  EXPECT_EQ(slurp(dir_ / "a" / "trace.jsonl"), slurp(dir_ / "b" / "trace.jsonl"));
}

TEST_F(CliTest, ZeroRolloutSeesOnlyNoise) {
  ASSERT_EQ(invoke({"rollout", "--policy", "zero", "--seed", "1", "--out", path("z")}).code, 0);
  std::ifstream in(dir_ / "z" / "trace.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["f_contact"][0].get<double>(), 0.0);
    EXPECT_LT(std::abs(j["f_raw"][1].get<double>()), 6 * 0.0077);
  }
}

TEST_F(CliTest, CompareAndEvalWithCheckpoint) {
  const auto cfg = write("run.toml", kShortRun);
  ASSERT_EQ(invoke({"train", "--config", cfg.string(), "--seed", "0", "--total-timesteps", "200",
                    "--out", path("t")})
                .code,
            0);
  const auto ckpt = (dir_ / "t" / "checkpoints" / "final.ckpt").string();
  const auto r = invoke({"compare", "--config", cfg.string(), "--checkpoint", ckpt, "--out", path("c")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("verdict"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir_ / "c" / "report.json"));
  EXPECT_EQ(j["pi_baseline"]["returns"].size(), 10u);
  EXPECT_EQ(j["td3_policy"]["returns"].size(), 10u);
  EXPECT_TRUE(fs::exists(dir_ / "c" / "returns.csv"));

  const auto e = invoke({"eval", "--config", cfg.string(), "--checkpoint", ckpt, "--trials", "3",
                         "--out", path("e")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "e" / "report.json"))["returns"].size(), 3u);
}

TEST_F(CliTest, BadCheckpointIsRuntimeFailure) {
  const auto bad = write("bad.ckpt", "not a checkpoint");
  const auto r = invoke({"compare", "--checkpoint", bad.string(), "--out", path("c")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("checkpoint"), std::string::npos);
  EXPECT_EQ(invoke({"rollout", "--checkpoint", path("none.ckpt"), "--out", path("r")}).code, 2);
}

TEST_F(CliTest, CalibrateSeededSamples) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 0.0077);
  std::ostringstream text;
  for (int i = 0; i < 10000; ++i) text << tactile_rl::config::format_double(n(rng)) << '\n';
  const auto samples = write("samples.txt", text.str());
  const auto r = invoke({"calibrate", samples.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pos = r.out.find("sigma_est = ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(r.out.substr(pos + 12)), 0.0077, 0.0002);
}

TEST_F(CliTest, CalibrateErrors) {
  const auto header = write("h.txt", "force\n0.01\n0.02\n");
  auto r = invoke({"calibrate", header.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("h.txt:1"), std::string::npos) << r.err;
  const auto empty = write("e.txt", "");
  EXPECT_EQ(invoke({"calibrate", empty.string()}).code, 1);
  const auto mid = write("m.txt", "0.01\n0.02\n0.0x3\n");
  r = invoke({"calibrate", mid.string()});
  EXPECT_NE(r.err.find("m.txt:3"), std::string::npos) << r.err;
  EXPECT_EQ(invoke({"calibrate", path("missing.txt")}).code, 1);
}

TEST_F(CliTest, CalibratePatchesConfig) {
  const auto cfg = write("run.toml", "[env]\nf_goal = 2.0\n");
  const auto samples = write("s.txt", "-0.01\n0.01\n");
  const auto r = invoke({"calibrate", samples.string(), "--patch", "--config", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto patched = tactile_rl::config::load_run_config(cfg);
  EXPECT_NEAR(patched.env.sensor.f_thresh[0], 3.0 * std::sqrt(2e-4), 1e-12);
  EXPECT_EQ(patched.env.sensor.f_thresh[0], patched.env.sensor.f_thresh[1]);
  EXPECT_EQ(patched.env.f_goal, 2.0);
}
