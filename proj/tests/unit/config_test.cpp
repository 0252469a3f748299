#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "tactile_rl/config.hpp"

using namespace tactile_rl;
using namespace tactile_rl::config;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_run_config(text, "test.toml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  const auto c = parse_run_config("");
  EXPECT_EQ(c.env.kind, envs::EnvKind::GripperTactile);
  EXPECT_EQ(c.env.f_goal, 1.0);
  EXPECT_EQ(c.td3.total_timesteps, 400000);
  EXPECT_EQ(c.seeds.size(), 5u);
}

TEST(Config, ReadsValues) {
  const auto c = parse_run_config(R"(
# comment line
[env]
kind = "tiago"
f_goal = 2.5   # trailing comment
force_mode = "binary"

[object]
stiffness = 80

[sensor]
f_thresh = [0.02, 0.03]
noise = false

[td3]
hidden = [32, 16]
total_timesteps = 5000

[run]
seeds = [3, 4]
out = "results"
)");
  EXPECT_EQ(c.env.kind, envs::EnvKind::TIAGoTactile);
  EXPECT_EQ(c.env.sim.joint_specs.size(), 10u);
  EXPECT_EQ(c.env.f_goal, 2.5);
  EXPECT_EQ(c.env.force_mode, envs::ForceMode::Binary);
  EXPECT_EQ(c.env.sim.object_init.stiffness, 80.0);
  EXPECT_EQ(c.env.sensor.f_thresh[1], 0.03);
  EXPECT_FALSE(c.env.sensor.noise_enabled);
  EXPECT_EQ(c.td3.hidden, (std::vector<int>{32, 16}));
  EXPECT_EQ(c.td3.total_timesteps, 5000);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(c.out_dir, "results");
}

TEST(Config, UnknownKeyNamesLine) {
  const auto msg = error_of("[env]\nf_goal = 1.0\nfgoal = 2.0\n");
  EXPECT_NE(msg.find("test.toml:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("fgoal"), std::string::npos) << msg;
}

TEST(Config, UnknownSectionRejected) {
  EXPECT_NE(error_of("[physics]\nx = 1\n").find("physics"), std::string::npos);
}

TEST(Config, SyntaxAndTypeErrors) {
  EXPECT_NE(error_of("[env]\nf_goal 1.0\n").find("test.toml:2"), std::string::npos);
  EXPECT_NE(error_of("[env]\nf_goal = \"one\"\n").find("test.toml:2"), std::string::npos);
  EXPECT_NE(error_of("[env]\nkind = \"ur5\"\n").find("test.toml:2"), std::string::npos);
  EXPECT_NE(error_of("[env]\nf_goal = 1\nf_goal = 2\n").find("test.toml:3"), std::string::npos);
  EXPECT_NE(error_of("[env\n").find("test.toml:1"), std::string::npos);
  EXPECT_FALSE(error_of("[env]\nf_goal = -1\n").empty());
  EXPECT_FALSE(error_of("[sim]\nq_min = [0.0]\n").empty());
}

TEST(Config, SnapshotRoundTrip) {
  auto c = parse_run_config("[env]\nkind = \"tiago\"\nf_goal = 0.1\n[object]\nmass = 0.3\n");
  c.env.sensor.sigma = 0.1 + 0.2;  // not representable as a short decimal
  const std::string text = to_toml(c);
  const auto back = parse_run_config(text);
  EXPECT_EQ(to_toml(back), text);
  EXPECT_EQ(back.env.sensor.sigma, c.env.sensor.sigma);
  EXPECT_EQ(back.env.initial_q, c.env.initial_q);
}

TEST(Config, FormatDoubleRoundTrips) {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-7, 123456789.125, 0.1 + 0.2,
                   std::numeric_limits<double>::min(), -1e300}) {
    const auto s = format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(format_double(1.0), "1.0");
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Config, OverridesWinOverFile) {
  Overrides o;
  o.env_kind = envs::EnvKind::TIAGoPALGripper;
  o.seed = 9;
  o.total_timesteps = 123;
  o.noise_enabled = false;
  o.force_mode = envs::ForceMode::Binary;
  o.out_dir = "elsewhere";
  const auto c = parse_run_config("[env]\nkind = \"gripper\"\n[td3]\ntotal_timesteps = 5\n", "x", o);
  EXPECT_EQ(c.env.kind, envs::EnvKind::TIAGoPALGripper);
  EXPECT_EQ(c.env.initial_q.size(), 10u);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{9}));
  EXPECT_EQ(c.env.seed, 9u);
  EXPECT_EQ(c.td3.total_timesteps, 123);
  EXPECT_FALSE(c.env.sensor.noise_enabled);
  EXPECT_EQ(c.env.force_mode, envs::ForceMode::Binary);
  EXPECT_EQ(c.out_dir, "elsewhere");
}

TEST(Config, MissingFileNamesPath) {
  try {
    load_run_config("/definitely/not/here.toml");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/definitely/not/here.toml"), std::string::npos);
  }
}

TEST(Config, LoadsFromDisk) {
  const auto path = std::filesystem::temp_directory_path() / "tactile_rl_config_test.toml";
  {
    std::ofstream out(path);
    out << "[pi]\nkp = 0.5\n";
  }
  EXPECT_EQ(load_run_config(path).pi.kp, 0.5);
  std::filesystem::remove(path);
}
