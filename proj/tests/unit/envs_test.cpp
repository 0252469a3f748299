#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tactile_rl/envs.hpp"
#include "tactile_rl/trace.hpp"

using namespace tactile_rl::envs;

namespace {

EnvConfig quiet(EnvKind kind = EnvKind::GripperTactile) {
  auto c = make_env_config(kind);
  c.sensor.noise_enabled = false;
  return c;
}

Policy zero_policy(std::size_t dim) {
  return [dim](const Observation&) { return Action(dim, 0.0); };
}

}  // namespace

TEST(Reward, Examples) {
  EXPECT_NEAR(reward(1.2, 0.8, 1.0), -0.4, 1e-12);
  EXPECT_EQ(reward(1.0, 1.0, 1.0), 0.0);
  EXPECT_EQ(reward(0.0, 0.0, 1.0), -2.0);
}

TEST(Reward, SymmetricAndNonPositive) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng), g = u(rng);
    ASSERT_EQ(reward(a, b, g), reward(b, a, g));
    ASSERT_LE(reward(a, b, g), 0.0);
  }
}

TEST(Env, ObservationDimensions) {
  EXPECT_EQ(TactileEnv(make_env_config(EnvKind::GripperTactile)).obs_dim(), 6u);
  EXPECT_EQ(TactileEnv(make_env_config(EnvKind::TIAGoTactile)).obs_dim(), 22u);
  EXPECT_EQ(TactileEnv(make_env_config(EnvKind::TIAGoPALGripper)).obs_dim(), 20u);
  EXPECT_EQ(TactileEnv(make_env_config(EnvKind::GripperTactile)).action_dim(), 2u);
  EXPECT_EQ(TactileEnv(make_env_config(EnvKind::TIAGoTactile)).action_dim(), 10u);
}

TEST(Env, InitialObservationNoiseOff) {
  TactileEnv env(quiet());
  const auto obs = env.reset(0);
  const Observation expected{0.045, 0.045, 0.0, 0.0, -1.0, -1.0};
  EXPECT_EQ(obs, expected);
}

TEST(Env, BinaryModeDeltas) {
  auto c = make_env_config(EnvKind::GripperTactile);
  c.force_mode = ForceMode::Binary;
  TactileEnv env(c);
  auto obs = env.reset(3);
  EXPECT_EQ(obs[4], -1.0);
  EXPECT_EQ(obs[5], -1.0);
  const Action close{-0.05, -0.05};
  for (int i = 0; i < 100; ++i) {
    obs = env.step(close).obs;
    for (int j = 4; j < 6; ++j) ASSERT_TRUE(obs[j] == -1.0 || obs[j] == 0.0);
  }
  EXPECT_EQ(obs[4], 0.0);
}

TEST(Env, ZeroActionReturnIsMinusTwoPerStep) {
  TactileEnv env(quiet());
  EXPECT_EQ(episode_return(env, zero_policy(2), 0), -600.0);
}

TEST(Env, PinnedForceOracleReturnsZero) {
  auto c = quiet();
  const auto& obj = c.sim.object_init;
  const double penetration = c.f_goal / (c.sensor.scale * obj.stiffness);
  c.initial_q = {obj.half_width - penetration, obj.half_width - penetration};
  TactileEnv env(c);
  const double ret = episode_return(env, zero_policy(2), 0);
  EXPECT_NEAR(ret, 0.0, 1e-6);
  EXPECT_EQ(env.object().x, 0.0);
}

TEST(Env, EpisodeTerminatesAtLength) {
  auto c = quiet();
  c.episode_length = 5;
  TactileEnv env(c);
  env.reset(0);
  const Action a{0.0, 0.0};
  for (int i = 0; i < 4; ++i) EXPECT_FALSE(env.step(a).done);
  EXPECT_TRUE(env.step(a).done);
  EXPECT_THROW(env.step(a), std::logic_error);
}

TEST(Env, StepBeforeResetAndWrongDimension) {
  TactileEnv env(quiet());
  const Action a{0.0, 0.0};
  EXPECT_THROW(env.step(a), std::logic_error);
  env.reset(0);
  const Action wrong{0.0, 0.0, 0.0};
  EXPECT_THROW(env.step(wrong), std::invalid_argument);
}

TEST(Env, ActionsAreClampedToVelocityLimits) {
  TactileEnv env(make_env_config(EnvKind::TIAGoTactile));
  env.reset(1);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const auto high = env.action_high();
  for (int i = 0; i < 50; ++i) {
    Action a(env.action_dim());
    for (double& x : a) x = u(rng);
    const auto obs = env.step(a).obs;
    for (std::size_t j = 0; j < a.size(); ++j) {
      ASSERT_LE(std::abs(obs[a.size() + j]), high[j]);
    }
  }
}

TEST(Env, SameSeedSameEpisode) {
  const auto c = make_env_config(EnvKind::GripperTactile);
  const Policy close = [](const Observation&) { return Action{-0.03, -0.02}; };
  TactileEnv a(c), b(c);
  EXPECT_EQ(episode_return(a, close, 17), episode_return(b, close, 17));
  EXPECT_NE(episode_return(a, close, 17), episode_return(b, close, 18));
}

TEST(Env, RandomOffsetWithinRange) {
  auto c = quiet();
  c.placement = ObjectPlacement::RandomOffset;
  TactileEnv env(c);
  bool moved = false;
  for (std::uint64_t s = 0; s < 50; ++s) {
    env.reset(s);
    EXPECT_LE(std::abs(env.object().x), c.sim.object_offset_range);
    moved = moved || env.object().x != 0.0;
  }
  EXPECT_TRUE(moved);
}

TEST(Env, NoiseFreeRewardUsesContactForce) {
  auto c = make_env_config(EnvKind::GripperTactile);
  c.noise_free_reward = true;
  TactileEnv env(c);
  env.reset(0);
  const auto r = env.step(Action{0.0, 0.0});
  EXPECT_EQ(r.reward, -2.0);
}

TEST(Env, NoSensorEnvironmentStillRewardsForce) {
  TactileEnv env(quiet(EnvKind::TIAGoPALGripper));
  EXPECT_EQ(episode_return(env, zero_policy(10), 0), -600.0);
}

TEST(EnvConfig, ParseNamesAndRejectUnknown) {
  EXPECT_EQ(parse_env_kind("gripper"), EnvKind::GripperTactile);
  EXPECT_EQ(parse_env_kind("tiago"), EnvKind::TIAGoTactile);
  EXPECT_EQ(parse_env_kind("tiago-nosensor"), EnvKind::TIAGoPALGripper);
  EXPECT_EQ(parse_env_kind(to_string(EnvKind::TIAGoTactile)), EnvKind::TIAGoTactile);
  EXPECT_EQ(parse_force_mode("binary"), ForceMode::Binary);
  EXPECT_THROW(parse_env_kind("ur5"), std::invalid_argument);
  EXPECT_THROW(parse_force_mode("analog"), std::invalid_argument);
}

TEST(EnvConfig, ValidationErrors) {
  auto c = make_env_config(EnvKind::GripperTactile);
  c.f_goal = 0.0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = make_env_config(EnvKind::GripperTactile);
  c.initial_q = {0.01};
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = make_env_config(EnvKind::GripperTactile);
  c.episode_length = 0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  EXPECT_THROW(TactileEnv{c}, std::invalid_argument);
}

TEST(Trace, JsonLineHasAllFields) {
  TactileEnv env(quiet());
  env.reset(0);
  const Action a{-0.01, -0.01};
  const auto result = env.step(a);
  const auto rec = make_record(env, a, result);
  const auto j = nlohmann::json::parse(to_json_line(rec));
  for (const char* key : {"step", "t", "q", "qdot", "f_contact", "f_raw", "action", "reward", "object_x"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["step"], 1);
  EXPECT_EQ(j["reward"].get<double>(), result.reward);

  std::ostringstream out;
  const std::vector<TraceRecord> trace{rec, rec};
  write_jsonl(out, trace);
  std::istringstream in(out.str());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    EXPECT_TRUE(nlohmann::json::accept(line));
    ++n;
  }
  EXPECT_EQ(n, 2);
}
