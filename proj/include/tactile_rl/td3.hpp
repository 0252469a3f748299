#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "tactile_rl/envs.hpp"
#include "tactile_rl/mlp.hpp"
#include "tactile_rl/replay_buffer.hpp"

namespace tactile_rl::td3 {

struct TD3Config {
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  double target_noise_std = 0.2;   // in units of the action half-range
  double target_noise_clip = 0.5;
  double exploration_noise_std = 0.1;
  std::size_t batch_size = 100;
  std::size_t buffer_capacity = 1'000'000;
  double learning_rate = 1e-3;
  long start_steps = 1000;
  long total_timesteps = 400'000;
  int eval_window = 20;
  std::vector<int> hidden = {64, 64};
  bool normalize_observations = true;
};

void validate(const TD3Config& config);

// Fixed affine map applied to observations before they reach any network:
// x' = (x - offset) * scale.
struct ObsNormalizer {
  Vector offset;
  Vector scale;

  static ObsNormalizer identity(std::size_t dim);
  // Joint positions to [-1, 1] over their range, velocities by v_max, force
  // deltas by f_goal.
  static ObsNormalizer for_env(const envs::TactileEnv& env);

  Matrix apply(const Matrix& obs) const;
};

// Mean-squared regression loss of one critic on (obs, action) -> target.
// Accumulates parameter gradients into `grads` when non-null.
double critic_loss(const Mlp& critic, const Matrix& obs, const Matrix& action,
                   const Matrix& target, Mlp* grads);

// Deterministic policy-gradient objective -mean Q(s, actor(s)); gradients
// flow into the actor only.
double actor_loss(const Mlp& actor, const Mlp& critic, const Matrix& obs, Mlp* grads);

// Actions inside the agent are normalised to [-1, 1]; act() rescales them to
// joint velocities.
class Agent {
 public:
  Agent(std::size_t obs_dim, std::vector<double> action_high, ObsNormalizer normalizer,
        const TD3Config& config, std::uint64_t init_seed);
  Agent(Mlp actor, Mlp critic1, Mlp critic2, std::vector<double> action_high,
        ObsNormalizer normalizer, const TD3Config& config);

  /// Normalised action in [-1, 1]^d, with optional exploration noise.
  Vector act_normalized(std::span<const double> obs, bool explore, Rng& rng) const;
  envs::Action act(std::span<const double> obs, bool explore, Rng& rng) const;
  envs::Action scale_action(const Vector& normalized) const;

  /// Clipped double-Q targets for a batch (normalised obs in, as stored).
  Matrix targets(const Batch& batch, Rng& rng) const;

  double critic_update(const Batch& batch, Rng& rng);
  /// One policy ascent step followed by soft updates of all target networks.
  double actor_update(const Batch& batch);
  /// Critic update, plus an actor update every `policy_delay` critic updates.
  void update(const Batch& batch, Rng& rng);

  long critic_updates() const { return critic_updates_; }
  long actor_updates() const { return actor_updates_; }

  const Mlp& actor() const { return actor_; }
  const Mlp& critic1() const { return critic1_; }
  const Mlp& critic2() const { return critic2_; }
  const Mlp& actor_target() const { return actor_target_; }
  const Mlp& critic1_target() const { return critic1_target_; }
  const Mlp& critic2_target() const { return critic2_target_; }
  Mlp& mutable_actor() { return actor_; }
  Mlp& mutable_critic1() { return critic1_; }
  Mlp& mutable_critic2() { return critic2_; }

  const std::vector<double>& action_high() const { return action_high_; }
  const ObsNormalizer& normalizer() const { return normalizer_; }
  const TD3Config& config() const { return config_; }
  std::size_t obs_dim() const { return normalizer_.offset.size(); }
  std::size_t action_dim() const { return action_high_.size(); }

 private:
  struct Networks {
    Mlp actor, critic1, critic2;
  };
  static Networks init_networks(std::size_t obs_dim, std::size_t action_dim,
                                const TD3Config& config, std::uint64_t seed);
  Agent(Networks nets, std::vector<double> action_high, ObsNormalizer normalizer,
        const TD3Config& config);

  TD3Config config_;
  std::vector<double> action_high_;
  ObsNormalizer normalizer_;
  Mlp actor_, critic1_, critic2_;
  Mlp actor_target_, critic1_target_, critic2_target_;
  Adam actor_opt_, critic1_opt_, critic2_opt_;
  long critic_updates_ = 0;
  long actor_updates_ = 0;
};

struct CurvePoint {
  long step = 0;          // environment steps taken when the episode ended
  int episode = 0;
  double episode_return = 0.0;
  double rolling_mean = 0.0;   // over the last eval_window episodes
  double best_so_far = 0.0;
};

struct CheckpointEvent {
  long step = 0;
  int episode = 0;
  double rolling_mean = 0.0;
};

struct TrainHooks {
  std::function<void(const Agent&, const CheckpointEvent&)> on_checkpoint;
  std::function<void(const CurvePoint&)> on_episode;
};

struct TrainResult {
  std::vector<CurvePoint> curve;  // one point per episode once the window is full
  std::vector<CheckpointEvent> checkpoints;
  std::optional<Mlp> best_actor;  // set at the first checkpoint
  Agent final_agent;
};

/// Runs the full training protocol on `env`.
TrainResult train(envs::TactileEnv& env, const TD3Config& config, std::uint64_t seed,
                  const TrainHooks& hooks = {});

/// Agent from `base` with its actor replaced, e.g. to evaluate a best checkpoint.
Agent with_actor(const Agent& base, const Mlp& actor);

}  // namespace tactile_rl::td3
