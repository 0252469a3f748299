#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tactile_rl/simcore.hpp"
#include "tactile_rl/tactile.hpp"

namespace tactile_rl::envs {

using sim::PerFinger;

enum class EnvKind { GripperTactile, TIAGoTactile, TIAGoPALGripper };
enum class ForceMode { Raw, Binary };
enum class ObjectPlacement { Centered, RandomOffset, Fixed };

std::string_view to_string(EnvKind kind);
std::string_view to_string(ForceMode mode);
std::string_view to_string(ObjectPlacement placement);
// Accepts the canonical names above and the CLI aliases
// gripper / tiago / tiago-nosensor.
EnvKind parse_env_kind(std::string_view name);
ForceMode parse_force_mode(std::string_view name);
ObjectPlacement parse_placement(std::string_view name);

bool has_tactile(EnvKind kind);
std::size_t joint_count(EnvKind kind);

struct EnvConfig {
  EnvKind kind = EnvKind::GripperTactile;
  double f_goal = 1.0;
  int episode_length = 300;
  ForceMode force_mode = ForceMode::Raw;
  // Reward from the noise-free scaled contact force instead of the sensed one.
  bool noise_free_reward = false;
  ObjectPlacement placement = ObjectPlacement::Centered;
  double object_offset = 0.0;  // only read for ObjectPlacement::Fixed
  sim::SimConfig sim;
  sensor::SensorModel sensor;
  // Joint positions at reset. Fingers start fully open; arm and torso values
  // are placeholder pre-grasp angles.
  std::vector<double> initial_q;
  std::uint64_t seed = 0;
};

EnvConfig make_env_config(EnvKind kind);
void validate(const EnvConfig& config);

using Observation = std::vector<double>;
using Action = std::vector<double>;

struct StepInfo {
  PerFinger<double> f_contact{0.0, 0.0};
  PerFinger<double> f_raw{0.0, 0.0};
  PerFinger<int> f_binary{0, 0};
  double object_x = 0.0;
  int step = 0;
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

/// Force-matching reward: -(|f_right - f_goal| + |f_left - f_goal|).
double reward(double f_right, double f_left, double f_goal);

class TactileEnv {
 public:
  explicit TactileEnv(EnvConfig config);

  /// Starts a new episode continuing the current noise stream.
  Observation reset();
  /// Reseeds the noise stream, then starts a new episode.
  Observation reset(std::uint64_t seed);

  StepResult step(std::span<const double> action);

  std::size_t obs_dim() const;
  std::size_t action_dim() const { return config_.sim.joint_specs.size(); }
  /// Per-joint velocity bound; actions are symmetric in [-high, high].
  std::vector<double> action_high() const;

  const EnvConfig& config() const { return config_; }
  const sim::ChainState& chain() const { return chain_; }
  const sim::ObjectState& object() const { return object_; }
  const sensor::ForceReading& last_reading() const { return reading_; }
  int step_index() const { return step_; }
  bool done() const { return step_ >= config_.episode_length; }

 private:
  Observation observe() const;
  PerFinger<double> sensed(const sensor::ForceReading& reading) const;

  EnvConfig config_;
  sensor::Rng rng_;
  sim::ChainState chain_;
  sim::ObjectState object_;
  sensor::ForceReading reading_;
  int step_ = 0;
  bool started_ = false;
};

using Policy = std::function<Action(const Observation&)>;

/// Sum of rewards over one full episode from a reset.
double episode_return(TactileEnv& env, const Policy& policy,
                      std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace tactile_rl::envs
