#include "tactile_rl/envs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tactile_rl::envs {

std::string_view to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::GripperTactile: return "GripperTactile";
    case EnvKind::TIAGoTactile: return "TIAGoTactile";
    case EnvKind::TIAGoPALGripper: return "TIAGoPALGripper";
  }
  return "?";
}

std::string_view to_string(ForceMode mode) { return mode == ForceMode::Raw ? "raw" : "binary"; }

std::string_view to_string(ObjectPlacement placement) {
  switch (placement) {
    case ObjectPlacement::Centered: return "centered";
    case ObjectPlacement::RandomOffset: return "random";
    case ObjectPlacement::Fixed: return "fixed";
  }
  return "?";
}

EnvKind parse_env_kind(std::string_view name) {
  if (name == "gripper" || name == "GripperTactile") return EnvKind::GripperTactile;
  if (name == "tiago" || name == "TIAGoTactile") return EnvKind::TIAGoTactile;
  if (name == "tiago-nosensor" || name == "TIAGoPALGripper") return EnvKind::TIAGoPALGripper;
  throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

ForceMode parse_force_mode(std::string_view name) {
  if (name == "raw") return ForceMode::Raw;
  if (name == "binary") return ForceMode::Binary;
  throw std::invalid_argument("unknown force mode '" + std::string(name) + "'");
}

ObjectPlacement parse_placement(std::string_view name) {
  if (name == "centered") return ObjectPlacement::Centered;
  if (name == "random") return ObjectPlacement::RandomOffset;
  if (name == "fixed") return ObjectPlacement::Fixed;
  throw std::invalid_argument("unknown object placement '" + std::string(name) + "'");
}

bool has_tactile(EnvKind kind) { return kind != EnvKind::TIAGoPALGripper; }

std::size_t joint_count(EnvKind kind) { return kind == EnvKind::GripperTactile ? 2 : 10; }

EnvConfig make_env_config(EnvKind kind) {
  EnvConfig config;
  config.kind = kind;
  if (kind == EnvKind::GripperTactile) {
    config.sim = sim::gripper_sim_config();
  } else {
    config.sim = sim::tiago_sim_config();
  }
  for (const auto& spec : config.sim.joint_specs) config.initial_q.push_back(spec.q_max);
  if (kind != EnvKind::GripperTactile) {
    // Placeholder pre-grasp posture (torso, arm 1..7); fingers stay open.
    const double pregrasp[] = {0.15, 0.20, -1.34, -0.20, 1.94, -1.57, 1.37, 0.0};
    for (std::size_t j = 0; j < 8; ++j) config.initial_q[j] = pregrasp[j];
  }
  return config;
}

void validate(const EnvConfig& config) {
  sim::validate(config.sim);
  sensor::validate(config.sensor);
  if (!(config.f_goal > 0.0)) throw std::invalid_argument("f_goal must be positive");
  if (config.episode_length < 1) throw std::invalid_argument("episode_length must be at least 1");
  if (config.sim.joint_specs.size() != joint_count(config.kind)) {
    throw std::invalid_argument("environment " + std::string(to_string(config.kind)) + " needs " +
                                std::to_string(joint_count(config.kind)) + " joints");
  }
  if (config.initial_q.size() != config.sim.joint_specs.size()) {
    throw std::invalid_argument("initial_q must have one entry per joint");
  }
  for (std::size_t j = 0; j < config.initial_q.size(); ++j) {
    const auto& spec = config.sim.joint_specs[j];
    if (config.initial_q[j] < spec.q_min || config.initial_q[j] > spec.q_max) {
      throw std::invalid_argument("initial_q for '" + spec.name + "' is outside joint limits");
    }
  }
}

double reward(double f_right, double f_left, double f_goal) {
  return -(std::abs(f_right - f_goal) + std::abs(f_left - f_goal));
}

TactileEnv::TactileEnv(EnvConfig config) : config_(std::move(config)), rng_(config_.seed) {
  validate(config_);
}

Observation TactileEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  return reset();
}

Observation TactileEnv::reset() {
  const auto& sim = config_.sim;
  chain_.q = config_.initial_q;
  chain_.qdot.assign(chain_.q.size(), 0.0);
  chain_.t = 0.0;

  object_ = sim.object_init;
  object_.v = 0.0;
  switch (config_.placement) {
    case ObjectPlacement::Centered: object_.x = 0.0; break;
    case ObjectPlacement::Fixed: object_.x = config_.object_offset; break;
    case ObjectPlacement::RandomOffset: {
      std::uniform_real_distribution<double> offset(-sim.object_offset_range,
                                                    sim.object_offset_range);
      object_.x = offset(rng_);
      break;
    }
  }

  const auto contact = sim::compute_contact(chain_, object_, sim.finger_joint_indices);
  reading_ = sensor::read_sensors(contact.f_contact, config_.sensor, rng_);
  step_ = 0;
  started_ = true;
  return observe();
}

StepResult TactileEnv::step(std::span<const double> action) {
  if (!started_) throw std::logic_error("step() called before reset()");
  if (done()) throw std::logic_error("step() called on a finished episode; call reset()");
  if (action.size() != action_dim()) {
    throw std::invalid_argument("action has " + std::to_string(action.size()) +
                                " entries, expected " + std::to_string(action_dim()));
  }

  auto next = sim::sim_step(chain_, object_, action, config_.sim);
  chain_ = std::move(next.chain);
  object_ = next.object;
  reading_ = sensor::read_sensors(next.contact.f_contact, config_.sensor, rng_);
  ++step_;

  StepResult result;
  PerFinger<double> f = sensed(reading_);
  if (config_.noise_free_reward) {
    for (std::size_t i = 0; i < 2; ++i) {
      const double clean = reading_.f_contact[i] * config_.sensor.scale;
      f[i] = config_.force_mode == ForceMode::Raw
                 ? clean
                 : (clean > config_.sensor.f_thresh[i] ? 1.0 : 0.0);
    }
  }
  result.reward = reward(f[sim::kRight], f[sim::kLeft], config_.f_goal);
  result.obs = observe();
  result.done = done();
  result.info.f_contact = reading_.f_contact;
  result.info.f_raw = reading_.f_raw;
  result.info.f_binary = reading_.f_binary;
  result.info.object_x = object_.x;
  result.info.step = step_;
  return result;
}

std::size_t TactileEnv::obs_dim() const {
  return 2 * action_dim() + (has_tactile(config_.kind) ? 2 : 0);
}

std::vector<double> TactileEnv::action_high() const {
  std::vector<double> high;
  high.reserve(action_dim());
  for (const auto& spec : config_.sim.joint_specs) high.push_back(spec.v_max);
  return high;
}

PerFinger<double> TactileEnv::sensed(const sensor::ForceReading& reading) const {
  if (config_.force_mode == ForceMode::Raw) return reading.f_raw;
  return {static_cast<double>(reading.f_binary[0]), static_cast<double>(reading.f_binary[1])};
}

Observation TactileEnv::observe() const {
  Observation obs;
  obs.reserve(obs_dim());
  obs.insert(obs.end(), chain_.q.begin(), chain_.q.end());
  obs.insert(obs.end(), chain_.qdot.begin(), chain_.qdot.end());
  if (has_tactile(config_.kind)) {
    const auto f = sensed(reading_);
    obs.push_back(f[sim::kRight] - config_.f_goal);
    obs.push_back(f[sim::kLeft] - config_.f_goal);
  }
  return obs;
}

double episode_return(TactileEnv& env, const Policy& policy, std::optional<std::uint64_t> seed) {
  Observation obs = seed ? env.reset(*seed) : env.reset();
  double total = 0.0;
  while (!env.done()) {
    const Action action = policy(obs);
    auto result = env.step(action);
    total += result.reward;
    obs = std::move(result.obs);
  }
  return total;
}

}  // namespace tactile_rl::envs
