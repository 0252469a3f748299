#include "tactile_rl/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tactile_rl::sim {

namespace {

constexpr double kFingerOpen = 0.045;
constexpr double kFingerVMax = 0.05;

}  // namespace

std::vector<JointSpec> gripper_joint_specs() {
  return {
      {"gripper_right_finger_joint", 0.0, kFingerOpen, kFingerVMax},
      {"gripper_left_finger_joint", 0.0, kFingerOpen, kFingerVMax},
  };
}

std::vector<JointSpec> tiago_joint_specs() {
  return {
      {"torso_lift_joint", 0.0, 0.35, 0.07},
      {"arm_1_joint", 0.0, 2.748893, 1.95},
      {"arm_2_joint", -1.570796, 1.089233, 1.95},
      {"arm_3_joint", -3.534291, 1.570796, 2.35},
      {"arm_4_joint", -0.392699, 2.356194, 2.35},
      {"arm_5_joint", -2.094395, 2.094395, 1.95},
      {"arm_6_joint", -1.413717, 1.413717, 1.76},
      {"arm_7_joint", -2.094395, 2.094395, 1.76},
      {"gripper_right_finger_joint", 0.0, kFingerOpen, kFingerVMax},
      {"gripper_left_finger_joint", 0.0, kFingerOpen, kFingerVMax},
  };
}

SimConfig gripper_sim_config() {
  SimConfig config;
  config.joint_specs = gripper_joint_specs();
  config.finger_joint_indices = {0, 1};
  return config;
}

SimConfig tiago_sim_config() {
  SimConfig config;
  config.joint_specs = tiago_joint_specs();
  config.finger_joint_indices = {8, 9};
  return config;
}

void validate(const JointSpec& spec) {
  if (!(spec.q_min < spec.q_max)) {
    throw std::invalid_argument("joint '" + spec.name + "': q_min must be below q_max");
  }
  if (!(spec.v_max > 0.0)) {
    throw std::invalid_argument("joint '" + spec.name + "': v_max must be positive");
  }
}

void validate(const ObjectState& obj) {
  if (!(obj.half_width > 0.0)) throw std::invalid_argument("object half_width must be positive");
  if (!(obj.mass > 0.0)) throw std::invalid_argument("object mass must be positive");
  if (!(obj.stiffness > 0.0)) throw std::invalid_argument("object stiffness must be positive");
  if (!(obj.damping >= 0.0)) throw std::invalid_argument("object damping must be non-negative");
}

void validate(const SimConfig& config) {
  if (!(config.dt_control > 0.0)) throw std::invalid_argument("dt_control must be positive");
  if (config.n_substeps < 1) throw std::invalid_argument("n_substeps must be at least 1");
  if (config.joint_specs.empty()) throw std::invalid_argument("joint_specs must not be empty");
  for (const auto& spec : config.joint_specs) validate(spec);
  const auto [a, b] = config.finger_joint_indices;
  if (a == b || a >= config.joint_specs.size() || b >= config.joint_specs.size()) {
    throw std::invalid_argument("finger_joint_indices must be distinct valid joint indices");
  }
  validate(config.object_init);
  if (!(config.object_offset_range >= 0.0)) {
    throw std::invalid_argument("object_offset_range must be non-negative");
  }
  if (!(config.ambient_damping >= 0.0)) {
    throw std::invalid_argument("ambient_damping must be non-negative");
  }
}

ChainState integrate_joints(const ChainState& state, std::span<const double> v_des, double dt,
                            std::span<const JointSpec> specs) {
  const std::size_t n = state.q.size();
  if (v_des.size() != n || specs.size() != n || state.qdot.size() != n) {
    throw std::invalid_argument("integrate_joints: dimension mismatch (expected " +
                                std::to_string(n) + " joints, got " +
                                std::to_string(v_des.size()) + " velocities)");
  }
  ChainState next = state;
  for (std::size_t j = 0; j < n; ++j) {
    const JointSpec& spec = specs[j];
    const double qdot = std::clamp(v_des[j], -spec.v_max, spec.v_max);
    const double q = state.q[j] + qdot * dt;
    if (q < spec.q_min) {
      next.q[j] = spec.q_min;
      next.qdot[j] = 0.0;
    } else if (q > spec.q_max) {
      next.q[j] = spec.q_max;
      next.qdot[j] = 0.0;
    } else {
      next.q[j] = q;
      next.qdot[j] = qdot;
    }
  }
  next.t = state.t + dt;
  return next;
}

ContactResult compute_contact(const ChainState& chain, const ObjectState& obj,
                              const std::array<std::size_t, 2>& finger_joint_indices) {
  const auto [ir, il] = finger_joint_indices;
  // Right finger surface sits at +q_r, left at -q_l.
  const double overlap_r = (obj.x + obj.half_width) - chain.q[ir];
  const double overlap_l = (obj.half_width - obj.x) - chain.q[il];
  const double rate_r = obj.v - chain.qdot[ir];
  const double rate_l = -obj.v - chain.qdot[il];

  ContactResult result;
  const auto finger = [&](std::size_t i, double overlap, double rate) {
    if (overlap > 0.0) {
      result.penetration[i] = overlap;
      result.f_contact[i] = std::max(0.0, obj.stiffness * overlap + obj.damping * rate);
    }
  };
  finger(kRight, overlap_r, rate_r);
  finger(kLeft, overlap_l, rate_l);
  return result;
}

ObjectState step_object(const ObjectState& obj, const ContactResult& contact, double dt,
                        double ambient_damping) {
  // The right finger pushes towards -x, the left towards +x.
  const double force = contact.f_contact[kLeft] - contact.f_contact[kRight];
  ObjectState next = obj;
  // Semi-implicit Euler; the drag term is taken implicitly so it can only
  // shrink |v|.
  next.v = (obj.v + force / obj.mass * dt) / (1.0 + ambient_damping * dt / obj.mass);
  next.x = obj.x + next.v * dt;
  return next;
}

SimStepResult sim_step(const ChainState& chain, const ObjectState& obj,
                       std::span<const double> v_des, const SimConfig& config) {
  if (v_des.size() != chain.size()) {
    throw std::invalid_argument("sim_step: action has " + std::to_string(v_des.size()) +
                                " entries, chain has " + std::to_string(chain.size()));
  }
  const double dt = config.inner_dt();
  SimStepResult out{chain, obj, {}};
  for (int s = 0; s < config.n_substeps; ++s) {
    out.chain = integrate_joints(out.chain, v_des, dt, config.joint_specs);
    out.contact = compute_contact(out.chain, out.object, config.finger_joint_indices);
    out.object = step_object(out.object, out.contact, dt, config.ambient_damping);
  }
  return out;
}

}  // namespace tactile_rl::sim
