#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tactile_rl::sim {

// Finger slots. Every per-finger pair in the toolkit is ordered (right, left).
inline constexpr std::size_t kRight = 0;
inline constexpr std::size_t kLeft = 1;

template <typename T>
using PerFinger = std::array<T, 2>;

struct JointSpec {
  std::string name;
  double q_min = 0.0;
  double q_max = 0.0;
  double v_max = 0.0;
};

struct ChainState {
  std::vector<double> q;
  std::vector<double> qdot;
  double t = 0.0;

  std::size_t size() const { return q.size(); }
};

// Lateral state of the grasped object. Positions are measured along the
// closing axis with the gripper centre at 0 and the right finger on the
// positive side.
struct ObjectState {
  double x = 0.0;
  double v = 0.0;
  double half_width = 0.025;
  double mass = 0.1;
  double stiffness = 10.0;
  double damping = 0.1;
};

struct ContactResult {
  PerFinger<double> penetration{0.0, 0.0};
  PerFinger<double> f_contact{0.0, 0.0};
};

struct SimConfig {
  double dt_control = 0.02;
  int n_substeps = 5;
  std::vector<JointSpec> joint_specs;
  std::array<std::size_t, 2> finger_joint_indices{0, 1};
  ObjectState object_init;
  double object_offset_range = 0.005;
  // Linear drag on the free object (N*s/m), standing in for table support.
  double ambient_damping = 1.0;

  double inner_dt() const { return dt_control / n_substeps; }
};

// Joint tables. The gripper chain is (right finger, left finger); the full
// chain is torso lift, seven arm joints, then both fingers.
std::vector<JointSpec> gripper_joint_specs();
std::vector<JointSpec> tiago_joint_specs();

SimConfig gripper_sim_config();
SimConfig tiago_sim_config();

// Throws std::invalid_argument when a structural invariant does not hold.
void validate(const JointSpec& spec);
void validate(const ObjectState& obj);
void validate(const SimConfig& config);

ChainState integrate_joints(const ChainState& state, std::span<const double> v_des, double dt,
                            std::span<const JointSpec> specs);

ContactResult compute_contact(const ChainState& chain, const ObjectState& obj,
                              const std::array<std::size_t, 2>& finger_joint_indices);

ObjectState step_object(const ObjectState& obj, const ContactResult& contact, double dt,
                        double ambient_damping);

struct SimStepResult {
  ChainState chain;
  ObjectState object;
  ContactResult contact;  // from the last substep
};

SimStepResult sim_step(const ChainState& chain, const ObjectState& obj,
                       std::span<const double> v_des, const SimConfig& config);

}  // namespace tactile_rl::sim
