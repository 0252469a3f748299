#pragma once

#include <vector>

#include "tactile_rl/envs.hpp"
#include "tactile_rl/trace.hpp"

namespace tactile_rl::pi {

using sim::PerFinger;

struct PIGains {
  double kp = 8e-3;            // m/s per sensor unit of force error
  double ki = 0.3;             // m/s per sensor unit * s
  double integral_limit = 0.1;  // sensor unit * s
  double v_close = 0.05;       // m/s
};

void validate(const PIGains& gains);

enum class Phase { Closing, ForceControl };

struct ControllerState {
  Phase phase = Phase::Closing;
  PerFinger<bool> finger_contact{false, false};
  PerFinger<double> integral{0.0, 0.0};
};

struct ControllerOutput {
  PerFinger<double> action{0.0, 0.0};  // finger joint velocities, (right, left)
  ControllerState state;
};

// Closing: each finger closes at v_close until its raw force exceeds the
// threshold, then holds still until the other finger has contact too.
// ForceControl: independent PI loops per finger on f_goal - f_raw.
ControllerOutput controller_step(const ControllerState& state, const PerFinger<double>& f_raw,
                                 const PerFinger<double>& f_thresh, const PIGains& gains,
                                 double f_goal, double dt);

struct BaselineRun {
  std::vector<envs::TraceRecord> trace;
  std::vector<ControllerState> states;  // controller state after each decision
  double episode_return = 0.0;
  int switch_step = -1;                 // step at which force control began
  double object_x_initial = 0.0;
  double object_x_at_switch = 0.0;
};

// Runs one full episode of the baseline. The environment must expose exactly
// the two finger joints.
BaselineRun run_baseline(envs::TactileEnv& env, const PIGains& gains,
                         std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace tactile_rl::pi
