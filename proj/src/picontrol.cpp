#include "tactile_rl/picontrol.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tactile_rl::pi {

namespace {

// Finger joints measure opening, so closing is the negative direction.
constexpr double kClosing = -1.0;

}  // namespace

void validate(const PIGains& gains) {
  if (!(gains.kp >= 0.0) || !(gains.ki >= 0.0)) {
    throw std::invalid_argument("PI gains must be non-negative");
  }
  if (!(gains.integral_limit > 0.0)) throw std::invalid_argument("integral_limit must be positive");
  if (!(gains.v_close > 0.0)) throw std::invalid_argument("v_close must be positive");
}

ControllerOutput controller_step(const ControllerState& state, const PerFinger<double>& f_raw,
                                 const PerFinger<double>& f_thresh, const PIGains& gains,
                                 double f_goal, double dt) {
  ControllerOutput out{{0.0, 0.0}, state};
  ControllerState& next = out.state;

  if (next.phase == Phase::Closing) {
    for (std::size_t i = 0; i < 2; ++i) {
      if (f_raw[i] > f_thresh[i]) next.finger_contact[i] = true;
    }
    if (next.finger_contact[0] && next.finger_contact[1]) {
      next.phase = Phase::ForceControl;
      next.integral = {0.0, 0.0};
    } else {
      for (std::size_t i = 0; i < 2; ++i) {
        out.action[i] = next.finger_contact[i] ? 0.0 : kClosing * gains.v_close;
      }
      return out;
    }
  }

  for (std::size_t i = 0; i < 2; ++i) {
    const double error = f_goal - f_raw[i];
    next.integral[i] =
        std::clamp(next.integral[i] + error * dt, -gains.integral_limit, gains.integral_limit);
    out.action[i] = kClosing * (gains.kp * error + gains.ki * next.integral[i]);
  }
  return out;
}

BaselineRun run_baseline(envs::TactileEnv& env, const PIGains& gains,
                         std::optional<std::uint64_t> seed) {
  validate(gains);
  if (env.action_dim() != 2) {
    throw std::invalid_argument("PI baseline needs a two-finger environment, got " +
                                std::to_string(env.action_dim()) + " joints");
  }
  const auto& config = env.config();
  const auto [ir, il] = config.sim.finger_joint_indices;

  BaselineRun run;
  if (seed) {
    env.reset(*seed);
  } else {
    env.reset();
  }
  run.object_x_initial = env.object().x;

  ControllerState state;
  std::vector<double> action(2, 0.0);
  while (!env.done()) {
    const auto out = controller_step(state, env.last_reading().f_raw, config.sensor.f_thresh, gains,
                                     config.f_goal, config.sim.dt_control);
    if (state.phase == Phase::Closing && out.state.phase == Phase::ForceControl) {
      run.switch_step = env.step_index();
      run.object_x_at_switch = env.object().x;
    }
    state = out.state;
    action[ir] = out.action[sim::kRight];
    action[il] = out.action[sim::kLeft];
    const auto result = env.step(action);
    run.episode_return += result.reward;
    run.trace.push_back(envs::make_record(env, action, result));
    run.states.push_back(state);
  }
  return run;
}

}  // namespace tactile_rl::pi
