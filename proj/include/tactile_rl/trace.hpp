#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tactile_rl/envs.hpp"

namespace tactile_rl::envs {

// One line of a rollout trace.
struct TraceRecord {
  int step = 0;
  double t = 0.0;
  std::vector<double> q;
  std::vector<double> qdot;
  PerFinger<double> f_contact{0.0, 0.0};
  PerFinger<double> f_raw{0.0, 0.0};
  std::vector<double> action;
  double reward = 0.0;
  double object_x = 0.0;
};

TraceRecord make_record(const TactileEnv& env, std::span<const double> action,
                        const StepResult& result);

std::string to_json_line(const TraceRecord& record);
void write_jsonl(std::ostream& out, std::span<const TraceRecord> trace);

}  // namespace tactile_rl::envs
