#include "tactile_rl/trace.hpp"

#include <nlohmann/json.hpp>
#include <ostream>

namespace tactile_rl::envs {

TraceRecord make_record(const TactileEnv& env, std::span<const double> action,
                        const StepResult& result) {
  TraceRecord record;
  record.step = result.info.step;
  record.t = env.chain().t;
  record.q = env.chain().q;
  record.qdot = env.chain().qdot;
  record.f_contact = result.info.f_contact;
  record.f_raw = result.info.f_raw;
  record.action.assign(action.begin(), action.end());
  record.reward = result.reward;
  record.object_x = result.info.object_x;
  return record;
}

std::string to_json_line(const TraceRecord& record) {
  nlohmann::ordered_json j;
  j["step"] = record.step;
  j["t"] = record.t;
  j["q"] = record.q;
  j["qdot"] = record.qdot;
  j["f_contact"] = record.f_contact;
  j["f_raw"] = record.f_raw;
  j["action"] = record.action;
  j["reward"] = record.reward;
  j["object_x"] = record.object_x;
  return j.dump();
}

void write_jsonl(std::ostream& out, std::span<const TraceRecord> trace) {
  for (const auto& record : trace) out << to_json_line(record) << '\n';
}

}  // namespace tactile_rl::envs
