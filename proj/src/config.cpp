#include "tactile_rl/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace tactile_rl::config {

namespace {

struct Value {
  enum class Type { Number, Bool, String, Array } type = Type::Number;
  std::string token;                // number text
  bool boolean = false;
  std::string str;
  std::vector<std::string> items;   // number texts
  int line = 0;
};

using Section = std::map<std::string, Value>;
using Document = std::map<std::string, Section>;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool is_bare_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

bool looks_numeric(const std::string& s) {
  double d = 0.0;
  const auto* end = s.data() + s.size();
  const char* begin = s.data();
  if (!s.empty() && s[0] == '+') ++begin;
  auto [p, ec] = std::from_chars(begin, end, d);
  return ec == std::errc() && p == end;
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

Document parse_document(const std::string& text, const std::string& source) {
  Document doc;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  const auto fail = [&](const std::string& what) {
    throw ConfigError(source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!is_bare_key(section)) fail("malformed section name '" + section + "'");
      if (doc.count(section)) fail("duplicate section [" + section + "]");
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string rhs = trim(std::string_view(line).substr(eq + 1));
    if (!is_bare_key(key)) fail("malformed key '" + key + "'");
    if (section.empty()) fail("key '" + key + "' appears before any [section]");
    if (rhs.empty()) fail("missing value for '" + key + "'");

    Value v;
    v.line = line_no;
    if (rhs.front() == '"') {
      if (rhs.size() < 2 || rhs.back() != '"') fail("unterminated string for '" + key + "'");
      v.type = Value::Type::String;
      v.str = rhs.substr(1, rhs.size() - 2);
      if (v.str.find('"') != std::string::npos) fail("embedded quotes are not supported");
    } else if (rhs == "true" || rhs == "false") {
      v.type = Value::Type::Bool;
      v.boolean = rhs == "true";
    } else if (rhs.front() == '[') {
      if (rhs.back() != ']') fail("unterminated array for '" + key + "'");
      v.type = Value::Type::Array;
      const std::string body = trim(std::string_view(rhs).substr(1, rhs.size() - 2));
      if (!body.empty()) {
        std::istringstream items(body);
        std::string item;
        while (std::getline(items, item, ',')) {
          item = trim(item);
          if (item.empty()) continue;  // tolerates a trailing comma
          if (!looks_numeric(item)) fail("array '" + key + "' holds non-numeric item '" + item + "'");
          v.items.push_back(item);
        }
      }
    } else {
      if (!looks_numeric(rhs)) fail("cannot parse value '" + rhs + "' for '" + key + "'");
      v.type = Value::Type::Number;
      v.token = rhs;
    }
    auto& sec = doc[section];
    if (sec.count(key)) fail("duplicate key '" + key + "' in [" + section + "]");
    sec.emplace(key, std::move(v));
  }
  return doc;
}

// Reads typed values out of a Document, tracking which keys were consumed.
class Reader {
 public:
  Reader(Document doc, std::string source) : doc_(std::move(doc)), source_(std::move(source)) {}

  void number(const std::string& sec, const std::string& key, double& out) {
    if (const Value* v = take(sec, key)) out = to_double(*v, v->token, sec, key);
  }

  template <typename Int>
  void integer(const std::string& sec, const std::string& key, Int& out) {
    if (const Value* v = take(sec, key)) out = to_int<Int>(*v, v->token, sec, key);
  }

  void boolean(const std::string& sec, const std::string& key, bool& out) {
    if (const Value* v = take(sec, key)) {
      if (v->type != Value::Type::Bool) fail(*v, sec, key, "expected true or false");
      out = v->boolean;
    }
  }

  void string(const std::string& sec, const std::string& key, std::string& out) {
    if (const Value* v = take(sec, key)) {
      if (v->type != Value::Type::String) fail(*v, sec, key, "expected a quoted string");
      out = v->str;
    }
  }

  // Returns true when the key was present.
  bool numbers(const std::string& sec, const std::string& key, std::vector<double>& out) {
    const Value* v = take(sec, key);
    if (!v) return false;
    if (v->type != Value::Type::Array) fail(*v, sec, key, "expected an array of numbers");
    out.clear();
    for (const auto& item : v->items) out.push_back(to_double(*v, item, sec, key));
    return true;
  }

  template <typename Int>
  bool integers(const std::string& sec, const std::string& key, std::vector<Int>& out) {
    const Value* v = take(sec, key);
    if (!v) return false;
    if (v->type != Value::Type::Array) fail(*v, sec, key, "expected an array of integers");
    out.clear();
    for (const auto& item : v->items) out.push_back(to_int<Int>(*v, item, sec, key));
    return true;
  }

  int line_of(const std::string& sec, const std::string& key) const {
    auto s = doc_.find(sec);
    if (s == doc_.end()) return 0;
    auto k = s->second.find(key);
    return k == s->second.end() ? 0 : k->second.line;
  }

  [[noreturn]] void fail_at(int line, const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + what);
  }

  void reject_unknown(const std::set<std::string>& sections) const {
    for (const auto& [sec, keys] : doc_) {
      if (!sections.count(sec)) {
        int line = keys.empty() ? 0 : keys.begin()->second.line;
        throw ConfigError(source_ + ":" + std::to_string(line) + ": unknown section [" + sec + "]");
      }
      for (const auto& [key, v] : keys) {
        if (!used_.count(sec + "." + key)) {
          fail_at(v.line, "unknown key '" + key + "' in [" + sec + "]");
        }
      }
    }
  }

 private:
  const Value* take(const std::string& sec, const std::string& key) {
    auto s = doc_.find(sec);
    if (s == doc_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    used_.insert(sec + "." + key);
    return &k->second;
  }

  [[noreturn]] void fail(const Value& v, const std::string& sec, const std::string& key,
                         const std::string& what) const {
    fail_at(v.line, "[" + sec + "] " + key + ": " + what);
  }

  double to_double(const Value& v, const std::string& token, const std::string& sec,
                   const std::string& key) const {
    if (v.type != Value::Type::Number && v.type != Value::Type::Array) {
      fail(v, sec, key, "expected a number");
    }
    double d = 0.0;
    const char* begin = token.data() + (token[0] == '+' ? 1 : 0);
    auto [p, ec] = std::from_chars(begin, token.data() + token.size(), d);
    if (ec != std::errc() || p != token.data() + token.size()) fail(v, sec, key, "bad number");
    return d;
  }

  template <typename Int>
  Int to_int(const Value& v, const std::string& token, const std::string& sec,
             const std::string& key) const {
    if (v.type != Value::Type::Number && v.type != Value::Type::Array) {
      fail(v, sec, key, "expected an integer");
    }
    Int i{};
    const char* begin = token.data() + (token[0] == '+' ? 1 : 0);
    auto [p, ec] = std::from_chars(begin, token.data() + token.size(), i);
    if (ec != std::errc() || p != token.data() + token.size()) {
      fail(v, sec, key, "expected an integer, got '" + token + "'");
    }
    return i;
  }

  Document doc_;
  std::string source_;
  std::set<std::string> used_;
};

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out + "]";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  // Keep floats recognisable as floats.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void validate(const RunConfig& config) {
  envs::validate(config.env);
  pi::validate(config.pi);
  td3::validate(config.td3);
  if (config.seeds.empty()) throw std::invalid_argument("seed list must not be empty");
  if (config.n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");
}

void apply_overrides(RunConfig& config, const Overrides& overrides) {
  if (overrides.seed) {
    config.seeds = {*overrides.seed};
    config.env.seed = *overrides.seed;
  }
  if (overrides.total_timesteps) config.td3.total_timesteps = *overrides.total_timesteps;
  if (overrides.noise_enabled) config.env.sensor.noise_enabled = *overrides.noise_enabled;
  if (overrides.force_mode) config.env.force_mode = *overrides.force_mode;
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
}

RunConfig parse_run_config(const std::string& text, const std::string& source_name,
                           const Overrides& overrides) {
  Reader r(parse_document(text, source_name), source_name);

  std::string kind_name;
  r.string("env", "kind", kind_name);
  envs::EnvKind kind = envs::EnvKind::GripperTactile;
  try {
    if (!kind_name.empty()) kind = envs::parse_env_kind(kind_name);
  } catch (const std::invalid_argument& e) {
    r.fail_at(r.line_of("env", "kind"), e.what());
  }
  if (overrides.env_kind) kind = *overrides.env_kind;

  RunConfig cfg;
  cfg.env = envs::make_env_config(kind);
  auto& env = cfg.env;

  r.number("env", "f_goal", env.f_goal);
  r.integer("env", "episode_length", env.episode_length);
  std::string mode;
  r.string("env", "force_mode", mode);
  std::string placement;
  r.string("env", "placement", placement);
  try {
    if (!mode.empty()) env.force_mode = envs::parse_force_mode(mode);
    if (!placement.empty()) env.placement = envs::parse_placement(placement);
  } catch (const std::invalid_argument& e) {
    r.fail_at(r.line_of("env", mode.empty() ? "placement" : "force_mode"), e.what());
  }
  r.boolean("env", "noise_free_reward", env.noise_free_reward);
  r.number("env", "object_offset", env.object_offset);
  r.numbers("env", "initial_q", env.initial_q);
  r.integer("env", "seed", env.seed);

  auto& sim = env.sim;
  r.number("sim", "dt_control", sim.dt_control);
  r.integer("sim", "n_substeps", sim.n_substeps);
  r.number("sim", "object_offset_range", sim.object_offset_range);
  r.number("sim", "ambient_damping", sim.ambient_damping);
  std::vector<std::size_t> fingers;
  if (r.integers("sim", "finger_joint_indices", fingers)) {
    if (fingers.size() != 2) {
      r.fail_at(r.line_of("sim", "finger_joint_indices"), "finger_joint_indices needs 2 entries");
    }
    sim.finger_joint_indices = {fingers[0], fingers[1]};
  }
  const auto per_joint = [&](const char* key, double sim::JointSpec::*field) {
    std::vector<double> values;
    if (!r.numbers("sim", key, values)) return;
    if (values.size() != sim.joint_specs.size()) {
      r.fail_at(r.line_of("sim", key), std::string(key) + " needs " +
                                           std::to_string(sim.joint_specs.size()) + " entries");
    }
    for (std::size_t j = 0; j < values.size(); ++j) sim.joint_specs[j].*field = values[j];
  };
  per_joint("q_min", &sim::JointSpec::q_min);
  per_joint("q_max", &sim::JointSpec::q_max);
  per_joint("v_max", &sim::JointSpec::v_max);

  auto& obj = sim.object_init;
  r.number("object", "half_width", obj.half_width);
  r.number("object", "mass", obj.mass);
  r.number("object", "stiffness", obj.stiffness);
  r.number("object", "damping", obj.damping);

  auto& sensor = env.sensor;
  r.number("sensor", "scale", sensor.scale);
  r.number("sensor", "sigma", sensor.sigma);
  r.boolean("sensor", "noise", sensor.noise_enabled);
  std::vector<double> thresh;
  if (r.numbers("sensor", "f_thresh", thresh)) {
    if (thresh.size() != 2) r.fail_at(r.line_of("sensor", "f_thresh"), "f_thresh needs 2 entries");
    sensor.f_thresh = {thresh[0], thresh[1]};
  }

  r.number("pi", "kp", cfg.pi.kp);
  r.number("pi", "ki", cfg.pi.ki);
  r.number("pi", "integral_limit", cfg.pi.integral_limit);
  r.number("pi", "v_close", cfg.pi.v_close);

  auto& t = cfg.td3;
  r.number("td3", "gamma", t.gamma);
  r.number("td3", "tau", t.tau);
  r.integer("td3", "policy_delay", t.policy_delay);
  r.number("td3", "target_noise_std", t.target_noise_std);
  r.number("td3", "target_noise_clip", t.target_noise_clip);
  r.number("td3", "exploration_noise_std", t.exploration_noise_std);
  r.integer("td3", "batch_size", t.batch_size);
  r.integer("td3", "buffer_capacity", t.buffer_capacity);
  r.number("td3", "learning_rate", t.learning_rate);
  r.integer("td3", "start_steps", t.start_steps);
  r.integer("td3", "total_timesteps", t.total_timesteps);
  r.integer("td3", "eval_window", t.eval_window);
  r.integers("td3", "hidden", t.hidden);
  r.boolean("td3", "normalize_observations", t.normalize_observations);

  r.string("run", "out", cfg.out_dir);
  r.integers("run", "seeds", cfg.seeds);
  r.integer("run", "n_trials", cfg.n_trials);
  r.boolean("run", "eval_random_offset", cfg.eval_random_offset);

  r.reject_unknown({"env", "sim", "object", "sensor", "pi", "td3", "run"});
  apply_overrides(cfg, overrides);
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path.string(), overrides);
}

std::string to_toml(const RunConfig& cfg) {
  const auto& env = cfg.env;
  const auto& sim = env.sim;
  std::vector<double> q_min, q_max, v_max;
  for (const auto& s : sim.joint_specs) {
    q_min.push_back(s.q_min);
    q_max.push_back(s.q_max);
    v_max.push_back(s.v_max);
  }
  const auto d = format_double;
  const auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  std::ostringstream o;
  o << "[env]\n"
    << "kind = \"" << envs::to_string(env.kind) << "\"\n"
    << "f_goal = " << d(env.f_goal) << "\n"
    << "episode_length = " << env.episode_length << "\n"
    << "force_mode = \"" << envs::to_string(env.force_mode) << "\"\n"
    << "noise_free_reward = " << b(env.noise_free_reward) << "\n"
    << "placement = \"" << envs::to_string(env.placement) << "\"\n"
    << "object_offset = " << d(env.object_offset) << "\n"
    << "initial_q = " << join(env.initial_q) << "\n"
    << "seed = " << env.seed << "\n\n";
  o << "[sim]\n"
    << "dt_control = " << d(sim.dt_control) << "\n"
    << "n_substeps = " << sim.n_substeps << "\n"
    << "object_offset_range = " << d(sim.object_offset_range) << "\n"
    << "ambient_damping = " << d(sim.ambient_damping) << "\n"
    << "finger_joint_indices = [" << sim.finger_joint_indices[0] << ", "
    << sim.finger_joint_indices[1] << "]\n"
    << "q_min = " << join(q_min) << "\n"
    << "q_max = " << join(q_max) << "\n"
    << "v_max = " << join(v_max) << "\n\n";
  o << "[object]\n"
    << "half_width = " << d(sim.object_init.half_width) << "\n"
    << "mass = " << d(sim.object_init.mass) << "\n"
    << "stiffness = " << d(sim.object_init.stiffness) << "\n"
    << "damping = " << d(sim.object_init.damping) << "\n\n";
  o << "[sensor]\n"
    << "scale = " << d(env.sensor.scale) << "\n"
    << "sigma = " << d(env.sensor.sigma) << "\n"
    << "f_thresh = [" << d(env.sensor.f_thresh[0]) << ", " << d(env.sensor.f_thresh[1]) << "]\n"
    << "noise = " << b(env.sensor.noise_enabled) << "\n\n";
  o << "[pi]\n"
    << "kp = " << d(cfg.pi.kp) << "\n"
    << "ki = " << d(cfg.pi.ki) << "\n"
    << "integral_limit = " << d(cfg.pi.integral_limit) << "\n"
    << "v_close = " << d(cfg.pi.v_close) << "\n\n";
  const auto& t = cfg.td3;
  o << "[td3]\n"
    << "gamma = " << d(t.gamma) << "\n"
    << "tau = " << d(t.tau) << "\n"
    << "policy_delay = " << t.policy_delay << "\n"
    << "target_noise_std = " << d(t.target_noise_std) << "\n"
    << "target_noise_clip = " << d(t.target_noise_clip) << "\n"
    << "exploration_noise_std = " << d(t.exploration_noise_std) << "\n"
    << "batch_size = " << t.batch_size << "\n"
    << "buffer_capacity = " << t.buffer_capacity << "\n"
    << "learning_rate = " << d(t.learning_rate) << "\n"
    << "start_steps = " << t.start_steps << "\n"
    << "total_timesteps = " << t.total_timesteps << "\n"
    << "eval_window = " << t.eval_window << "\n"
    << "hidden = " << join(t.hidden) << "\n"
    << "normalize_observations = " << b(t.normalize_observations) << "\n\n";
  o << "[run]\n"
    << "out = \"" << cfg.out_dir << "\"\n"
    << "seeds = " << join(cfg.seeds) << "\n"
    << "n_trials = " << cfg.n_trials << "\n"
    << "eval_random_offset = " << b(cfg.eval_random_offset) << "\n";
  return o.str();
}

}  // namespace tactile_rl::config
