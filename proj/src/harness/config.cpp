#include "efgcl/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "efgcl/errors.hpp"

namespace efgcl::harness {

namespace {

// Thrown by value parsers and range checks; turned into a ParseError that
// carries the key and line.
struct BadValue {
  std::string what;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end || v.empty()) throw BadValue{"expected a number, got '" + v + "'"};
  return x;
}

long long to_int(const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end || v.empty()) throw BadValue{"expected an integer, got '" + v + "'"};
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw BadValue{"expected on/off, got '" + v + "'"};
}

std::vector<int> to_int_list(const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split_list(v)) {
    const long long x = to_int(item);
    if (x <= 0 || x > 4096) throw BadValue{"layer sizes must lie in [1, 4096]"};
    out.push_back(static_cast<int>(x));
  }
  return out;
}

Eigen::Vector2d to_vector2(const std::string& v) {
  const auto items = split_list(v);
  if (items.size() != 2) throw BadValue{"expected two comma-separated numbers"};
  return {to_double(items[0]), to_double(items[1])};
}

double finite(double x) {
  if (!std::isfinite(x)) throw BadValue{"must be finite"};
  return x;
}
double positive(double x) {
  if (!(x > 0.0)) throw BadValue{"must be > 0"};
  return x;
}
double non_negative(double x) {
  if (!(x >= 0.0)) throw BadValue{"must be >= 0"};
  return x;
}
double unit_interval(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw BadValue{"must lie in [0, 1]"};
  return x;
}
double open_unit_interval(double x) {
  if (!(x > 0.0 && x < 1.0)) throw BadValue{"must lie in (0, 1)"};
  return x;
}
int positive_int(long long x) {
  if (x <= 0 || x > 100000000) throw BadValue{"must be a positive integer"};
  return static_cast<int>(x);
}
int non_negative_int(long long x) {
  if (x < 0 || x > 100000000) throw BadValue{"must be a non-negative integer"};
  return static_cast<int>(x);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}
std::string fmt_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s;
}

struct Key {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define EFGCL_DOUBLE(name, field, check)                                                       \
  {name, {[](ExperimentConfig& c, const std::string& v) { c.field = check(to_double(v)); }, \
          [](const ExperimentConfig& c) { return fmt(c.field); }}}
#define EFGCL_INT(name, field, check)                                                        \
  {name, {[](ExperimentConfig& c, const std::string& v) { c.field = check(to_int(v)); }, \
          [](const ExperimentConfig& c) { return std::to_string(c.field); }}}
#define EFGCL_BOOL(name, field)                                                           \
  {name, {[](ExperimentConfig& c, const std::string& v) { c.field = to_bool(v); },       \
          [](const ExperimentConfig& c) { return std::string(c.field ? "on" : "off"); }}}

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> table = {
      {"experiment.task",
       {[](ExperimentConfig&, const std::string& v) {
          if (v != "jump" && v != "flip") throw BadValue{"expected jump or flip"};
        },
        [](const ExperimentConfig& c) { return std::string(task_name(c.task)); }}},
      {"experiment.seeds",
       {[](ExperimentConfig& c, const std::string& v) {
          c.seeds.clear();
          for (const auto& item : split_list(v)) {
            const long long s = to_int(item);
            if (s < 0) throw BadValue{"seeds must be non-negative"};
            c.seeds.push_back(static_cast<std::uint64_t>(s));
          }
          if (c.seeds.empty()) throw BadValue{"seed list is empty"};
        },
        [](const ExperimentConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.seeds.size(); ++i) s += (i ? ", " : "") + std::to_string(c.seeds[i]);
          return s;
        }}},
      EFGCL_INT("experiment.iterations", iterations, non_negative_int),
      EFGCL_INT("experiment.envs", envs, positive_int),
      EFGCL_BOOL("experiment.efgcl", efgcl),
      {"experiment.out",
       {[](ExperimentConfig& c, const std::string& v) {
          if (v.empty()) throw BadValue{"output directory is empty"};
          c.out_dir = v;
        },
        [](const ExperimentConfig& c) { return c.out_dir; }}},
      {"experiment.execution",
       {[](ExperimentConfig& c, const std::string& v) {
          if (v == "serial") c.execution = Execution::kSerial;
          else if (v == "parallel") c.execution = Execution::kParallel;
          else throw BadValue{"expected serial or parallel"};
        },
        [](const ExperimentConfig& c) {
          return std::string(c.execution == Execution::kSerial ? "serial" : "parallel");
        }}},
      EFGCL_BOOL("experiment.wall_time", record_wall_time),
      EFGCL_DOUBLE("experiment.reward_scale", reward_scale, positive),

      EFGCL_DOUBLE("ppo.learning_rate", ppo.learning_rate, positive),
      EFGCL_DOUBLE("ppo.clip_eps", ppo.clip_eps, positive),
      EFGCL_INT("ppo.epochs", ppo.epochs, positive_int),
      EFGCL_INT("ppo.minibatch_size", ppo.minibatch_size, positive_int),
      EFGCL_DOUBLE("ppo.value_coef", ppo.value_coef, non_negative),
      EFGCL_DOUBLE("ppo.entropy_coef", ppo.entropy_coef, non_negative),
      EFGCL_DOUBLE("ppo.max_grad_norm", ppo.max_grad_norm, non_negative),
      EFGCL_DOUBLE("ppo.gamma", ppo.gamma, unit_interval),
      EFGCL_DOUBLE("ppo.gae_lambda", ppo.gae_lambda, unit_interval),
      EFGCL_INT("ppo.gradient_chunks", ppo.gradient_chunks, positive_int),

      {"network.hidden",
       {[](ExperimentConfig& c, const std::string& v) { c.network.hidden = to_int_list(v); },
        [](const ExperimentConfig& c) { return fmt_list(c.network.hidden); }}},
      EFGCL_DOUBLE("network.initial_log_std", network.initial_log_std, finite),

      EFGCL_DOUBLE("curriculum.epsilon", curriculum.epsilon, positive),
      EFGCL_DOUBLE("curriculum.zeta", curriculum.zeta, open_unit_interval),
      EFGCL_BOOL("curriculum.stop_on_completion", curriculum.stop_on_completion),
      EFGCL_INT("curriculum.confirm_iterations", curriculum.confirm_iterations, non_negative_int),

      EFGCL_DOUBLE("assist.magnitude", assist.magnitude, non_negative),
      {"assist.offset",
       {[](ExperimentConfig& c, const std::string& v) { c.assist.offset = to_vector2(v); },
        [](const ExperimentConfig& c) {
          return fmt(c.assist.offset.x()) + ", " + fmt(c.assist.offset.y());
        }}},
      EFGCL_DOUBLE("assist.window_start", assist.window.start, non_negative),
      EFGCL_DOUBLE("assist.window_end", assist.window.end, positive),

      EFGCL_DOUBLE("env.mass", env.mass, positive),
      EFGCL_DOUBLE("env.torque_limit", env.torque_limit, positive),
      EFGCL_DOUBLE("env.kp", env.kp, non_negative),
      EFGCL_DOUBLE("env.kd", env.kd, non_negative),
      EFGCL_DOUBLE("env.action_scale", env.action_scale, positive),
      EFGCL_DOUBLE("env.q_min", env.q_min, finite),
      EFGCL_DOUBLE("env.q_max", env.q_max, finite),
      EFGCL_DOUBLE("env.reset_noise", env.reset_noise, non_negative),
      EFGCL_DOUBLE("env.episode_length", env.episode_length, positive),
      EFGCL_DOUBLE("env.friction", env.friction, non_negative),
      EFGCL_DOUBLE("env.command_min", env.command_min, non_negative),
      EFGCL_DOUBLE("env.command_max", env.command_max, non_negative),
      {"env.actuation",
       {[](ExperimentConfig& c, const std::string& v) {
          if (v == "pd") c.env.actuation = env::Actuation::kPositionPd;
          else if (v == "torque") c.env.actuation = env::Actuation::kTorque;
          else throw BadValue{"expected pd or torque"};
        },
        [](const ExperimentConfig& c) {
          return std::string(c.env.actuation == env::Actuation::kTorque ? "torque" : "pd");
        }}},

      EFGCL_INT("distill.transitions", distill.transitions, positive_int),
      EFGCL_INT("distill.epochs", distill.epochs, positive_int),
      EFGCL_INT("distill.minibatch_size", distill.minibatch_size, positive_int),
      EFGCL_DOUBLE("distill.learning_rate", distill.learning_rate, positive),
      EFGCL_DOUBLE("distill.reconstruction_weight", distill.reconstruction_weight, non_negative),
      {"distill.hidden",
       {[](ExperimentConfig& c, const std::string& v) { c.distill.hidden = to_int_list(v); },
        [](const ExperimentConfig& c) { return fmt_list(c.distill.hidden); }}},
      EFGCL_DOUBLE("distill.holdout_fraction", distill.holdout_fraction, open_unit_interval),
      EFGCL_INT("distill.eval_episodes", distill.eval_episodes, positive_int),
  };
  return table;
}

#undef EFGCL_DOUBLE
#undef EFGCL_INT
#undef EFGCL_BOOL

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

}  // namespace

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
  };
  if (seeds.empty()) fail("experiment.seeds", "seed list is empty");
  if (envs <= 0) fail("experiment.envs", "must be positive");
  if (iterations < 0) fail("experiment.iterations", "must be non-negative");
  if (!(assist.window.start < assist.window.end)) fail("assist.window_end", "must exceed window_start");
  if (!(env.command_min <= env.command_max)) fail("env.command_max", "must be >= command_min");
  if (network.hidden.empty()) fail("network.hidden", "needs at least one layer");
  if (!(curriculum.epsilon > 0.0)) fail("curriculum.epsilon", "must be > 0");
  if (!(curriculum.zeta > 0.0 && curriculum.zeta < 1.0)) fail("curriculum.zeta", "must lie in (0, 1)");
  try {
    env.validate();
  } catch (const ConfigError& e) {
    fail("env", e.what());
  }
}

ExperimentConfig default_config(Task task) {
  ExperimentConfig c;
  c.task = task;
  c.ppo.learning_rate = 1e-3;
  c.ppo.epochs = 10;
  if (task == Task::kJump) {
    c.env = env::jumper_config();
    c.iterations = 300;
  } else {
    c.env = env::flipper_config();
    c.iterations = 400;
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string raw;
  std::string section = "experiment";
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line, line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::vector<std::string> sections = {"experiment", "ppo", "network", "curriculum",
                                                        "assist", "env", "distill"};
      if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
        throw ParseError(section, line_no, "unknown section");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line, line_no, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(key, line_no, "missing key");
    if (key.find('.') == std::string::npos) key = section + "." + key;
    if (keys().find(key) == keys().end()) throw ParseError(key, line_no, "unknown key");
    for (const auto& e : entries) {
      if (e.key == key) {
        throw ParseError(key, line_no, "duplicate key (first set on line " + std::to_string(e.line) + ")");
      }
    }
    entries.push_back({key, value, line_no});
  }

  Task task = Task::kJump;
  for (const auto& e : entries) {
    if (e.key != "experiment.task") continue;
    if (e.value == "flip") task = Task::kFlip;
    else if (e.value != "jump") throw ParseError(e.key, e.line, "expected jump or flip");
  }
  ExperimentConfig config = default_config(task);
  for (const auto& e : entries) {
    try {
      keys().at(e.key).set(config, e.value);
    } catch (const BadValue& bad) {
      throw ParseError(e.key, e.line, bad.what);
    }
  }
  try {
    config.validate();
  } catch (const ConfigError& err) {
    const std::string msg = err.what();
    const std::string key = msg.substr(0, msg.find(':'));
    int line = 0;
    for (const auto& e : entries) {
      if (e.key == key || (key == "env" && e.key.rfind("env.", 0) == 0)) line = e.line;
    }
    throw ParseError(key, line, msg.substr(msg.find(':') + 2));
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const auto& [key, entry] : keys()) {
    const std::string s = key.substr(0, key.find('.'));
    if (s != section) {
      out += (section.empty() ? "" : "\n") + std::string("[") + s + "]\n";
      section = s;
    }
    out += key.substr(key.find('.') + 1) + " = " + entry.get(config) + "\n";
  }
  return out;
}

}  // namespace efgcl::harness
