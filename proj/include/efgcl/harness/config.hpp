#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "efgcl/curriculum/assist.hpp"
#include "efgcl/env/planar_env.hpp"
#include "efgcl/execution.hpp"
#include "efgcl/rl/ppo.hpp"
#include "efgcl/task.hpp"

namespace efgcl::harness {

/// Where the assist acts. Jump: f_jump(command) at the centre of mass.
/// Flip: one upward push of `magnitude` at body-frame `offset`.
struct AssistSettings {
  double magnitude = 410.0;                      // N, flip only
  Eigen::Vector2d offset{0.25, 0.0};             // m, body frame, flip only
  curriculum::TimeWindow window{1.0, 1.1};       // s
};

struct CurriculumSettings {
  double epsilon = 0.01;
  double zeta = 0.6;
  bool stop_on_completion = false;
  int confirm_iterations = 10;  // iterations kept after completion before stopping
};

struct NetworkSettings {
  std::vector<int> hidden{32, 32};
  double initial_log_std = -0.5;
};

struct DistillSettings {
  int transitions = 200000;
  int epochs = 30;
  int minibatch_size = 256;
  double learning_rate = 1e-3;
  double reconstruction_weight = 0.5;
  std::vector<int> hidden{64, 64};
  double holdout_fraction = 0.1;
  int eval_episodes = 100;
};

struct ExperimentConfig {
  Task task = Task::kJump;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int iterations = 300;
  int envs = 64;  // episodes per batch, one full episode per environment
  bool efgcl = true;
  std::string out_dir = "runs";
  Execution execution = Execution::kParallel;
  bool record_wall_time = true;  // off writes wall_ms = 0 for byte-comparable metrics
  double reward_scale = 0.1;     // rewards are multiplied by this before GAE

  rl::PpoConfig ppo;
  NetworkSettings network;
  CurriculumSettings curriculum;
  AssistSettings assist;
  env::EnvConfig env = env::jumper_config();
  DistillSettings distill;

  void validate() const;
};

/// Task-appropriate defaults (environment geometry, budget).
ExperimentConfig default_config(Task task);

/// Flat key = value text, one key per line, '#' comments, optional [section]
/// headers. A key may also be written fully qualified ("curriculum.epsilon")
/// anywhere; keys before the first header belong to [experiment]. `task` is
/// applied first so the remaining keys override that task's defaults.
/// Throws ParseError naming the key and line for unknown keys, malformed
/// values and range violations.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical listing of every key and its current value.
std::string dump_config(const ExperimentConfig& config);

}  // namespace efgcl::harness
