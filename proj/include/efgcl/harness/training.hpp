#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "efgcl/curriculum/curriculum.hpp"
#include "efgcl/harness/checkpoint.hpp"
#include "efgcl/harness/config.hpp"
#include "efgcl/harness/metrics.hpp"
#include "efgcl/harness/rollout.hpp"
#include "efgcl/rl/gaussian_policy.hpp"
#include "efgcl/rl/mlp.hpp"

namespace efgcl::harness {

/// Value-network snapshot taken after `iteration` completed iterations.
struct ValueSnapshot {
  double fraction = 0.0;  // of the checkpoint budget
  int iteration = 0;
  rl::Mlp value;
};

struct RunOptions {
  /// Empty: nothing is written to disk.
  std::string out_dir;
  /// Fractions of `checkpoint_budget` (default: the iteration budget) after
  /// which the value net is snapshotted and, with an out_dir, a checkpoint written.
  std::vector<double> checkpoint_fractions{0.1, 0.2, 0.5, 1.0};
  int checkpoint_budget = 0;
  /// Write trace.csv for one deterministic episode of the final policy.
  bool write_trace = false;
  bool quiet = true;
  /// Called after every iteration with the batch that was just collected.
  std::function<void(int iteration, double alpha, const CollectResult& batch)> on_iteration;
};

struct RunResult {
  RunMetrics metrics;
  rl::GaussianPolicy policy;
  rl::Mlp value;
  curriculum::CurriculumState curriculum;
  std::vector<ValueSnapshot> snapshots;
  std::uint64_t seed = 0;
};

/// Stream seeds derived from the run seed: one for network initialisation,
/// one for minibatch shuffling and one per environment instance.
env::Rng derive_rng(std::uint64_t seed, std::uint64_t stream);

/// The training loop: collect one episode per environment under the current
/// assist level, estimate advantages, run a PPO update, measure the batch
/// success rate and fold it into the curriculum. The baseline (efgcl off)
/// runs with alpha fixed at 0. Stops at the iteration budget or, with
/// curriculum.stop_on_completion, confirm_iterations after completion.
/// Identical (config, seed) gives identical results for either execution mode.
RunResult run_training(const ExperimentConfig& config, std::uint64_t seed,
                       const RunOptions& options = {});

/// Teacher checkpoint: policy mean net, log_std, value net, observation scale
/// and curriculum metadata.
Checkpoint make_teacher_checkpoint(const ExperimentConfig& config, const RunResult& run, int iteration);

struct Teacher {
  rl::GaussianPolicy policy;
  rl::Mlp value;
  Eigen::VectorXd obs_scale;
  bool curriculum_complete = false;
  Task task = Task::kJump;
};
Teacher teacher_from_checkpoint(const Checkpoint& checkpoint);

}  // namespace efgcl::harness
