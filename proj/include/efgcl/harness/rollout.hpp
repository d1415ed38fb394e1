#pragma once

#include <functional>
#include <vector>

#include "efgcl/curriculum/assist.hpp"
#include "efgcl/curriculum/success.hpp"
#include "efgcl/env/planar_env.hpp"
#include "efgcl/env/trace.hpp"
#include "efgcl/execution.hpp"
#include "efgcl/harness/config.hpp"
#include "efgcl/reward/reward.hpp"
#include "efgcl/rl/gaussian_policy.hpp"
#include "efgcl/rl/rollout_batch.hpp"

namespace efgcl::harness {

/// Everything needed to run episodes of one task.
struct TaskSetup {
  Task task = Task::kJump;
  env::EnvConfig env;
  reward::RewardConfig reward;  // x_target is replaced by the command for jumps
  curriculum::SuccessSpec success;
  AssistSettings assist;
  Eigen::VectorXd obs_scale;

  static TaskSetup from_config(const ExperimentConfig& config);
  reward::RewardConfig reward_for(double command) const;
  curriculum::AssistPattern assist_for(double command) const;
  double sample_command(env::Rng& rng) const;
  int obs_dim() const { return env::observation_size(env); }
  int act_dim() const { return env.num_joints(); }
};

/// Reward inputs for the step that produced `state`.
reward::RewardInputs reward_inputs(const TaskSetup& setup, const env::EnvState& state);

struct EpisodeRecord {
  double command = 0.0;
  double episode_return = 0.0;  // unscaled
  int length = 0;
  bool success = false;
  bool faulted = false;
  curriculum::EpisodeSummary summary;
  double peak_assist = 0.0;  // N
};

struct CollectResult {
  rl::RolloutBatch batch;
  std::vector<double> bootstrap_values;  // one per time-limited episode, in order
  std::vector<EpisodeRecord> episodes;   // one per environment
  double success_rate() const;
  double mean_return() const;
};

/// Runs one full episode in each environment (env_rngs.size() of them) with
/// actions sampled from `policy`, under `alpha` times the assist. Network
/// passes are batched across environments; environment steps run serially or
/// with OpenMP. Each environment draws only from its own generator, so the
/// result does not depend on the execution mode. Rewards stored in the batch
/// are multiplied by `reward_scale`.
CollectResult collect_rollouts(const TaskSetup& setup, const rl::GaussianPolicy& policy,
                               const rl::Mlp& value, double alpha, std::vector<env::Rng>& env_rngs,
                               double reward_scale, double gamma, double gae_lambda,
                               Execution exec = Execution::kSerial);

/// Maps a raw observation to an action.
using Controller = std::function<Eigen::VectorXd(const env::Observation&)>;

/// Deterministic controller: the policy mean on the scaled full observation.
Controller mean_controller(const rl::GaussianPolicy& policy, const Eigen::VectorXd& obs_scale);

/// Trace recorder with the per-term reward columns run_episode fills in.
env::TraceRecorder episode_trace_recorder(const TaskSetup& setup);

/// One episode driven by `controller`. Optionally records a state trace
/// (made by episode_trace_recorder) and the observation sequence.
EpisodeRecord run_episode(const TaskSetup& setup, const Controller& controller, double command,
                          env::Rng& rng, double alpha = 0.0, env::TraceRecorder* trace = nullptr,
                          std::vector<env::Observation>* observations = nullptr);

/// Success fraction over `episodes` episodes with commands drawn from `rng`.
double evaluate_success(const TaskSetup& setup, const Controller& controller, int episodes,
                        env::Rng& rng);

}  // namespace efgcl::harness
