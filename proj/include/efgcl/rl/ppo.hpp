#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "efgcl/execution.hpp"
#include "efgcl/rl/adam.hpp"
#include "efgcl/rl/gaussian_policy.hpp"
#include "efgcl/rl/mlp.hpp"

namespace efgcl::rl {

// Defaults are this project's choices for the desk-scale tasks; they are not
// taken from any published PPO configuration.
struct PpoConfig {
  double learning_rate = 3e-4;
  double clip_eps = 0.2;
  int epochs = 5;
  int minibatch_size = 1024;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double max_grad_norm = 1.0;  // <= 0 disables global-norm clipping
  double gamma = 0.99;
  double gae_lambda = 0.95;
  int gradient_chunks = 8;  // fixed reduction granularity, independent of threads
};

/// min(r A, clip(r, 1 - eps, 1 + eps) A) with r = exp(log_prob_new - log_prob_old).
double ppo_clip_objective(double log_prob_new, double log_prob_old, double advantage,
                          double clip_eps);

/// Learner-side view of a rollout: one column per sample.
struct PpoSamples {
  Eigen::MatrixXd observations;  // obs_dim x n
  Eigen::MatrixXd actions;       // act_dim x n
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;

  int size() const { return static_cast<int>(old_log_probs.size()); }
};

/// Gradient of the PPO loss, shaped like the parameters it differentiates.
struct ActorCriticGradient {
  Mlp policy_mean;
  Eigen::VectorXd log_std;
  Mlp value;

  ActorCriticGradient() = default;
  ActorCriticGradient(const GaussianPolicy& policy, const Mlp& value_net);
  void set_zero();
  void add(const ActorCriticGradient& other);
  void scale(double s);
  /// [policy mean net | log_std | value net]
  Eigen::VectorXd flatten() const;
};

struct LossTerms {
  double loss = 0.0;              // minimized: -objective + c_v * value_mse - c_e * entropy
  double policy_objective = 0.0;  // mean clipped surrogate
  double value_loss = 0.0;        // mean squared error to the returns
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
};

/// PPO loss over the selected columns of `samples`, using the advantages as
/// stored (no normalization). When `grad` is non-null it receives dLoss/dparams.
/// Chunks are evaluated independently and summed in index order, serially or
/// with OpenMP.
LossTerms ppo_loss(const GaussianPolicy& policy, const Mlp& value, const PpoSamples& samples,
                   const std::vector<int>& indices, const PpoConfig& config,
                   ActorCriticGradient* grad, Execution exec = Execution::kSerial);

struct PpoStats {
  double mean_ratio = 1.0;
  double clip_fraction = 0.0;
  double value_loss = 0.0;
  double policy_objective = 0.0;
  double entropy = 0.0;
  int minibatch_steps = 0;
  bool aborted = false;
  std::string diagnostic;
};

/// Owns the optimizer state that persists across PPO updates.
class PpoLearner {
 public:
  PpoLearner() = default;
  PpoLearner(const GaussianPolicy& policy, const Mlp& value, PpoConfig config);

  /// Normalizes advantages, then runs `epochs` passes of shuffled minibatch
  /// Adam steps on policy and value together. On a non-finite loss or gradient
  /// both networks are restored to their state before the call and the stats
  /// carry a diagnostic.
  PpoStats update(GaussianPolicy& policy, Mlp& value, const PpoSamples& samples, Rng& rng,
                  Execution exec = Execution::kSerial);

  const PpoConfig& config() const { return config_; }
  PpoConfig& config() { return config_; }

 private:
  PpoConfig config_;
  Adam adam_;
};

}  // namespace efgcl::rl
