#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace efgcl::rl {

/// One environment step as seen by the learner.
struct Transition {
  Eigen::VectorXd observation;
  Eigen::VectorXd action;
  double log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;          // terminal: no bootstrap across this step
  double assist_force = 0.0;  // N, magnitude actually applied during the step
};

/// A contiguous run of transitions from one environment instance. A sequence
/// whose last transition is not `done` was cut (time limit or batch end) and
/// needs a bootstrap value.
struct SequenceSpan {
  int begin = 0;
  int length = 0;
};

/// Transitions stored column-wise so the learner can feed them straight to
/// batched network passes.
class RolloutBatch {
 public:
  RolloutBatch() = default;
  RolloutBatch(int obs_dim, int act_dim, double gamma, double gae_lambda);

  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }
  double gamma() const { return gamma_; }
  double gae_lambda() const { return gae_lambda_; }
  int size() const { return static_cast<int>(rewards_.size()); }
  bool empty() const { return rewards_.empty(); }

  /// Appends to the currently open sequence (opening one if none is open).
  void push(const Transition& t);
  /// Closes the current sequence; the next push starts a new one.
  void end_sequence();
  /// Moves another batch's sequences onto the end of this one.
  void append(const RolloutBatch& other);

  const std::vector<SequenceSpan>& sequences() const { return sequences_; }
  /// Number of sequences whose last step is not terminal.
  int unterminated_count() const;

  Transition transition(int i) const;
  Eigen::MatrixXd observations() const;  // obs_dim x size
  Eigen::MatrixXd actions() const;       // act_dim x size
  const std::vector<double>& log_probs() const { return log_probs_; }
  const std::vector<double>& rewards() const { return rewards_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::uint8_t>& dones() const { return dones_; }
  const std::vector<double>& assist() const { return assist_; }

 private:
  int obs_dim_ = 0;
  int act_dim_ = 0;
  double gamma_ = 0.99;
  double gae_lambda_ = 0.95;
  bool open_ = false;
  std::vector<double> obs_;  // column-major obs_dim x size
  std::vector<double> act_;
  std::vector<double> log_probs_;
  std::vector<double> rewards_;
  std::vector<double> values_;
  std::vector<std::uint8_t> dones_;
  std::vector<double> assist_;
  std::vector<SequenceSpan> sequences_;
};

struct GaeResult {
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
};

/// Generalized advantage estimation over every sequence of the batch.
///
/// A_t = sum_k (gamma*lambda)^k delta_{t+k}, delta_t = r_t + gamma V(s_{t+1}) - V(s_t),
/// with V(s_{t+1}) = 0 after a done step and the next entry of
/// `bootstrap_values` after the last step of an unterminated sequence (one per
/// such sequence, in sequence order). Returns are advantages + values.
GaeResult compute_gae(const RolloutBatch& batch, const std::vector<double>& bootstrap_values);

/// Rescales to zero mean and unit standard deviation (population). A batch of
/// identical advantages maps to all zeros.
Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& advantages);

}  // namespace efgcl::rl
