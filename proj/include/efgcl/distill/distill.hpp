#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "efgcl/execution.hpp"
#include "efgcl/harness/checkpoint.hpp"
#include "efgcl/harness/config.hpp"
#include "efgcl/harness/rollout.hpp"
#include "efgcl/harness/training.hpp"
#include "efgcl/rl/mlp.hpp"

namespace efgcl::distill {

/// Sensor-only policy. One tanh trunk, output rows split into the action mean
/// (first act_dim) and the reconstructed privileged observation (last priv_dim).
/// Its interface only accepts proprioceptive vectors.
class StudentNet {
 public:
  struct Output {
    Eigen::MatrixXd action;  // act_dim x batch
    Eigen::MatrixXd priv;    // priv_dim x batch (scaled units)
  };

  StudentNet() = default;
  StudentNet(rl::Mlp net, int act_dim, Eigen::VectorXd prop_scale, Eigen::VectorXd priv_scale);
  static StudentNet random(int act_dim, const Eigen::VectorXd& prop_scale, const Eigen::VectorXd& priv_scale,
                           const std::vector<int>& hidden, rl::Rng& rng);

  int prop_dim() const { return net_.input_size(); }
  int act_dim() const { return act_dim_; }
  int priv_dim() const { return net_.output_size() - act_dim_; }

  /// Inputs are already scaled proprioceptive columns.
  Output forward_scaled(const Eigen::MatrixXd& prop_scaled) const;
  /// Raw o_prop in, action mean out.
  Eigen::VectorXd act(const Eigen::VectorXd& prop) const;
  /// Raw o_prop in, privileged estimate out (unscaled units).
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& prop) const;

  rl::Mlp& net() { return net_; }
  const rl::Mlp& net() const { return net_; }
  const Eigen::VectorXd& prop_scale() const { return prop_scale_; }
  const Eigen::VectorXd& priv_scale() const { return priv_scale_; }

 private:
  rl::Mlp net_;
  int act_dim_ = 0;
  Eigen::VectorXd prop_scale_;
  Eigen::VectorXd priv_scale_;
};

/// Controller over full observations that forwards only o.prop to the student.
harness::Controller student_controller(const StudentNet& student);

/// mean((a_s - a_t)^2) + weight * mean((r - p)^2). Throws ConfigError on
/// mismatched sizes or a negative weight.
double distill_loss(const Eigen::VectorXd& student_action, const Eigen::VectorXd& teacher_action,
                    const Eigen::VectorXd& reconstructed_priv, const Eigen::VectorXd& true_priv,
                    double weight);

/// Teacher-labelled samples, one column each, all in scaled units.
struct Dataset {
  Eigen::MatrixXd prop;
  Eigen::MatrixXd priv;
  Eigen::MatrixXd teacher_action;
  int size() const { return static_cast<int>(prop.cols()); }
};

/// The teacher drives the environment with its mean action and no assist
/// until `transitions` samples are recorded. Episodes run in parallel with
/// their own RNG streams, so the result does not depend on thread count.
Dataset collect_teacher_data(const harness::TaskSetup& setup, const harness::Teacher& teacher, int transitions,
                             std::uint64_t seed, Execution exec = Execution::kParallel);

struct DistillReport {
  int train_samples = 0;
  int holdout_samples = 0;
  double train_action_mse = 0.0;    // after the last epoch
  double holdout_action_mse = 0.0;
  double holdout_recon_mse = 0.0;
  std::vector<double> epoch_loss;   // mean training loss per epoch
  double teacher_success = 0.0;     // evaluation episodes, same commands and resets
  double student_success = 0.0;
  int eval_episodes = 0;
  std::string describe() const;
};

struct DistillResult {
  StudentNet student;
  DistillReport report;
};

/// Supervised fit of a fresh student to `data` (held-out split taken from the
/// tail). No environment interaction.
DistillResult fit_student(const Dataset& data, const harness::TaskSetup& setup,
                          const harness::DistillSettings& settings, std::uint64_t seed);

/// Collects teacher data with the assist fully decayed, fits the student and
/// evaluates both policies. Refuses (ConfigError) a teacher whose curriculum
/// has not completed.
DistillResult train_student(const harness::Teacher& teacher, const harness::TaskSetup& setup,
                            const harness::DistillSettings& settings, std::uint64_t seed,
                            Execution exec = Execution::kParallel);

harness::Checkpoint make_student_checkpoint(const StudentNet& student, Task task, const DistillReport& report);
StudentNet student_from_checkpoint(const harness::Checkpoint& checkpoint);

}  // namespace efgcl::distill
