#pragma once

#include <Eigen/Dense>

#include <vector>

#include "efgcl/rl/mlp.hpp"

namespace efgcl::rl {

struct GaussianPolicyOut {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_std;
};

struct ActionSample {
  Eigen::VectorXd action;
  double log_prob = 0.0;
};

struct LogStdBounds {
  double min = -4.0;
  double max = 1.0;
};

/// action = mean + exp(log_std) * noise, with the diagonal-Gaussian log-density
/// of the resulting action.
ActionSample sample_action(const GaussianPolicyOut& out, const Eigen::VectorXd& noise);

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& action);

/// Differential entropy of N(mean, diag(exp(2 log_std))), independent of mean.
double gaussian_entropy(const Eigen::VectorXd& log_std);

/// Mean from an MLP over the observation, state-independent learned log-std.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(Mlp mean_net, Eigen::VectorXd log_std, LogStdBounds bounds = {});

  static GaussianPolicy random(int obs_dim, int act_dim, const std::vector<int>& hidden,
                               Rng& rng, double initial_log_std,
                               LogStdBounds bounds = {});

  int obs_dim() const { return mean_net_.input_size(); }
  int act_dim() const { return mean_net_.output_size(); }

  GaussianPolicyOut evaluate(const Eigen::VectorXd& observation) const;
  Eigen::MatrixXd mean(const Eigen::MatrixXd& observations) const {
    return mean_net_.forward(observations);
  }

  Mlp& mean_net() { return mean_net_; }
  const Mlp& mean_net() const { return mean_net_; }
  const Eigen::VectorXd& log_std() const { return log_std_; }
  /// Stores log_std clamped into the configured bounds.
  void set_log_std(const Eigen::VectorXd& log_std);
  const LogStdBounds& bounds() const { return bounds_; }

  int parameter_count() const {
    return mean_net_.parameter_count() + static_cast<int>(log_std_.size());
  }
  /// [mean-net parameters | log_std]
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);

 private:
  Mlp mean_net_;
  Eigen::VectorXd log_std_;
  LogStdBounds bounds_;
};

}  // namespace efgcl::rl
