#pragma once

#include <Eigen/Dense>

namespace efgcl::rl {

/// Adam on a flat parameter vector (descent direction: params -= step).
class Adam {
 public:
  struct Options {
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  Adam() = default;
  Adam(Eigen::Index size, Options options);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  Options& options() { return options_; }
  long steps() const { return t_; }

 private:
  Options options_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long t_ = 0;
};

}  // namespace efgcl::rl
