#include "efgcl/rl/gaussian_policy.hpp"

#include <cmath>

#include "efgcl/errors.hpp"

namespace efgcl::rl {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)
}

ActionSample sample_action(const GaussianPolicyOut& out, const Eigen::VectorXd& noise) {
  if (noise.size() != out.mean.size() || out.log_std.size() != out.mean.size()) {
    throw ConfigError("sample_action: noise, mean and log_std lengths differ");
  }
  ActionSample s;
  s.action = out.mean.array() + out.log_std.array().exp() * noise.array();
  // (a - mean) / std is exactly the noise, so the quadratic term needs no division.
  s.log_prob = -0.5 * noise.squaredNorm() - out.log_std.sum() -
               0.5 * static_cast<double>(noise.size()) * kLog2Pi;
  return s;
}

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& action) {
  if (mean.size() != log_std.size() || mean.size() != action.size()) {
    throw ConfigError("gaussian_log_prob: length mismatch");
  }
  const Eigen::ArrayXd z = (action - mean).array() * (-log_std.array()).exp();
  return -0.5 * z.square().sum() - log_std.sum() -
         0.5 * static_cast<double>(mean.size()) * kLog2Pi;
}

double gaussian_entropy(const Eigen::VectorXd& log_std) {
  return log_std.sum() + 0.5 * static_cast<double>(log_std.size()) * (1.0 + kLog2Pi);
}

GaussianPolicy::GaussianPolicy(Mlp mean_net, Eigen::VectorXd log_std, LogStdBounds bounds)
    : mean_net_(std::move(mean_net)), bounds_(bounds) {
  if (log_std.size() != mean_net_.output_size()) {
    throw ConfigError("policy log_std length must equal the action dimension");
  }
  if (!(bounds_.min < bounds_.max)) throw ConfigError("log_std bounds are empty");
  set_log_std(log_std);
}

GaussianPolicy GaussianPolicy::random(int obs_dim, int act_dim, const std::vector<int>& hidden,
                                      Rng& rng, double initial_log_std, LogStdBounds bounds) {
  std::vector<int> sizes;
  sizes.push_back(obs_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(act_dim);
  return GaussianPolicy(Mlp::random(sizes, rng, 0.01),
                        Eigen::VectorXd::Constant(act_dim, initial_log_std), bounds);
}

GaussianPolicyOut GaussianPolicy::evaluate(const Eigen::VectorXd& observation) const {
  return {mean_net_.forward(observation), log_std_};
}

void GaussianPolicy::set_log_std(const Eigen::VectorXd& log_std) {
  log_std_ = log_std.cwiseMax(bounds_.min).cwiseMin(bounds_.max);
}

Eigen::VectorXd GaussianPolicy::flatten() const {
  Eigen::VectorXd flat(parameter_count());
  const int n = mean_net_.parameter_count();
  flat.head(n) = mean_net_.flatten();
  flat.tail(log_std_.size()) = log_std_;
  return flat;
}

void GaussianPolicy::assign(const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count()) throw ConfigError("policy parameter length mismatch");
  const int n = mean_net_.parameter_count();
  mean_net_.assign(flat.head(n));
  set_log_std(flat.tail(log_std_.size()));
}

}  // namespace efgcl::rl
