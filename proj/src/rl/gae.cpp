#include <cmath>
#include <string>

#include "efgcl/errors.hpp"
#include "efgcl/rl/rollout_batch.hpp"

namespace efgcl::rl {

RolloutBatch::RolloutBatch(int obs_dim, int act_dim, double gamma, double gae_lambda)
    : obs_dim_(obs_dim), act_dim_(act_dim), gamma_(gamma), gae_lambda_(gae_lambda) {
  if (obs_dim <= 0 || act_dim <= 0) throw ConfigError("rollout dimensions must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw DomainError("gae lambda must lie in [0, 1]");
  }
}

void RolloutBatch::push(const Transition& t) {
  if (t.observation.size() != obs_dim_ || t.action.size() != act_dim_) {
    throw ConfigError("transition dimensions do not match the batch");
  }
  if (!std::isfinite(t.log_prob)) throw DomainError("transition log-probability is not finite");
  if (!open_) {
    sequences_.push_back({size(), 0});
    open_ = true;
  }
  obs_.insert(obs_.end(), t.observation.data(), t.observation.data() + obs_dim_);
  act_.insert(act_.end(), t.action.data(), t.action.data() + act_dim_);
  log_probs_.push_back(t.log_prob);
  rewards_.push_back(t.reward);
  values_.push_back(t.value);
  dones_.push_back(t.done ? 1 : 0);
  assist_.push_back(t.assist_force);
  ++sequences_.back().length;
  if (t.done) open_ = false;
}

void RolloutBatch::end_sequence() { open_ = false; }

void RolloutBatch::append(const RolloutBatch& other) {
  if (other.obs_dim_ != obs_dim_ || other.act_dim_ != act_dim_) {
    throw ConfigError("cannot append batches of different shapes");
  }
  const int offset = size();
  obs_.insert(obs_.end(), other.obs_.begin(), other.obs_.end());
  act_.insert(act_.end(), other.act_.begin(), other.act_.end());
  log_probs_.insert(log_probs_.end(), other.log_probs_.begin(), other.log_probs_.end());
  rewards_.insert(rewards_.end(), other.rewards_.begin(), other.rewards_.end());
  values_.insert(values_.end(), other.values_.begin(), other.values_.end());
  dones_.insert(dones_.end(), other.dones_.begin(), other.dones_.end());
  assist_.insert(assist_.end(), other.assist_.begin(), other.assist_.end());
  for (const auto& s : other.sequences_) sequences_.push_back({s.begin + offset, s.length});
  open_ = false;
}

int RolloutBatch::unterminated_count() const {
  int n = 0;
  for (const auto& s : sequences_) {
    if (s.length > 0 && !dones_[s.begin + s.length - 1]) ++n;
  }
  return n;
}

Transition RolloutBatch::transition(int i) const {
  Transition t;
  t.observation = Eigen::Map<const Eigen::VectorXd>(obs_.data() + static_cast<std::size_t>(i) * obs_dim_, obs_dim_);
  t.action = Eigen::Map<const Eigen::VectorXd>(act_.data() + static_cast<std::size_t>(i) * act_dim_, act_dim_);
  t.log_prob = log_probs_[i];
  t.reward = rewards_[i];
  t.value = values_[i];
  t.done = dones_[i] != 0;
  t.assist_force = assist_[i];
  return t;
}

Eigen::MatrixXd RolloutBatch::observations() const {
  return Eigen::Map<const Eigen::MatrixXd>(obs_.data(), obs_dim_, size());
}

Eigen::MatrixXd RolloutBatch::actions() const {
  return Eigen::Map<const Eigen::MatrixXd>(act_.data(), act_dim_, size());
}

GaeResult compute_gae(const RolloutBatch& batch, const std::vector<double>& bootstrap_values) {
  if (batch.empty()) throw DomainError("compute_gae: empty batch");
  const int needed = batch.unterminated_count();
  if (static_cast<int>(bootstrap_values.size()) != needed) {
    throw ConfigError("compute_gae: expected " + std::to_string(needed) +
                      " bootstrap values, got " + std::to_string(bootstrap_values.size()));
  }
  const double gamma = batch.gamma();
  const double decay = gamma * batch.gae_lambda();
  const auto& r = batch.rewards();
  const auto& v = batch.values();
  const auto& done = batch.dones();

  GaeResult out;
  out.advantages.resize(batch.size());
  out.returns.resize(batch.size());
  std::size_t next_bootstrap = 0;
  for (const auto& seq : batch.sequences()) {
    if (seq.length == 0) continue;
    const int last = seq.begin + seq.length - 1;
    double next_value = done[last] ? 0.0 : bootstrap_values[next_bootstrap++];
    double running = 0.0;
    for (int t = last; t >= seq.begin; --t) {
      if (done[t]) {
        next_value = 0.0;
        running = 0.0;
      }
      const double delta = r[t] + gamma * next_value - v[t];
      running = delta + decay * running;
      out.advantages[t] = running;
      out.returns[t] = running + v[t];
      next_value = v[t];
    }
  }
  return out;
}

Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& advantages) {
  if (advantages.size() == 0) return advantages;
  const double mean = advantages.mean();
  const Eigen::ArrayXd centered = advantages.array() - mean;
  const double std = std::sqrt(centered.square().mean());
  if (!(std > 1e-12)) return Eigen::VectorXd::Zero(advantages.size());
  return centered.matrix() / std;
}

}  // namespace efgcl::rl
