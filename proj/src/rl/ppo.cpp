#include "efgcl/rl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "efgcl/errors.hpp"
#include "efgcl/rl/rollout_batch.hpp"

namespace efgcl::rl {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

struct ChunkResult {
  ActorCriticGradient grad;
  double objective_sum = 0.0;
  double value_sq_sum = 0.0;
  double ratio_sum = 0.0;
  int clipped = 0;
};

void evaluate_chunk(const GaussianPolicy& policy, const Mlp& value, const PpoSamples& samples,
                    const int* idx, int count, double inv_total, const PpoConfig& config,
                    bool want_grad, ChunkResult& out) {
  if (count == 0) return;
  const std::vector<int> cols(idx, idx + count);
  const Eigen::MatrixXd obs = samples.observations(Eigen::all, cols);
  const Eigen::MatrixXd act = samples.actions(Eigen::all, cols);

  Mlp::Tape policy_tape;
  Mlp::Tape value_tape;
  const Eigen::MatrixXd mean = policy.mean_net().forward(obs, policy_tape);
  const Eigen::MatrixXd values = value.forward(obs, value_tape);

  const Eigen::ArrayXd log_std = policy.log_std().array();
  const Eigen::ArrayXd inv_std = (-log_std).exp();
  // z = (a - mean) / std, column per sample
  const Eigen::ArrayXXd z = (act - mean).array().colwise() * inv_std;
  const double log_norm = log_std.sum() + 0.5 * static_cast<double>(log_std.size()) * kLog2Pi;

  Eigen::MatrixXd grad_mean(mean.rows(), count);
  Eigen::ArrayXd grad_log_std = Eigen::ArrayXd::Zero(log_std.size());
  Eigen::MatrixXd grad_value(1, count);

  for (int j = 0; j < count; ++j) {
    const int i = idx[j];
    const double log_prob = -0.5 * z.col(j).square().sum() - log_norm;
    const double ratio = std::exp(log_prob - samples.old_log_probs[i]);
    const double adv = samples.advantages[i];
    const double clipped_ratio = std::clamp(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps);
    const double unclipped = ratio * adv;
    const double clipped = clipped_ratio * adv;
    out.objective_sum += std::min(unclipped, clipped);
    out.ratio_sum += ratio;
    if (std::abs(ratio - 1.0) > config.clip_eps) ++out.clipped;
    const double v_err = values(0, j) - samples.returns[i];
    out.value_sq_sum += v_err * v_err;
    if (!want_grad) continue;
    // d objective / d log_prob: the unclipped branch is active when it is the min.
    const double g = (unclipped <= clipped) ? unclipped : 0.0;
    grad_mean.col(j) = (-inv_total * g) * (z.col(j) * inv_std).matrix();
    grad_log_std += (-inv_total * g) * (z.col(j).square() - 1.0);
    grad_value(0, j) = 2.0 * config.value_coef * inv_total * v_err;
  }
  if (!want_grad) return;
  policy.mean_net().backward(policy_tape, grad_mean, out.grad.policy_mean);
  out.grad.log_std += grad_log_std.matrix();
  value.backward(value_tape, grad_value, out.grad.value);
}

}  // namespace

double ppo_clip_objective(double log_prob_new, double log_prob_old, double advantage,
                          double clip_eps) {
  const double ratio = std::exp(log_prob_new - log_prob_old);
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * advantage, clipped * advantage);
}

ActorCriticGradient::ActorCriticGradient(const GaussianPolicy& policy, const Mlp& value_net)
    : policy_mean(policy.mean_net().sizes()),
      log_std(Eigen::VectorXd::Zero(policy.act_dim())),
      value(value_net.sizes()) {}

void ActorCriticGradient::set_zero() {
  policy_mean.set_zero();
  log_std.setZero();
  value.set_zero();
}

void ActorCriticGradient::add(const ActorCriticGradient& other) {
  auto add_mlp = [](Mlp& a, const Mlp& b) {
    for (std::size_t l = 0; l < a.layers().size(); ++l) {
      a.layers()[l].weight += b.layers()[l].weight;
      a.layers()[l].bias += b.layers()[l].bias;
    }
  };
  add_mlp(policy_mean, other.policy_mean);
  log_std += other.log_std;
  add_mlp(value, other.value);
}

void ActorCriticGradient::scale(double s) {
  auto scale_mlp = [s](Mlp& a) {
    for (auto& layer : a.layers()) {
      layer.weight *= s;
      layer.bias *= s;
    }
  };
  scale_mlp(policy_mean);
  log_std *= s;
  scale_mlp(value);
}

Eigen::VectorXd ActorCriticGradient::flatten() const {
  const int np = policy_mean.parameter_count();
  const int ns = static_cast<int>(log_std.size());
  const int nv = value.parameter_count();
  Eigen::VectorXd flat(np + ns + nv);
  flat.head(np) = policy_mean.flatten();
  flat.segment(np, ns) = log_std;
  flat.tail(nv) = value.flatten();
  return flat;
}

LossTerms ppo_loss(const GaussianPolicy& policy, const Mlp& value, const PpoSamples& samples,
                   const std::vector<int>& indices, const PpoConfig& config,
                   ActorCriticGradient* grad, Execution exec) {
  if (indices.empty()) throw DomainError("ppo_loss: no samples selected");
  if (samples.observations.rows() != policy.obs_dim() ||
      samples.observations.rows() != value.input_size() ||
      samples.actions.rows() != policy.act_dim()) {
    throw ConfigError("ppo_loss: sample dimensions do not match the networks");
  }
  if (!(config.clip_eps > 0.0)) throw DomainError("clip_eps must be positive");

  const int n = static_cast<int>(indices.size());
  const int chunks = std::clamp(config.gradient_chunks, 1, n);
  const double inv_total = 1.0 / static_cast<double>(n);
  const bool want_grad = grad != nullptr;

  std::vector<ChunkResult> results(chunks);
  if (want_grad) {
    for (auto& r : results) r.grad = ActorCriticGradient(policy, value);
  }
  auto run_chunk = [&](int c) {
    const int begin = static_cast<int>(static_cast<long>(c) * n / chunks);
    const int end = static_cast<int>(static_cast<long>(c + 1) * n / chunks);
    evaluate_chunk(policy, value, samples, indices.data() + begin, end - begin, inv_total,
                   config, want_grad, results[c]);
  };
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    for (int c = 0; c < chunks; ++c) run_chunk(c);
  }

  LossTerms terms;
  double objective = 0.0;
  double value_sq = 0.0;
  double ratio = 0.0;
  int clipped = 0;
  if (want_grad) {
    *grad = ActorCriticGradient(policy, value);
  }
  for (const auto& r : results) {
    objective += r.objective_sum;
    value_sq += r.value_sq_sum;
    ratio += r.ratio_sum;
    clipped += r.clipped;
    if (want_grad) grad->add(r.grad);
  }
  terms.policy_objective = objective * inv_total;
  terms.value_loss = value_sq * inv_total;
  terms.mean_ratio = ratio * inv_total;
  terms.clip_fraction = static_cast<double>(clipped) * inv_total;
  terms.entropy = gaussian_entropy(policy.log_std());
  terms.loss = -terms.policy_objective + config.value_coef * terms.value_loss -
               config.entropy_coef * terms.entropy;
  if (want_grad) grad->log_std.array() -= config.entropy_coef;
  return terms;
}

PpoLearner::PpoLearner(const GaussianPolicy& policy, const Mlp& value, PpoConfig config)
    : config_(config),
      adam_(policy.parameter_count() + value.parameter_count(),
            Adam::Options{config.learning_rate, 0.9, 0.999, 1e-8}) {
  if (config.epochs <= 0 || config.minibatch_size <= 0) {
    throw ConfigError("ppo epochs and minibatch size must be positive");
  }
}

PpoStats PpoLearner::update(GaussianPolicy& policy, Mlp& value, const PpoSamples& samples,
                            Rng& rng, Execution exec) {
  PpoStats stats;
  const int n = samples.size();
  if (n == 0) return stats;
  if (samples.advantages.size() != n || samples.returns.size() != n ||
      samples.observations.cols() != n || samples.actions.cols() != n) {
    throw ConfigError("ppo update: sample arrays have inconsistent lengths");
  }
  adam_.options().learning_rate = config_.learning_rate;

  PpoSamples normalized = samples;
  normalized.advantages = normalize_advantages(samples.advantages);

  const Eigen::VectorXd policy_before = policy.flatten();
  const Eigen::VectorXd value_before = value.flatten();
  const int np = static_cast<int>(policy_before.size());
  const int nv = static_cast<int>(value_before.size());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const int mb = std::min(config_.minibatch_size, n);
  ActorCriticGradient grad;
  double ratio_sum = 0.0, clip_sum = 0.0, vloss_sum = 0.0, obj_sum = 0.0;

  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    // Fisher-Yates with our own engine: std::shuffle's draw pattern is
    // implementation-defined.
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }
    for (int start = 0; start + mb <= n; start += mb) {
      const std::vector<int> idx(order.begin() + start, order.begin() + start + mb);
      const LossTerms terms = ppo_loss(policy, value, normalized, idx, config_, &grad, exec);
      Eigen::VectorXd flat = grad.flatten();
      if (!std::isfinite(terms.loss) || !flat.allFinite()) {
        policy.assign(policy_before);
        value.assign(value_before);
        std::ostringstream msg;
        msg << "non-finite " << (std::isfinite(terms.loss) ? "gradient" : "loss")
            << " at epoch " << epoch << ", minibatch offset " << start
            << " (value loss " << terms.value_loss << ", mean ratio " << terms.mean_ratio
            << "); update aborted, parameters restored";
        stats.aborted = true;
        stats.diagnostic = msg.str();
        return stats;
      }
      if (config_.max_grad_norm > 0.0) {
        const double norm = flat.norm();
        if (norm > config_.max_grad_norm) flat *= config_.max_grad_norm / norm;
      }
      Eigen::VectorXd params(np + nv);
      params.head(np) = policy.flatten();
      params.tail(nv) = value.flatten();
      adam_.step(params, flat);
      policy.assign(params.head(np));
      value.assign(params.tail(nv));

      ratio_sum += terms.mean_ratio;
      clip_sum += terms.clip_fraction;
      vloss_sum += terms.value_loss;
      obj_sum += terms.policy_objective;
      ++stats.minibatch_steps;
    }
  }
  if (stats.minibatch_steps > 0) {
    const double k = 1.0 / stats.minibatch_steps;
    stats.mean_ratio = ratio_sum * k;
    stats.clip_fraction = clip_sum * k;
    stats.value_loss = vloss_sum * k;
    stats.policy_objective = obj_sum * k;
  }
  stats.entropy = gaussian_entropy(policy.log_std());
  return stats;
}

}  // namespace efgcl::rl
