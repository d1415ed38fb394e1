#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// They deliberately avoid the library code paths they check.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "efgcl/rl/gaussian_policy.hpp"
#include "efgcl/rl/mlp.hpp"
#include "efgcl/rl/ppo.hpp"
#include "efgcl/rl/rollout_batch.hpp"

namespace oracle {

/// Explicit loops, tanh hidden layers, linear output.
inline std::vector<double> mlp_forward(const efgcl::rl::Mlp& net, const Eigen::VectorXd& x) {
  std::vector<double> a(x.data(), x.data() + x.size());
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& W = layers[l].weight;
    std::vector<double> z(W.rows());
    for (int i = 0; i < W.rows(); ++i) {
      double s = layers[l].bias[i];
      for (int j = 0; j < W.cols(); ++j) s += W(i, j) * a[j];
      z[i] = l + 1 < layers.size() ? std::tanh(s) : s;
    }
    a = std::move(z);
  }
  return a;
}

inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& p, double h) {
  Eigen::VectorXd g(p.size());
  Eigen::VectorXd q = p;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    q[i] = p[i] + h;
    const double up = f(q);
    q[i] = p[i] - h;
    const double down = f(q);
    q[i] = p[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// |a - b| / max(|a|, |b|) in the 2-norm; 0 when both vanish.
inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

struct RandomSequences {
  efgcl::rl::RolloutBatch batch;
  std::vector<double> bootstrap;
};

/// Up to max_seqs sequences of length 1..max_len with random rewards, values,
/// termination and gamma, lambda in (0, 1].
inline RandomSequences random_sequences(std::mt19937_64& rng, int max_seqs, int max_len) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), unit(0.0, 1.0);
  std::uniform_int_distribution<int> ns(1, max_seqs), len(1, max_len);
  RandomSequences out;
  const double gamma = 0.5 + 0.5 * unit(rng), lambda = unit(rng);
  out.batch = efgcl::rl::RolloutBatch(1, 1, gamma, lambda);
  const int n = ns(rng);
  for (int s = 0; s < n; ++s) {
    const int L = len(rng);
    const bool terminal = unit(rng) < 0.5;
    for (int t = 0; t < L; ++t) {
      efgcl::rl::Transition tr;
      tr.observation = Eigen::VectorXd::Zero(1);
      tr.action = Eigen::VectorXd::Zero(1);
      tr.reward = u(rng);
      tr.value = u(rng);
      tr.done = terminal && t + 1 == L;
      out.batch.push(tr);
    }
    out.batch.end_sequence();
    if (!terminal) out.bootstrap.push_back(u(rng));
  }
  return out;
}

/// A_t = sum_k (gamma lambda)^k delta_{t+k}, summed term by term.
inline std::vector<double> gae_direct(const efgcl::rl::RolloutBatch& b, const std::vector<double>& bootstrap) {
  const double g = b.gamma(), l = b.gae_lambda();
  const auto& r = b.rewards();
  const auto& v = b.values();
  const auto& d = b.dones();
  std::vector<double> adv(r.size(), 0.0);
  std::size_t boot = 0;
  for (const auto& span : b.sequences()) {
    const int end = span.begin + span.length;
    const bool cut = !d[end - 1];
    const double tail = cut ? bootstrap[boot++] : 0.0;
    for (int t = span.begin; t < end; ++t) {
      double sum = 0.0, w = 1.0;
      for (int k = t; k < end; ++k) {
        const double next = k + 1 < end ? v[k + 1] : tail;
        sum += w * (r[k] + g * next - v[k]);
        w *= g * l;
      }
      adv[t] = sum;
    }
  }
  return adv;
}

struct PpoProblem {
  efgcl::rl::GaussianPolicy policy;
  efgcl::rl::Mlp value;
  efgcl::rl::PpoSamples samples;
};

/// Random nets and samples whose importance ratios stay well inside the clip range.
inline PpoProblem random_ppo_problem(std::mt19937_64& rng, int obs, int act, int n) {
  PpoProblem p;
  p.policy = efgcl::rl::GaussianPolicy::random(obs, act, {5, 4}, rng, -0.3);
  p.value = efgcl::rl::Mlp::random({obs, 5, 1}, rng);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> small(-0.05, 0.05);
  auto& s = p.samples;
  s.observations = Eigen::MatrixXd::Random(obs, n);
  s.actions.resize(act, n);
  s.old_log_probs.resize(n);
  s.advantages.resize(n);
  s.returns.resize(n);
  const Eigen::MatrixXd mean = p.policy.mean(s.observations);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < act; ++a) s.actions(a, i) = mean(a, i) + std::exp(p.policy.log_std()[a]) * z(rng);
    s.old_log_probs[i] =
        efgcl::rl::gaussian_log_prob(mean.col(i), p.policy.log_std(), s.actions.col(i)) + small(rng);
    s.advantages[i] = z(rng);
    s.returns[i] = z(rng);
  }
  return p;
}

/// Apex height gain of a point mass pushed from rest by constant force f for
/// duration dt, then ballistic: fine explicit midpoint integration of both
/// phases, independent of any closed form.
inline double push_apex_gain(double f, double m, double dt, double g) {
  const int steps = 20000;
  const double h = dt / steps;
  double x = 0.0, v = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double a = f / m - g;
    const double vm = v + 0.5 * h * a;
    x += h * vm;
    v += h * a;
  }
  const double hf = std::max(v / g, 1e-12) / steps;
  while (v > 0.0) {
    const double vm = v - 0.5 * hf * g;
    if (vm <= 0.0) {
      x += v * v / (2.0 * g);
      break;
    }
    x += hf * vm;
    v -= hf * g;
  }
  return x;
}

}  // namespace oracle
