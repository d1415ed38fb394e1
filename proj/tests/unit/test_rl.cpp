#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "efgcl/rl/adam.hpp"
#include "efgcl/rl/gaussian_policy.hpp"
#include "efgcl/rl/mlp.hpp"
#include "efgcl/rl/ppo.hpp"
#include "efgcl/rl/rollout_batch.hpp"
#include "oracles.hpp"

using namespace efgcl;
using namespace efgcl::rl;

TEST_CASE("mlp forward matches an explicit loop oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> width(1, 6);
    std::vector<int> sizes{width(rng), width(rng), width(rng), width(rng)};
    const Mlp net = Mlp::random(sizes, rng);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(sizes.front(), 5);
    const Eigen::MatrixXd y = net.forward(x);
    for (int c = 0; c < x.cols(); ++c) {
      const std::vector<double> ref = oracle::mlp_forward(net, x.col(c));
      for (int r = 0; r < y.rows(); ++r) CHECK(y(r, c) == doctest::Approx(ref[r]).epsilon(1e-12));
    }
    // Single-vector overload agrees with the batched one.
    const Eigen::VectorXd y0 = net.forward(Eigen::VectorXd(x.col(0)));
    CHECK((y0 - y.col(0)).norm() < 1e-14);
  }
}

TEST_CASE("mlp flatten and assign round-trip") {
  Rng rng(3);
  const Mlp a = Mlp::random({3, 4, 2}, rng);
  Mlp b({3, 4, 2});
  b.assign(a.flatten());
  CHECK(b.flatten() == a.flatten());
  CHECK(a.parameter_count() == 3 * 4 + 4 + 4 * 2 + 2);
}

TEST_CASE("mlp backward matches central differences") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Mlp net = Mlp::random({3, 5, 4, 2}, rng);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 4);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Random(2, 4);  // loss = sum(w .* y)
    Mlp::Tape tape;
    net.forward(x, tape);
    Mlp grad(net.sizes());
    const Eigen::MatrixXd dx = net.backward(tape, w, grad);
    auto loss = [&](const Mlp& m, const Eigen::MatrixXd& in) { return (m.forward(in).array() * w.array()).sum(); };
    const Eigen::VectorXd g = grad.flatten();
    const Eigen::VectorXd fd = oracle::central_difference(
        [&](const Eigen::VectorXd& p) {
          Mlp m = net;
          m.assign(p);
          return loss(m, x);
        },
        net.flatten(), 1e-6);
    CHECK(oracle::relative_error(g, fd) < 1e-6);
    Eigen::VectorXd xflat = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    const Eigen::VectorXd fdx = oracle::central_difference(
        [&](const Eigen::VectorXd& p) { return loss(net, Eigen::Map<const Eigen::MatrixXd>(p.data(), 3, 4)); },
        xflat, 1e-6);
    CHECK(oracle::relative_error(Eigen::Map<const Eigen::VectorXd>(dx.data(), dx.size()), fdx) < 1e-6);
  }
}

TEST_CASE("gaussian log-density integrates to one and matches the closed form") {
  const Eigen::VectorXd mean = Eigen::VectorXd::Constant(1, 0.3);
  const Eigen::VectorXd log_std = Eigen::VectorXd::Constant(1, -0.7);
  // Trapezoid over +-12 sigma.
  const double s = std::exp(-0.7);
  const int n = 20000;
  const double lo = 0.3 - 12 * s, hi = 0.3 + 12 * s, h = (hi - lo) / n;
  double mass = 0.0, ent = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double a = lo + i * h;
    const double lp = gaussian_log_prob(mean, log_std, Eigen::VectorXd::Constant(1, a));
    const double wgt = (i == 0 || i == n) ? 0.5 : 1.0;
    mass += wgt * std::exp(lp) * h;
    ent -= wgt * std::exp(lp) * lp * h;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ent == doctest::Approx(gaussian_entropy(log_std)).epsilon(1e-8));

  // Multivariate diagonal density is the product of the marginals.
  const Eigen::Vector3d m3(0.1, -0.2, 0.5), ls3(-1.0, 0.0, 0.4), a3(0.3, 0.1, -0.6);
  double ref = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double sd = std::exp(ls3[i]);
    ref += std::log(std::exp(-0.5 * std::pow((a3[i] - m3[i]) / sd, 2)) / (sd * std::sqrt(2 * std::numbers::pi)));
  }
  CHECK(gaussian_log_prob(m3, ls3, a3) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("sampled actions use mean + std * noise and clamp log_std") {
  const GaussianPolicyOut out{Eigen::Vector2d(1.0, -1.0), Eigen::Vector2d(0.0, std::log(2.0))};
  const ActionSample s = sample_action(out, Eigen::Vector2d(0.5, -1.0));
  CHECK(s.action[0] == doctest::Approx(1.5));
  CHECK(s.action[1] == doctest::Approx(-3.0));
  CHECK(s.log_prob == doctest::Approx(gaussian_log_prob(out.mean, out.log_std, s.action)));

  Rng rng(1);
  GaussianPolicy p = GaussianPolicy::random(3, 2, {4}, rng, 0.0);
  p.set_log_std(Eigen::Vector2d(-10.0, 10.0));
  CHECK(p.log_std()[0] == -4.0);
  CHECK(p.log_std()[1] == 1.0);
}

TEST_CASE("gae matches direct discounted summation") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto seq = oracle::random_sequences(rng, 3, 20);
    const GaeResult r = compute_gae(seq.batch, seq.bootstrap);
    const auto ref = oracle::gae_direct(seq.batch, seq.bootstrap);
    REQUIRE(r.advantages.size() == static_cast<Eigen::Index>(ref.size()));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(std::abs(r.advantages[i] - ref[i]) < 1e-10);
      CHECK(r.returns[i] == doctest::Approx(ref[i] + seq.batch.values()[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("gae edge cases") {
  RolloutBatch b(1, 1, 0.9, 0.8);
  Transition t;
  t.observation = Eigen::VectorXd::Zero(1);
  t.action = Eigen::VectorXd::Zero(1);
  t.reward = 1.0;
  t.value = 0.5;
  t.done = true;
  b.push(t);
  b.end_sequence();
  // Single terminal step: delta = r - V.
  CHECK(compute_gae(b, {}).advantages[0] == doctest::Approx(0.5));
  // An unterminated step bootstraps from the supplied value.
  RolloutBatch c(1, 1, 0.9, 0.8);
  t.done = false;
  c.push(t);
  c.end_sequence();
  CHECK(compute_gae(c, {2.0}).advantages[0] == doctest::Approx(1.0 + 0.9 * 2.0 - 0.5));
}

TEST_CASE("advantage normalization") {
  const Eigen::VectorXd a = (Eigen::VectorXd(4) << 1, 2, 3, 4).finished();
  const Eigen::VectorXd n = normalize_advantages(a);
  CHECK(n.mean() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::sqrt(n.squaredNorm() / 4) == doctest::Approx(1.0));
  CHECK(normalize_advantages(Eigen::VectorXd::Constant(3, 2.0)).isZero());
}

TEST_CASE("clipped surrogate") {
  // Inside the trust region: ratio * A.
  CHECK(ppo_clip_objective(std::log(1.1), 0.0, 2.0, 0.2) == doctest::Approx(2.2));
  // Positive advantage: capped at (1 + eps) A.
  CHECK(ppo_clip_objective(std::log(1.5), 0.0, 2.0, 0.2) == doctest::Approx(2.4));
  // Negative advantage: the pessimistic (lower) branch.
  CHECK(ppo_clip_objective(std::log(0.5), 0.0, -1.0, 0.2) == doctest::Approx(-0.8));
  CHECK(ppo_clip_objective(std::log(1.5), 0.0, -1.0, 0.2) == doctest::Approx(-1.5));
}

TEST_CASE("ppo loss gradient matches central differences") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = oracle::random_ppo_problem(rng, 3, 2, 16);
    PpoConfig cfg;
    cfg.entropy_coef = 0.01;
    std::vector<int> idx(16);
    for (int i = 0; i < 16; ++i) idx[i] = i;
    ActorCriticGradient g(f.policy, f.value);
    ppo_loss(f.policy, f.value, f.samples, idx, cfg, &g);
    const Eigen::VectorXd p0 = f.policy.flatten(), v0 = f.value.flatten();
    Eigen::VectorXd all(p0.size() + v0.size());
    all << p0, v0;
    const Eigen::VectorXd fd = oracle::central_difference(
        [&](const Eigen::VectorXd& p) {
          GaussianPolicy pol = f.policy;
          Mlp val = f.value;
          pol.assign(p.head(p0.size()));
          val.assign(p.tail(v0.size()));
          return ppo_loss(pol, val, f.samples, idx, cfg, nullptr).loss;
        },
        all, 1e-6);
    CHECK(oracle::relative_error(g.flatten(), fd) < 1e-5);
  }
}

TEST_CASE("ppo loss is identical in serial and parallel execution") {
  Rng rng(4);
  const auto f = oracle::random_ppo_problem(rng, 4, 2, 100);
  PpoConfig cfg;
  std::vector<int> idx(100);
  for (int i = 0; i < 100; ++i) idx[i] = i;
  ActorCriticGradient gs(f.policy, f.value), gp(f.policy, f.value);
  const LossTerms ls = ppo_loss(f.policy, f.value, f.samples, idx, cfg, &gs, Execution::kSerial);
  const LossTerms lp = ppo_loss(f.policy, f.value, f.samples, idx, cfg, &gp, Execution::kParallel);
  CHECK(ls.loss == lp.loss);
  CHECK(gs.flatten() == gp.flatten());
}

TEST_CASE("a ppo update raises the probability of positive-advantage actions") {
  Rng rng(9);
  GaussianPolicy policy = GaussianPolicy::random(2, 1, {8}, rng, -0.5);
  Mlp value = Mlp::random({2, 8, 1}, rng);
  const int n = 64;
  PpoSamples s;
  s.observations = Eigen::MatrixXd::Random(2, n);
  s.actions.resize(1, n);
  s.old_log_probs.resize(n);
  s.advantages.resize(n);
  s.returns = Eigen::VectorXd::Zero(n);
  const Eigen::MatrixXd mean = policy.mean(s.observations);
  for (int i = 0; i < n; ++i) {
    const double offset = i % 2 ? 0.5 : -0.5;  // odd: above the mean, rewarded
    s.actions(0, i) = mean(0, i) + offset;
    s.old_log_probs[i] = gaussian_log_prob(mean.col(i), policy.log_std(), s.actions.col(i));
    s.advantages[i] = i % 2 ? 1.0 : -1.0;
  }
  PpoConfig cfg;
  cfg.minibatch_size = n;
  cfg.epochs = 3;
  PpoLearner learner(policy, value, cfg);
  const GaussianPolicy before = policy;
  learner.update(policy, value, s, rng);
  const Eigen::MatrixXd after_mean = policy.mean(s.observations);
  double up = 0.0;
  for (int i = 1; i < n; i += 2) {
    up += gaussian_log_prob(after_mean.col(i), policy.log_std(), s.actions.col(i)) - s.old_log_probs[i];
  }
  CHECK(up > 0.0);
  CHECK((after_mean - mean).mean() > 0.0);
  CHECK(policy.flatten() != before.flatten());
}

TEST_CASE("ppo update rolls back on non-finite data") {
  Rng rng(2);
  auto f = oracle::random_ppo_problem(rng, 3, 1, 8);
  f.samples.returns[3] = std::numeric_limits<double>::quiet_NaN();
  PpoLearner learner(f.policy, f.value, PpoConfig{});
  const Eigen::VectorXd p = f.policy.flatten(), v = f.value.flatten();
  const PpoStats st = learner.update(f.policy, f.value, f.samples, rng);
  CHECK(st.aborted);
  CHECK(f.policy.flatten() == p);
  CHECK(f.value.flatten() == v);
}

TEST_CASE("adam first step moves each parameter by the learning rate") {
  Adam adam(3, {0.01});
  Eigen::VectorXd p = Eigen::Vector3d(1.0, 2.0, 3.0);
  adam.step(p, Eigen::Vector3d(5.0, -0.001, 0.0));
  CHECK(p[0] == doctest::Approx(0.99).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(2.01).epsilon(1e-4));
  CHECK(p[2] == 3.0);
  CHECK(adam.steps() == 1);
}
