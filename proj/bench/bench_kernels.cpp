// Serial reference path against the OpenMP kernels: rollout collection and
// the PPO loss gradient. Both paths produce identical numbers; only time differs.

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "efgcl/harness/config.hpp"
#include "efgcl/harness/rollout.hpp"
#include "efgcl/harness/training.hpp"
#include "efgcl/rl/ppo.hpp"

using namespace efgcl;

namespace {

struct Fixture {
  harness::TaskSetup setup;
  rl::GaussianPolicy policy;
  rl::Mlp value;

  explicit Fixture(Task task) : setup(harness::TaskSetup::from_config(harness::default_config(task))) {
    const auto hidden = harness::default_config(task).network.hidden;
    rl::Rng rng(1);
    policy = rl::GaussianPolicy::random(setup.obs_dim(), setup.act_dim(), hidden, rng, -1.0);
    std::vector<int> sizes{setup.obs_dim()};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    value = rl::Mlp::random(sizes, rng);
  }
};

void BM_Rollout(benchmark::State& state) {
  const Execution exec = state.range(0) ? Execution::kParallel : Execution::kSerial;
  const int envs = static_cast<int>(state.range(1));
  static const Fixture fx(Task::kFlip);
  for (auto _ : state) {
    std::vector<env::Rng> rngs;
    for (int e = 0; e < envs; ++e) rngs.push_back(harness::derive_rng(1, 1000 + e));
    auto r = harness::collect_rollouts(fx.setup, fx.policy, fx.value, 1.0, rngs, 0.1, 0.99, 0.95, exec);
    benchmark::DoNotOptimize(r.batch.size());
  }
  state.SetLabel(exec == Execution::kParallel ? "parallel" : "serial");
}

void BM_PpoGradient(benchmark::State& state) {
  const Execution exec = state.range(0) ? Execution::kParallel : Execution::kSerial;
  const int n = static_cast<int>(state.range(1));
  static const Fixture fx(Task::kFlip);
  rl::PpoSamples s;
  s.observations = Eigen::MatrixXd::Random(fx.setup.obs_dim(), n);
  s.actions = Eigen::MatrixXd::Random(fx.setup.act_dim(), n);
  s.old_log_probs = Eigen::VectorXd::Random(n);
  s.advantages = Eigen::VectorXd::Random(n);
  s.returns = Eigen::VectorXd::Random(n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  rl::PpoConfig cfg;
  for (auto _ : state) {
    rl::ActorCriticGradient g(fx.policy, fx.value);
    auto terms = rl::ppo_loss(fx.policy, fx.value, s, idx, cfg, &g, exec);
    benchmark::DoNotOptimize(terms.loss);
  }
  state.SetLabel(exec == Execution::kParallel ? "parallel" : "serial");
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK(BM_Rollout)->ArgsProduct({{0, 1}, {32, 64}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PpoGradient)->ArgsProduct({{0, 1}, {1024, 4096}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
