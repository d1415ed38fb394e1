#include "efgcl/harness/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "efgcl/errors.hpp"

namespace efgcl::harness {

env::Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return env::Rng(seq);
}

namespace {

std::string checkpoint_name(int iteration) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "checkpoint_%06d.ckpt", iteration);
  return buf;
}

}  // namespace

RunResult run_training(const ExperimentConfig& config, std::uint64_t seed, const RunOptions& options) {
  config.validate();
  const TaskSetup setup = TaskSetup::from_config(config);
  RunResult run;
  run.seed = seed;

  env::Rng init_rng = derive_rng(seed, 1);
  env::Rng shuffle_rng = derive_rng(seed, 2);
  std::vector<env::Rng> env_rngs;
  env_rngs.reserve(config.envs);
  for (int e = 0; e < config.envs; ++e) env_rngs.push_back(derive_rng(seed, 1000 + e));

  run.policy = rl::GaussianPolicy::random(setup.obs_dim(), setup.act_dim(), config.network.hidden,
                                          init_rng, config.network.initial_log_std);
  std::vector<int> value_sizes{setup.obs_dim()};
  value_sizes.insert(value_sizes.end(), config.network.hidden.begin(), config.network.hidden.end());
  value_sizes.push_back(1);
  run.value = rl::Mlp::random(value_sizes, init_rng, 1.0);
  rl::PpoLearner learner(run.policy, run.value, config.ppo);

  if (config.efgcl) {
    run.curriculum = curriculum::curriculum_start(config.curriculum.epsilon, config.curriculum.zeta);
  } else {
    run.curriculum.epsilon = config.curriculum.epsilon;
    run.curriculum.zeta = config.curriculum.zeta;
    run.curriculum.alpha = 0.0;
  }

  const bool write = !options.out_dir.empty();
  if (write) std::filesystem::create_directories(options.out_dir);

  const int budget = config.iterations;
  const int cp_budget = options.checkpoint_budget > 0 ? options.checkpoint_budget : budget;
  std::map<int, double> snapshot_at;
  for (double f : options.checkpoint_fractions) {
    const int it = static_cast<int>(std::lround(f * cp_budget));
    if (it >= 1) snapshot_at.emplace(it, f);
  }

  const auto start = std::chrono::steady_clock::now();
  int completed_at = -1;
  for (int it = 0; it < budget; ++it) {
    const double alpha = config.efgcl ? run.curriculum.alpha : 0.0;
    const int stage = run.curriculum.stage;
    CollectResult collected =
        collect_rollouts(setup, run.policy, run.value, alpha, env_rngs, config.reward_scale,
                         config.ppo.gamma, config.ppo.gae_lambda, config.execution);
    const rl::GaeResult gae = rl::compute_gae(collected.batch, collected.bootstrap_values);
    rl::PpoSamples samples;
    samples.observations = collected.batch.observations();
    samples.actions = collected.batch.actions();
    samples.old_log_probs = Eigen::Map<const Eigen::VectorXd>(collected.batch.log_probs().data(),
                                                              collected.batch.size());
    samples.advantages = gae.advantages;
    samples.returns = gae.returns;
    const rl::PpoStats stats =
        learner.update(run.policy, run.value, samples, shuffle_rng, config.execution);
    if (stats.aborted && !options.quiet) {
      std::fprintf(stderr, "iteration %d: update skipped (%s)\n", it, stats.diagnostic.c_str());
    }

    if (options.on_iteration) options.on_iteration(it, alpha, collected);
    const double rate = collected.success_rate();
    MetricsRow row;
    row.iteration = it;
    row.reward_mean = collected.mean_return();
    row.success_rate = rate;
    row.alpha = alpha;
    row.stage = stage;
    row.value_loss = stats.value_loss;
    if (config.record_wall_time) {
      row.wall_ms = std::round(std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - start).count());
    }
    run.metrics.rows.push_back(row);

    if (config.efgcl) {
      run.curriculum = curriculum::curriculum_advance(run.curriculum, rate);
    } else if (rate >= config.curriculum.zeta) {
      run.curriculum.complete = true;
    }
    if (run.curriculum.complete && completed_at < 0) completed_at = it;

    if (const auto snap = snapshot_at.find(it + 1); snap != snapshot_at.end()) {
      run.snapshots.push_back({snap->second, it + 1, run.value});
      if (write) {
        save_checkpoint((std::filesystem::path(options.out_dir) / checkpoint_name(it + 1)).string(),
                        make_teacher_checkpoint(config, run, it + 1));
      }
    }
    if (!options.quiet && (it % 10 == 0 || it + 1 == budget)) {
      std::fprintf(stderr, "[%s seed %llu] it %4d  alpha %.2f  success %.2f  return %8.2f  vloss %.4f\n",
                   config.efgcl ? "efgcl" : "baseline", static_cast<unsigned long long>(seed), it, alpha,
                   rate, row.reward_mean, row.value_loss);
    }
    if (config.curriculum.stop_on_completion && completed_at >= 0 &&
        it - completed_at >= config.curriculum.confirm_iterations) {
      break;
    }
  }

  summarize(run.metrics, config.curriculum.zeta);
  run.metrics.curriculum_complete = run.curriculum.complete;

  if (write) {
    const std::filesystem::path dir(options.out_dir);
    write_metrics_csv((dir / "metrics.csv").string(), run.metrics.rows);
    const int done = static_cast<int>(run.metrics.rows.size());
    save_checkpoint((dir / "checkpoint_final.ckpt").string(), make_teacher_checkpoint(config, run, done));
    std::string extra = "task = " + std::string(task_name(config.task)) + "\n";
    extra += "efgcl = " + std::string(config.efgcl ? "on" : "off") + "\n";
    extra += "seed = " + std::to_string(seed) + "\n";
    extra += "final_stage = " + std::to_string(run.curriculum.stage) + "\n";
    write_summary((dir / "summary.txt").string(), run.metrics, extra);
    if (options.write_trace) {
      env::Rng rng = derive_rng(seed, 3);
      env::TraceRecorder trace = episode_trace_recorder(setup);
      const double command = 0.5 * (setup.env.command_min + setup.env.command_max);
      run_episode(setup, mean_controller(run.policy, setup.obs_scale), command, rng, 0.0, &trace);
      trace.write_csv((dir / "trace.csv").string());
    }
  }
  return run;
}

Checkpoint make_teacher_checkpoint(const ExperimentConfig& config, const RunResult& run, int iteration) {
  Checkpoint c;
  c.meta["kind"] = "teacher";
  c.meta["task"] = task_name(config.task);
  c.meta["efgcl"] = config.efgcl ? "on" : "off";
  c.meta["seed"] = std::to_string(run.seed);
  c.meta["iteration"] = std::to_string(iteration);
  c.meta["stage"] = std::to_string(run.curriculum.stage);
  c.meta["curriculum_complete"] = run.curriculum.complete ? "yes" : "no";
  c.nets.emplace("policy_mean", run.policy.mean_net());
  c.nets.emplace("value", run.value);
  c.vectors["log_std"] = run.policy.log_std();
  c.vectors["obs_scale"] = env::observation_scale(TaskSetup::from_config(config).env);
  return c;
}

Teacher teacher_from_checkpoint(const Checkpoint& c) {
  if (c.get("kind") != "teacher") throw ConfigError("checkpoint is not a teacher");
  Teacher t;
  t.policy = rl::GaussianPolicy(c.net("policy_mean"), c.vector("log_std"));
  t.value = c.net("value");
  t.obs_scale = c.vector("obs_scale");
  t.curriculum_complete = c.get("curriculum_complete") == "yes";
  t.task = c.get("task") == "flip" ? Task::kFlip : Task::kJump;
  return t;
}

}  // namespace efgcl::harness
