#include "efgcl/harness/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "efgcl/errors.hpp"

namespace efgcl::harness {

TaskSetup TaskSetup::from_config(const ExperimentConfig& config) {
  TaskSetup s;
  s.task = config.task;
  s.env = config.env;
  s.env.task = config.task;
  s.env.time_lambda = config.assist.window.start > 0.0 ? config.assist.window.start : 1.0;
  s.reward = config.task == Task::kJump ? reward::jump_reward_config(0.5) : reward::flip_reward_config();
  s.success.task = config.task;
  s.assist = config.assist;
  s.obs_scale = env::observation_scale(s.env);
  s.env.validate();
  return s;
}

reward::RewardConfig TaskSetup::reward_for(double command) const {
  reward::RewardConfig r = reward;
  if (task == Task::kJump) r.x_target = command;
  return r;
}

curriculum::AssistPattern TaskSetup::assist_for(double command) const {
  if (task == Task::kJump) return curriculum::jump_pattern(command, env.mass, env.gravity, assist.window);
  return curriculum::push_pattern(assist.offset, assist.magnitude, assist.window);
}

double TaskSetup::sample_command(env::Rng& rng) const {
  if (env.command_min == env.command_max) return env.command_min;
  std::uniform_real_distribution<double> u(env.command_min, env.command_max);
  return u(rng);
}

reward::RewardInputs reward_inputs(const TaskSetup& setup, const env::EnvState& s) {
  reward::RewardInputs in;
  const double h_stand = setup.env.h_stand();
  in.x = setup.task == Task::kJump ? s.h_max - h_stand : s.theta;
  in.height_dev = s.h - h_stand;
  in.q = s.q;
  in.q_stand = setup.env.q_stand_vector();
  in.q_dot = s.q_dot;
  in.q_ddot = (s.q_dot - s.prev_q_dot) / setup.env.dt_ctrl;
  in.body_contacts = s.trunk_contact ? 1 : 0;
  in.terminated = s.cause == env::TerminationCause::kBodyContact;
  return in;
}

namespace {

curriculum::EpisodeSummary summarize_episode(const TaskSetup& setup, const env::EnvState& s,
                                             bool faulted) {
  curriculum::EpisodeSummary e;
  const double h_stand = setup.env.h_stand();
  e.max_height_gain = s.h_max - h_stand;
  e.final_height_dev = s.h - h_stand;
  e.final_angle = s.theta;
  e.faulted = faulted;
  e.fell = s.cause == env::TerminationCause::kBodyContact;
  return e;
}

void finish_record(const TaskSetup& setup, EpisodeRecord& rec, const env::EnvState& s, bool faulted) {
  rec.faulted = faulted;
  rec.summary = summarize_episode(setup, s, faulted);
  rec.success = curriculum::check_success(rec.summary, setup.success, rec.command);
}

struct Slot {
  env::EnvState state;
  Eigen::VectorXd obs;  // scaled full observation
  curriculum::AssistPattern pattern;
  reward::RewardConfig reward;
  std::vector<rl::Transition> steps;
  EpisodeRecord record;
  bool active = true;
  bool truncated = false;
};

}  // namespace

double CollectResult::success_rate() const {
  if (episodes.empty()) return 0.0;
  const auto n = std::count_if(episodes.begin(), episodes.end(), [](const auto& e) { return e.success; });
  return static_cast<double>(n) / static_cast<double>(episodes.size());
}

double CollectResult::mean_return() const {
  if (episodes.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& e : episodes) sum += e.episode_return;
  return sum / static_cast<double>(episodes.size());
}

CollectResult collect_rollouts(const TaskSetup& setup, const rl::GaussianPolicy& policy,
                               const rl::Mlp& value, double alpha, std::vector<env::Rng>& env_rngs,
                               double reward_scale, double gamma, double gae_lambda,
                               Execution exec) {
  const int n = static_cast<int>(env_rngs.size());
  if (policy.obs_dim() != setup.obs_dim() || policy.act_dim() != setup.act_dim()) {
    throw ConfigError("policy shape does not match the task");
  }
  std::vector<Slot> slots(n);
  for (int e = 0; e < n; ++e) {
    Slot& s = slots[e];
    const double command = setup.sample_command(env_rngs[e]);
    auto [state, obs] = env::env_reset(setup.env, command, env_rngs[e]);
    s.state = std::move(state);
    s.obs = obs.full().cwiseProduct(setup.obs_scale);
    s.pattern = setup.assist_for(command);
    s.reward = setup.reward_for(command);
    s.record.command = command;
  }

  const bool parallel = exec == Execution::kParallel;
  std::vector<int> active(n);
  std::iota(active.begin(), active.end(), 0);
  while (!active.empty()) {
    const int k = static_cast<int>(active.size());
    Eigen::MatrixXd x(setup.obs_dim(), k);
    for (int j = 0; j < k; ++j) x.col(j) = slots[active[j]].obs;
    const Eigen::MatrixXd means = policy.mean(x);
    const Eigen::MatrixXd values = value.forward(x);

#pragma omp parallel for schedule(static) if (parallel)
    for (int j = 0; j < k; ++j) {
      Slot& s = slots[active[j]];
      env::Rng& rng = env_rngs[active[j]];
      std::normal_distribution<double> normal;
      Eigen::VectorXd noise(setup.act_dim());
      for (auto& z : noise) z = normal(rng);
      const rl::ActionSample a = rl::sample_action({means.col(j), policy.log_std()}, noise);

      rl::Transition tr;
      tr.observation = s.obs;
      tr.action = a.action;
      tr.log_prob = a.log_prob;
      tr.value = values(0, j);
      try {
        const env::ExternalForces ext{{}, alpha > 0.0 ? &s.pattern : nullptr, alpha};
        env::StepResult r = env::env_step(setup.env, s.state, a.action, ext);
        const double reward = reward::total_reward(reward_inputs(setup, r.state), s.reward);
        s.state = std::move(r.state);
        s.obs = r.observation.full().cwiseProduct(setup.obs_scale);
        tr.reward = reward * reward_scale;
        tr.assist_force = s.state.assist_applied;
        s.record.episode_return += reward;
        s.record.peak_assist = std::max(s.record.peak_assist, s.state.assist_applied);
        if (r.terminated) {
          s.active = false;
          s.truncated = r.cause == env::TerminationCause::kTimeLimit;
          tr.done = !s.truncated;
          finish_record(setup, s.record, s.state, false);
        }
      } catch (const SimulationFault&) {
        // Aborted episode: charged like a fall and counted as a failure.
        tr.reward = s.reward.termination_coef * reward_scale;
        tr.done = true;
        s.active = false;
        s.record.episode_return += s.reward.termination_coef;
        finish_record(setup, s.record, s.state, true);
      }
      s.steps.push_back(std::move(tr));
      ++s.record.length;
    }
    std::erase_if(active, [&](int e) { return !slots[e].active; });
  }

  CollectResult out;
  out.batch = rl::RolloutBatch(setup.obs_dim(), setup.act_dim(), gamma, gae_lambda);
  std::vector<int> truncated;
  for (int e = 0; e < n; ++e) {
    for (const auto& tr : slots[e].steps) out.batch.push(tr);
    if (!slots[e].steps.back().done) {
      out.batch.end_sequence();
      truncated.push_back(e);
    }
    out.episodes.push_back(slots[e].record);
  }
  if (!truncated.empty()) {
    Eigen::MatrixXd x(setup.obs_dim(), static_cast<Eigen::Index>(truncated.size()));
    for (std::size_t j = 0; j < truncated.size(); ++j) x.col(j) = slots[truncated[j]].obs;
    const Eigen::MatrixXd v = value.forward(x);
    out.bootstrap_values.assign(v.data(), v.data() + v.size());
  }
  return out;
}

env::TraceRecorder episode_trace_recorder(const TaskSetup& setup) {
  return env::TraceRecorder(setup.env.num_joints(), {"reward_task", "reward_stand", "reward_total"});
}

Controller mean_controller(const rl::GaussianPolicy& policy, const Eigen::VectorXd& obs_scale) {
  return [&policy, obs_scale](const env::Observation& o) -> Eigen::VectorXd {
    return policy.mean_net().forward(Eigen::VectorXd(o.full().cwiseProduct(obs_scale)));
  };
}

EpisodeRecord run_episode(const TaskSetup& setup, const Controller& controller, double command,
                          env::Rng& rng, double alpha, env::TraceRecorder* trace,
                          std::vector<env::Observation>* observations) {
  auto [state, obs] = env::env_reset(setup.env, command, rng);
  const curriculum::AssistPattern pattern = setup.assist_for(command);
  const reward::RewardConfig reward_cfg = setup.reward_for(command);
  EpisodeRecord rec;
  rec.command = command;
  if (trace) trace->record(state, {0.0, 0.0, 0.0});
  bool faulted = false;
  while (true) {
    if (observations) observations->push_back(obs);
    const Eigen::VectorXd action = controller(obs);
    try {
      const env::ExternalForces ext{{}, alpha > 0.0 ? &pattern : nullptr, alpha};
      env::StepResult r = env::env_step(setup.env, state, action, ext);
      const reward::RewardBreakdown terms = reward::reward_terms(reward_inputs(setup, r.state), reward_cfg);
      rec.episode_return += terms.total;
      rec.peak_assist = std::max(rec.peak_assist, r.state.assist_applied);
      state = std::move(r.state);
      obs = std::move(r.observation);
      ++rec.length;
      if (trace) trace->record(state, {terms.task, terms.stand, terms.total});
      if (r.terminated) break;
    } catch (const SimulationFault&) {
      faulted = true;
      ++rec.length;
      break;
    }
  }
  finish_record(setup, rec, state, faulted);
  return rec;
}

double evaluate_success(const TaskSetup& setup, const Controller& controller, int episodes,
                        env::Rng& rng) {
  if (episodes <= 0) return 0.0;
  int wins = 0;
  for (int i = 0; i < episodes; ++i) {
    const double command = setup.sample_command(rng);
    if (run_episode(setup, controller, command, rng).success) ++wins;
  }
  return static_cast<double>(wins) / episodes;
}

}  // namespace efgcl::harness
