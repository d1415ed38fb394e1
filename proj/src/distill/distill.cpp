#include "efgcl/distill/distill.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "efgcl/errors.hpp"
#include "efgcl/rl/adam.hpp"

namespace efgcl::distill {

StudentNet::StudentNet(rl::Mlp net, int act_dim, Eigen::VectorXd prop_scale, Eigen::VectorXd priv_scale)
    : net_(std::move(net)), act_dim_(act_dim), prop_scale_(std::move(prop_scale)),
      priv_scale_(std::move(priv_scale)) {
  if (act_dim_ <= 0 || act_dim_ >= net_.output_size()) throw ConfigError("student output split is invalid");
  if (prop_scale_.size() != net_.input_size()) throw ConfigError("student prop scale size mismatch");
  if (priv_scale_.size() != priv_dim()) throw ConfigError("student priv scale size mismatch");
}

StudentNet StudentNet::random(int act_dim, const Eigen::VectorXd& prop_scale, const Eigen::VectorXd& priv_scale,
                              const std::vector<int>& hidden, rl::Rng& rng) {
  std::vector<int> sizes{static_cast<int>(prop_scale.size())};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(act_dim + static_cast<int>(priv_scale.size()));
  return StudentNet(rl::Mlp::random(sizes, rng), act_dim, prop_scale, priv_scale);
}

StudentNet::Output StudentNet::forward_scaled(const Eigen::MatrixXd& prop_scaled) const {
  const Eigen::MatrixXd y = net_.forward(prop_scaled);
  return {y.topRows(act_dim_), y.bottomRows(priv_dim())};
}

Eigen::VectorXd StudentNet::act(const Eigen::VectorXd& prop) const {
  const Eigen::VectorXd y = net_.forward(Eigen::VectorXd(prop.cwiseProduct(prop_scale_)));
  return y.head(act_dim_);
}

Eigen::VectorXd StudentNet::reconstruct(const Eigen::VectorXd& prop) const {
  const Eigen::VectorXd y = net_.forward(Eigen::VectorXd(prop.cwiseProduct(prop_scale_)));
  return y.tail(priv_dim()).cwiseQuotient(priv_scale_);
}

harness::Controller student_controller(const StudentNet& student) {
  return [&student](const env::Observation& o) -> Eigen::VectorXd { return student.act(o.prop); };
}

double distill_loss(const Eigen::VectorXd& student_action, const Eigen::VectorXd& teacher_action,
                    const Eigen::VectorXd& reconstructed_priv, const Eigen::VectorXd& true_priv,
                    double weight) {
  if (student_action.size() != teacher_action.size() || reconstructed_priv.size() != true_priv.size()) {
    throw ConfigError("distill_loss: size mismatch");
  }
  if (!(weight >= 0.0)) throw ConfigError("distill_loss: weight must be >= 0");
  const double action = student_action.size() ? (student_action - teacher_action).squaredNorm() /
                                                    static_cast<double>(student_action.size())
                                              : 0.0;
  const double recon = true_priv.size() ? (reconstructed_priv - true_priv).squaredNorm() /
                                              static_cast<double>(true_priv.size())
                                        : 0.0;
  return action + weight * recon;
}

Dataset collect_teacher_data(const harness::TaskSetup& setup, const harness::Teacher& teacher, int transitions,
                             std::uint64_t seed, Execution exec) {
  if (transitions <= 0) throw ConfigError("distillation needs a positive transition count");
  const int np = env::prop_size(setup.env);
  const int nv = env::priv_size(setup.env);
  const int episode_steps = static_cast<int>(std::lround(setup.env.episode_length / setup.env.dt_ctrl));
  const int episodes = (transitions + episode_steps - 1) / episode_steps;
  const harness::Controller teacher_ctl = harness::mean_controller(teacher.policy, teacher.obs_scale);

  std::vector<std::vector<env::Observation>> per_episode(episodes);
  const bool parallel = exec == Execution::kParallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < episodes; ++i) {
    env::Rng rng = harness::derive_rng(seed, 200000 + static_cast<std::uint64_t>(i));
    const double command = setup.sample_command(rng);
    harness::run_episode(setup, teacher_ctl, command, rng, 0.0, nullptr, &per_episode[i]);
  }

  std::size_t total = 0;
  for (const auto& e : per_episode) total += e.size();
  const int n = static_cast<int>(std::min<std::size_t>(total, static_cast<std::size_t>(transitions)));
  Dataset d;
  d.prop.resize(np, n);
  d.priv.resize(nv, n);
  Eigen::MatrixXd full(np + nv, n);
  int col = 0;
  for (const auto& e : per_episode) {
    for (const auto& o : e) {
      if (col == n) break;
      full.col(col++) = o.full().cwiseProduct(setup.obs_scale);
    }
  }
  d.prop = full.topRows(np);
  d.priv = full.bottomRows(nv);
  d.teacher_action = teacher.policy.mean_net().forward(full);
  return d;
}

namespace {

// Returns (action mse, recon mse) over columns [begin, end).
std::pair<double, double> mse(const StudentNet& s, const Dataset& d, int begin, int end) {
  if (end <= begin) return {0.0, 0.0};
  const int n = end - begin;
  const auto out = s.forward_scaled(d.prop.middleCols(begin, n));
  const double a = (out.action - d.teacher_action.middleCols(begin, n)).squaredNorm() /
                   static_cast<double>(out.action.size());
  const double r = (out.priv - d.priv.middleCols(begin, n)).squaredNorm() / static_cast<double>(out.priv.size());
  return {a, r};
}

}  // namespace

DistillResult fit_student(const Dataset& data, const harness::TaskSetup& setup,
                          const harness::DistillSettings& settings, std::uint64_t seed) {
  const int np = env::prop_size(setup.env);
  const int na = setup.act_dim();
  if (data.prop.rows() != np || data.teacher_action.rows() != na) throw ConfigError("dataset shape mismatch");
  if (settings.minibatch_size <= 0 || settings.epochs < 0) throw ConfigError("invalid distillation settings");
  const int n = data.size();
  const int holdout = static_cast<int>(std::floor(settings.holdout_fraction * n));
  const int train = n - holdout;
  if (train <= 0) throw ConfigError("no training samples left after the held-out split");

  rl::Rng rng = harness::derive_rng(seed, 6);
  DistillResult res;
  StudentNet& s = res.student;
  s = StudentNet::random(na, setup.obs_scale.head(np), setup.obs_scale.tail(env::priv_size(setup.env)),
                         settings.hidden, rng);
  const int nv = s.priv_dim();
  rl::Mlp grad(s.net().sizes());
  Eigen::VectorXd params = s.net().flatten();
  rl::Adam adam(params.size(), {settings.learning_rate});

  std::vector<int> order(train);
  std::iota(order.begin(), order.end(), 0);
  const double w = settings.reconstruction_weight;
  for (int epoch = 0; epoch < settings.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (int b = 0; b < train; b += settings.minibatch_size) {
      const int m = std::min(settings.minibatch_size, train - b);
      Eigen::MatrixXd x(np, m), a(na, m), p(nv, m);
      for (int j = 0; j < m; ++j) {
        x.col(j) = data.prop.col(order[b + j]);
        a.col(j) = data.teacher_action.col(order[b + j]);
        p.col(j) = data.priv.col(order[b + j]);
      }
      rl::Mlp::Tape tape;
      const Eigen::MatrixXd y = s.net().forward(x, tape);
      const Eigen::MatrixXd ea = y.topRows(na) - a;
      const Eigen::MatrixXd ep = y.bottomRows(nv) - p;
      const double ca = 1.0 / (static_cast<double>(na) * m);
      const double cp = w / (static_cast<double>(nv) * m);
      loss_sum += (ca * ea.squaredNorm() + cp * ep.squaredNorm()) * m;
      Eigen::MatrixXd dy(na + nv, m);
      dy.topRows(na) = 2.0 * ca * ea;
      dy.bottomRows(nv) = 2.0 * cp * ep;
      grad.set_zero();
      s.net().backward(tape, dy, grad);
      adam.step(params, grad.flatten());
      s.net().assign(params);
    }
    res.report.epoch_loss.push_back(loss_sum / train);
  }

  res.report.train_samples = train;
  res.report.holdout_samples = holdout;
  res.report.train_action_mse = mse(s, data, 0, train).first;
  const auto [ha, hr] = mse(s, data, train, n);
  res.report.holdout_action_mse = ha;
  res.report.holdout_recon_mse = hr;
  return res;
}

DistillResult train_student(const harness::Teacher& teacher, const harness::TaskSetup& setup,
                            const harness::DistillSettings& settings, std::uint64_t seed, Execution exec) {
  if (!teacher.curriculum_complete) {
    throw ConfigError("teacher curriculum is not complete; distillation needs a fully decayed assist");
  }
  if (teacher.task != setup.task) throw ConfigError("teacher task does not match the environment");
  const Dataset data = collect_teacher_data(setup, teacher, settings.transitions, seed, exec);
  DistillResult res = fit_student(data, setup, settings, seed);

  if (settings.eval_episodes > 0) {
    // Same command and reset sequence for both policies.
    env::Rng r1 = harness::derive_rng(seed, 7);
    env::Rng r2 = harness::derive_rng(seed, 7);
    res.report.teacher_success = harness::evaluate_success(
        setup, harness::mean_controller(teacher.policy, teacher.obs_scale), settings.eval_episodes, r1);
    res.report.student_success =
        harness::evaluate_success(setup, student_controller(res.student), settings.eval_episodes, r2);
    res.report.eval_episodes = settings.eval_episodes;
  }
  return res;
}

std::string DistillReport::describe() const {
  std::ostringstream o;
  o << "samples: " << train_samples << " train, " << holdout_samples << " held out\n";
  o << "action mse: train " << train_action_mse << ", held out " << holdout_action_mse << '\n';
  o << "reconstruction mse (held out): " << holdout_recon_mse << '\n';
  if (eval_episodes > 0) {
    o << "success over " << eval_episodes << " episodes: teacher " << teacher_success << ", student "
      << student_success << '\n';
  }
  return o.str();
}

harness::Checkpoint make_student_checkpoint(const StudentNet& student, Task task, const DistillReport& report) {
  harness::Checkpoint c;
  c.meta["kind"] = "student";
  c.meta["task"] = task_name(task);
  c.meta["act_dim"] = std::to_string(student.act_dim());
  c.meta["holdout_action_mse"] = std::to_string(report.holdout_action_mse);
  c.nets.emplace("student", student.net());
  c.vectors["prop_scale"] = student.prop_scale();
  c.vectors["priv_scale"] = student.priv_scale();
  return c;
}

StudentNet student_from_checkpoint(const harness::Checkpoint& c) {
  if (c.get("kind") != "student") throw ConfigError("checkpoint is not a student");
  int act_dim = 0;
  try {
    act_dim = std::stoi(c.get("act_dim"));
  } catch (const std::exception&) {
    throw ConfigError("student checkpoint has a malformed act_dim");
  }
  return StudentNet(c.net("student"), act_dim, c.vector("prop_scale"), c.vector("priv_scale"));
}

}  // namespace efgcl::distill
