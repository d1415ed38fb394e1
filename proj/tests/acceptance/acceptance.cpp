// Acceptance suite: one line per criterion, PASS or FAIL, followed by the
// measured numbers. Exit status is non-zero if any selected criterion fails.
//
//   acceptance [--out DIR] [--only A1,A5,...] [--expect-fail A7,...]
//
// Criteria named in --expect-fail still run and still print FAIL, but do not
// affect the exit status; an expected failure that passes is reported as such.
// The statistical criteria share work: A7 and A10 reuse the A5 runs, and the
// nominal-magnitude cell of A8 reuses the A6 EFGCL runs.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "efgcl/curriculum/assist.hpp"
#include "efgcl/curriculum/curriculum.hpp"
#include "efgcl/distill/distill.hpp"
#include "efgcl/errors.hpp"
#include "efgcl/harness/config.hpp"
#include "efgcl/harness/experiments.hpp"
#include "efgcl/harness/training.hpp"
#include "efgcl/reward/reward.hpp"
#include "efgcl/rl/mlp.hpp"
#include "efgcl/rl/ppo.hpp"
#include "efgcl/rl/rollout_batch.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace efgcl;
using Clock = std::chrono::steady_clock;

namespace {

// Held-out squared action error of the student, rad^2 per action dimension.
constexpr double kDistillMseThreshold = 0.02;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream o;
  if (std::isinf(v)) {
    o << "never";
  } else {
    o << std::setprecision(precision) << v;
  }
  return o.str();
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : "n/a"; }

std::string fmt_iters(const std::vector<std::optional<int>>& v) {
  std::ostringstream o;
  for (std::size_t i = 0; i < v.size(); ++i) o << (i ? " " : "") << (v[i] ? std::to_string(*v[i]) : "-");
  return o.str();
}

// A1 ------------------------------------------------------------------------

Outcome gae_oracle() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  int sequences = 0;
  for (; sequences < 1000; ++sequences) {
    const auto seq = oracle::random_sequences(rng, 1, 20);
    const auto got = rl::compute_gae(seq.batch, seq.bootstrap);
    const auto ref = oracle::gae_direct(seq.batch, seq.bootstrap);
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(got.advantages[i] - ref[i]));
  }
  return {worst <= 1e-10, std::to_string(sequences) + " sequences, max |error| " + fmt(worst)};
}

// A2 ------------------------------------------------------------------------

Outcome gradient_checks() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> width(1, 6), depth(1, 3);
  double worst = 0.0;
  int nets = 0;
  for (; nets < 50; ++nets) {
    // Plain network: parameter and input gradients of a random linear functional.
    std::vector<int> sizes{width(rng)};
    const int hidden = depth(rng);
    for (int l = 0; l < hidden; ++l) sizes.push_back(width(rng));
    sizes.push_back(width(rng));
    const rl::Mlp net = rl::Mlp::random(sizes, rng);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(sizes.front(), 3);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Random(sizes.back(), 3);
    rl::Mlp::Tape tape;
    net.forward(x, tape);
    rl::Mlp grad(net.sizes());
    const Eigen::MatrixXd dx = net.backward(tape, w, grad);
    auto loss = [&](const rl::Mlp& m, const Eigen::MatrixXd& in) { return (m.forward(in).array() * w.array()).sum(); };
    const Eigen::VectorXd fd = oracle::central_difference(
        [&](const Eigen::VectorXd& p) {
          rl::Mlp m = net;
          m.assign(p);
          return loss(m, x);
        },
        net.flatten(), 1e-6);
    worst = std::max(worst, oracle::relative_error(grad.flatten(), fd));
    const Eigen::VectorXd xflat = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    const Eigen::VectorXd fdx = oracle::central_difference(
        [&](const Eigen::VectorXd& p) {
          return loss(net, Eigen::Map<const Eigen::MatrixXd>(p.data(), x.rows(), x.cols()));
        },
        xflat, 1e-6);
    worst = std::max(worst, oracle::relative_error(Eigen::Map<const Eigen::VectorXd>(dx.data(), dx.size()), fdx));

    // Actor-critic pair through the full clipped PPO loss, entropy included.
    const auto f = oracle::random_ppo_problem(rng, width(rng), 1 + nets % 3, 12);
    rl::PpoConfig cfg;
    cfg.entropy_coef = 0.01;
    std::vector<int> idx(12);
    for (int i = 0; i < 12; ++i) idx[i] = i;
    rl::ActorCriticGradient g(f.policy, f.value);
    rl::ppo_loss(f.policy, f.value, f.samples, idx, cfg, &g);
    const Eigen::VectorXd p0 = f.policy.flatten(), v0 = f.value.flatten();
    Eigen::VectorXd all(p0.size() + v0.size());
    all << p0, v0;
    const Eigen::VectorXd fdp = oracle::central_difference(
        [&](const Eigen::VectorXd& p) {
          rl::GaussianPolicy pol = f.policy;
          rl::Mlp val = f.value;
          pol.assign(p.head(p0.size()));
          val.assign(p.tail(v0.size()));
          return rl::ppo_loss(pol, val, f.samples, idx, cfg, nullptr).loss;
        },
        all, 1e-6);
    worst = std::max(worst, oracle::relative_error(g.flatten(), fdp));
  }
  return {worst < 1e-4, std::to_string(nets) + " nets and actor-critic pairs, max relative error " + fmt(worst)};
}

// A3 ------------------------------------------------------------------------

Outcome f_jump_oracle() {
  double worst = 0.0;
  for (double m : {1.0, 5.0, 18.0}) {
    for (double l : {0.1, 0.5, 1.0}) {
      for (double dt : {0.05, 0.1, 0.2}) {
        const double gain = oracle::push_apex_gain(curriculum::f_jump(l, m, dt, 9.81), m, dt, 9.81);
        worst = std::max(worst, std::abs(gain - l) / l);
      }
    }
  }
  return {worst <= 0.02, "27 grid points, max relative apex error " + fmt(worst)};
}

// A4 ------------------------------------------------------------------------

Outcome curriculum_properties() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long violations = 0, steps = 0;
  int streams = 0;
  for (; streams < 5000; ++streams) {
    const double eps = streams % 2 == 0 ? 0.01 : 0.02 + 0.5 * u(rng);
    const double zeta = streams % 2 == 0 ? 0.6 : 0.05 + 0.9 * u(rng);
    const int needed = static_cast<int>(std::ceil(1.0 / eps - 1e-9));
    // Mix of uniform, mostly-failing and mostly-passing streams.
    const double bias = (streams % 3) * 0.5;
    curriculum::CurriculumState s = curriculum::curriculum_start(eps, zeta);
    int qualifying = 0;
    for (int k = 0; k < 3 * needed + 20; ++k, ++steps) {
      const double rate = std::clamp(u(rng) * 0.5 + bias * u(rng), 0.0, 1.0);
      const auto next = curriculum::curriculum_advance(s, rate);
      if (rate >= zeta && !s.complete) ++qualifying;
      bool ok = next.alpha <= s.alpha && next.alpha >= 0.0 && next.alpha <= 1.0;
      ok = ok && (rate >= zeta || (next.stage == s.stage && next.alpha == s.alpha));
      ok = ok && ((next.alpha == 0.0) == (qualifying >= needed));
      ok = ok && next.stage == std::min(qualifying, needed);
      if (!ok) ++violations;
      s = next;
    }
  }
  const bool hundred_decays = curriculum::stages_to_zero(0.01) == 100;
  return {violations == 0 && hundred_decays, std::to_string(streams) + " streams, " + std::to_string(steps) +
                                             " transitions, " + std::to_string(violations) +
                                             " violations; eps 0.01 needs " +
                                             std::to_string(curriculum::stages_to_zero(0.01)) + " decays"};
}

// A9 ------------------------------------------------------------------------

Outcome reward_identity() {
  const auto diff = reward::differing_fields(reward::jump_reward_config(0.5), reward::flip_reward_config());
  const std::set<std::string> got(diff.begin(), diff.end());
  const bool fields_ok = got == std::set<std::string>{"task", "x_target", "s_x"};
  const double spot = reward::rho_task(0.6, 0.5, 0.01);
  const bool spot_ok = std::abs(spot - std::exp(-1.0)) < 1e-12;
  reward::RewardInputs in;
  in.x = 0.5;
  in.q = in.q_stand = in.q_dot = in.q_ddot = Eigen::VectorXd::Zero(2);
  const auto cfg = reward::jump_reward_config(0.5);
  const double alive = reward::total_reward(in, cfg);
  in.terminated = true;
  const double delta = reward::total_reward(in, cfg) - alive;
  const bool term_ok = std::abs(delta + 100.0) < 1e-12;
  std::string fields;
  for (const auto& f : diff) fields += (fields.empty() ? "" : ",") + f;
  return {fields_ok && spot_ok && term_ok,
          "differing fields {" + fields + "}, rho(0.1, 0.01) = " + fmt(spot, 12) + ", termination delta " +
              fmt(delta, 12)};
}

// A11 -----------------------------------------------------------------------

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& out) {
  harness::ExperimentConfig c = harness::default_config(Task::kJump);
  c.iterations = 8;
  c.record_wall_time = false;
  std::vector<std::string> files;
  for (const char* name : {"run_a", "run_b"}) {
    harness::RunOptions ro;
    ro.out_dir = (out / "a11" / name).string();
    harness::run_training(c, 7, ro);
    files.push_back(read_bytes(out / "a11" / name / "metrics.csv"));
  }
  c.execution = Execution::kSerial;
  harness::RunOptions ro;
  ro.out_dir = (out / "a11" / "run_serial").string();
  harness::run_training(c, 7, ro);
  files.push_back(read_bytes(out / "a11" / "run_serial" / "metrics.csv"));
  const bool same = !files[0].empty() && files[0] == files[1];
  const bool serial_same = files[0] == files[2];
  return {same && serial_same, std::string("repeat run ") + (same ? "identical" : "differs") + ", serial run " +
                                   (serial_same ? "identical" : "differs") + " (" +
                                   std::to_string(files[0].size()) + " bytes)"};
}

// A5 / A7 / A10 -------------------------------------------------------------

struct JumpStudy {
  harness::ExperimentConfig config;
  harness::ComparisonReport report;
  double seconds = 0.0;
};

JumpStudy run_jump_study(const std::vector<std::uint64_t>& seeds, const fs::path& out) {
  JumpStudy s;
  s.config = harness::default_config(Task::kJump);
  harness::ComparisonOptions o;
  o.efgcl_budget = s.config.iterations;
  o.baseline_budget = static_cast<int>(std::lround(1.5 * s.config.iterations));
  o.checkpoint_budget = s.config.iterations;
  o.out_dir = (out / "a5_jump").string();
  const auto t0 = Clock::now();
  s.report = harness::run_comparison(s.config, seeds, o);
  s.seconds = seconds_since(t0);
  return s;
}

Outcome jump_speedup(const JumpStudy& s) {
  const auto& r = s.report;
  const double e = r.efgcl_median.value_or(std::numeric_limits<double>::infinity());
  const double b = r.baseline_median.value_or(std::numeric_limits<double>::infinity());
  const bool pass = std::isfinite(e) && e <= 0.6 * b;
  std::ostringstream d;
  d << r.seeds.size() << " seeds; median iterations to 60% at alpha 0: EFGCL " << fmt(e) << " ["
    << fmt_iters(r.efgcl_iterations) << "], baseline " << fmt(b) << " [" << fmt_iters(r.baseline_iterations)
    << "] within " << std::lround(1.5 * s.config.iterations) << "; ratio "
    << (std::isfinite(b) ? fmt(e / b) : "0") << " (need <= 0.6); " << fmt(s.seconds / 60.0, 3) << " min";
  return {pass, d.str()};
}

Outcome value_acceleration(const JumpStudy& s, const fs::path& out) {
  const auto setup = harness::TaskSetup::from_config(s.config);
  std::optional<harness::ProbeTrajectory> probe;
  for (const auto& run : s.report.efgcl_runs) {
    if (!run.metrics.curriculum_complete) continue;
    try {
      probe = harness::record_probe(setup, run.policy, run.seed);
      break;
    } catch (const DomainError&) {
    }
  }
  if (!probe) return {false, "no EFGCL policy produced a successful probe trajectory"};
  const auto rep =
      harness::measure_value_acceleration(s.report.efgcl_runs, s.report.baseline_runs, *probe, {0.2, 1.0});
  harness::write_value_probe((out / "a7_value_probe.csv").string(), rep, s.report.seeds);
  int wins = 0;
  std::ostringstream per;
  for (std::size_t i = 0; i < rep.efgcl_mse.size(); ++i) {
    const auto& e = rep.efgcl_mse[i][0];
    const auto& b = rep.baseline_mse[i][0];
    if (e && b && *e < *b) ++wins;
    per << (i ? "; " : "") << fmt_opt(e) << " vs " << fmt_opt(b);
  }
  const int n = static_cast<int>(rep.efgcl_mse.size());
  return {n >= 5 && wins >= 4, "EFGCL lower at 20% of budget in " + std::to_string(wins) + "/" + std::to_string(n) +
                                   " seeds (probe " + std::to_string(probe->observations.cols()) +
                                   " steps; MSE EFGCL vs baseline: " + per.str() + ")"};
}

Outcome distillation(const JumpStudy& s, const fs::path& out) {
  const harness::RunResult* teacher_run = nullptr;
  for (const auto& run : s.report.efgcl_runs) {
    if (run.metrics.curriculum_complete) {
      teacher_run = &run;
      break;
    }
  }
  if (!teacher_run) return {false, "no EFGCL run completed its curriculum, so there is no teacher"};
  const auto teacher = harness::teacher_from_checkpoint(
      harness::make_teacher_checkpoint(s.config, *teacher_run, static_cast<int>(teacher_run->metrics.rows.size())));
  const auto setup = harness::TaskSetup::from_config(s.config);
  auto settings = s.config.distill;
  settings.eval_episodes = 100;
  const auto res = distill::train_student(teacher, setup, settings, teacher_run->seed);
  fs::create_directories(out / "a10_distill");
  std::ofstream(out / "a10_distill" / "distill_report.txt") << res.report.describe();

  // Perturbation test: privileged entries replaced by large random values
  // across many observations must leave every student action unchanged.
  const auto ctl = distill::student_controller(res.student);
  env::Rng rng = harness::derive_rng(teacher_run->seed, 9);
  std::uniform_real_distribution<double> big(-1e3, 1e3);
  int perturbed = 0, changed = 0;
  for (int ep = 0; ep < 20; ++ep) {
    auto [state, obs] = env::env_reset(setup.env, setup.env.command_min +
                                                      (setup.env.command_max - setup.env.command_min) * (ep / 19.0),
                                       rng);
    for (int t = 0; t < 30; ++t) {
      const Eigen::VectorXd a = ctl(obs);
      env::Observation o2 = obs;
      for (Eigen::Index k = 0; k < o2.priv.size(); ++k) o2.priv[k] = big(rng);
      ++perturbed;
      if (ctl(o2) != a) ++changed;
      auto step = env::env_step(setup.env, state, a);
      state = step.state;
      obs = step.observation;
      if (step.terminated) break;
    }
  }

  const double threshold = kDistillMseThreshold;
  const auto& r = res.report;
  const bool mse_ok = r.holdout_action_mse < threshold;
  const bool success_ok = r.student_success >= 0.8 * r.teacher_success && r.teacher_success > 0.0;
  const bool blind = changed == 0 && res.student.prop_dim() == env::prop_size(setup.env);
  std::ostringstream d;
  d << "held-out action MSE " << fmt(r.holdout_action_mse) << " (threshold " << threshold << "), success over "
    << r.eval_episodes << " episodes: student " << fmt(r.student_success) << " vs teacher " << fmt(r.teacher_success)
    << " (need >= 80%), privileged perturbation changed " << changed << "/" << perturbed << " actions";
  return {mse_ok && success_ok && blind, d.str()};
}

// A6 / A8 -------------------------------------------------------------------

struct FlipStudy {
  harness::ExperimentConfig config;
  harness::ComparisonReport report;
  double seconds = 0.0;
};

FlipStudy run_flip_study(const std::vector<std::uint64_t>& seeds, const fs::path& out) {
  FlipStudy s;
  s.config = harness::default_config(Task::kFlip);
  harness::ComparisonOptions o;
  o.efgcl_budget = s.config.iterations;
  o.baseline_budget = s.config.iterations;
  o.out_dir = (out / "a6_flip").string();
  const auto t0 = Clock::now();
  s.report = harness::run_comparison(s.config, seeds, o);
  s.seconds = seconds_since(t0);
  return s;
}

Outcome flip_unlearnability(const FlipStudy& s, const std::vector<double>& baseline_peak) {
  const auto& r = s.report;
  int efgcl_ok = 0, baseline_low = 0;
  for (const auto& it : r.efgcl_iterations) efgcl_ok += it.has_value();
  std::ostringstream peaks;
  for (std::size_t i = 0; i < baseline_peak.size(); ++i) {
    baseline_low += baseline_peak[i] <= 0.1;
    peaks << (i ? " " : "") << fmt(baseline_peak[i], 2);
  }
  const int n = static_cast<int>(r.seeds.size());
  std::ostringstream d;
  d << "EFGCL reached 60% at alpha 0 in " << efgcl_ok << "/" << n << " seeds [" << fmt_iters(r.efgcl_iterations)
    << "]; baseline peak success [" << peaks.str() << "], <= 10% in " << baseline_low << "/" << n << " within "
    << s.config.iterations << " iterations; " << fmt(s.seconds / 60.0, 3) << " min";
  return {n >= 5 && efgcl_ok >= 3 && baseline_low >= 4, d.str()};
}

Outcome ablation_shape(const FlipStudy& flip, const std::vector<std::uint64_t>& seeds, const fs::path& out) {
  const auto& base = flip.config.assist;
  const auto full = harness::default_flip_sweep(base);
  // The nominal magnitude and window are the A6 EFGCL runs; only the other
  // magnitudes and the shortened window are trained here.
  harness::SweepSpec sweep;
  for (double m : full.magnitudes) {
    if (std::abs(m - base.magnitude) > 1e-9) sweep.magnitudes.push_back(m);
  }
  for (const auto& w : full.windows) {
    if (w.start != base.window.start || w.end != base.window.end) sweep.windows.push_back(w);
  }
  const auto t0 = Clock::now();
  harness::AblationReport rep = harness::run_ablation(flip.config, sweep, seeds);
  harness::AblationCell nominal{"magnitude", fmt(base.magnitude) + " N", base, {}, {}};
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    nominal.success.push_back(flip.report.efgcl_runs.empty() ? flip.report.efgcl_iterations[i].has_value()
                                                             : flip.report.efgcl_runs[i].metrics.curriculum_complete);
    nominal.iterations.push_back(flip.report.efgcl_iterations[i]);
  }
  rep.cells.insert(rep.cells.begin() + 2, nominal);
  harness::write_ablation((out / "a8_ablation.csv").string(), rep);

  // Reference grid (175 N nominal) -> expected outcome.
  const std::map<int, bool> expected_by_ratio = {{100, false}, {140, true}, {175, true}, {210, true}, {250, false}};
  bool pass = true;
  std::ostringstream d;
  for (const auto& cell : rep.cells) {
    bool want = false;
    std::string tag;
    if (cell.dimension == "magnitude") {
      const int grid_n = static_cast<int>(std::lround(cell.assist.magnitude / base.magnitude * 175.0));
      want = expected_by_ratio.at(grid_n);
      tag = std::to_string(grid_n) + "N-analog " + fmt(cell.assist.magnitude) + "N";
    } else {
      want = false;
      tag = "window " + fmt(cell.assist.window.start) + "-" + fmt(cell.assist.window.end) + "s";
    }
    const double frac = cell.success_fraction();
    const bool ok = want ? frac > 0.5 : frac < 0.5;
    pass = pass && ok;
    d << tag << " " << fmt(frac, 2) << (want ? " (want success)" : " (want failure)") << (ok ? "" : " MISMATCH")
      << "; ";
  }
  d << seeds.size() << " seeds per cell; " << fmt(seconds_since(t0) / 60.0, 3) << " min";
  return {pass, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EFGCL acceptance criteria"};
  std::string out = "acceptance_runs";
  std::string only, expect_fail;
  app.add_option("--out", out, "Directory for run artefacts");
  app.add_option("--only", only, "Comma-separated subset, e.g. A1,A5");
  app.add_option("--expect-fail", expect_fail, "Criteria known not to hold at this scale");
  CLI11_PARSE(app, argc, argv);

  auto split = [](const std::string& list) {
    std::set<std::string> ids;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) ids.insert(tok);
    }
    return ids;
  };
  const std::set<std::string> selected = split(only), expected_failures = split(expect_fail);
  auto want = [&](const std::string& id) { return selected.empty() || selected.count(id) > 0; };
  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  std::ofstream report(out_dir / "acceptance.txt");

  int failures = 0, expected = 0;
  auto record = [&](const std::string& id, const std::string& title, const std::function<Outcome()>& fn,
                    double time_limit = 0.0) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    if (time_limit > 0.0 && secs >= time_limit) {
      o.pass = false;
      o.detail += "; runtime over " + fmt(time_limit) + " s";
    }
    const bool known = expected_failures.count(id) > 0;
    std::ostringstream line;
    line << id << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << title << ": " << o.detail << " [" << fmt(secs, 3)
         << " s]";
    if (known) line << (o.pass ? " (listed as an expected failure)" : " (expected failure)");
    std::cout << line.str() << std::endl;
    report << line.str() << '\n';
    report.flush();
    if (!o.pass) (known ? expected : failures) += 1;
  };

  if (want("A1")) record("A1", "GAE oracle", gae_oracle, 1.0);
  if (want("A2")) record("A2", "gradient checks", gradient_checks, 10.0);
  if (want("A3")) record("A3", "f_jump oracle", f_jump_oracle, 1.0);
  if (want("A4")) record("A4", "curriculum state machine", curriculum_properties, 1.0);
  if (want("A9")) record("A9", "reward identity", reward_identity);
  if (want("A11")) record("A11", "determinism", [&] { return determinism(out_dir); });

  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  if (want("A5") || want("A7") || want("A10")) {
    std::optional<JumpStudy> jump;
    std::string error;
    try {
      jump = run_jump_study(seeds, out_dir);
    } catch (const std::exception& e) {
      error = e.what();
    }
    auto with_jump = [&](const std::function<Outcome(const JumpStudy&)>& fn) {
      return [&, fn] { return jump ? fn(*jump) : Outcome{false, "jump study failed: " + error}; };
    };
    if (want("A5")) record("A5", "jump speedup", with_jump(jump_speedup));
    if (want("A7"))
      record("A7", "value acceleration", with_jump([&](const JumpStudy& s) { return value_acceleration(s, out_dir); }));
    if (want("A10"))
      record("A10", "distillation", with_jump([&](const JumpStudy& s) { return distillation(s, out_dir); }));
  }

  if (want("A6") || want("A8")) {
    std::optional<FlipStudy> flip;
    std::vector<double> peaks;
    std::string error;
    try {
      flip = run_flip_study(seeds, out_dir);
    } catch (const std::exception& e) {
      error = e.what();
    }
    if (flip) {
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto& rows = flip->report.baseline_runs.empty()
                               ? std::vector<harness::MetricsRow>{}
                               : flip->report.baseline_runs[i].metrics.rows;
        double peak = 0.0;
        for (const auto& row : rows) peak = std::max(peak, row.success_rate);
        peaks.push_back(peak);
      }
    }
    if (want("A6"))
      record("A6", "flip unlearnability", [&] {
        return flip ? flip_unlearnability(*flip, peaks) : Outcome{false, "flip study failed: " + error};
      });
    if (want("A8"))
      record("A8", "ablation shape", [&] {
        const std::vector<std::uint64_t> ablation_seeds{1, 2, 3};
        return flip ? ablation_shape(*flip, ablation_seeds, out_dir) : Outcome{false, "flip study failed: " + error};
      });
  }

  std::ostringstream tail;
  tail << (failures == 0 ? "no unexpected failures" : std::to_string(failures) + " criteria failed");
  if (expected > 0) tail << "; " << expected << " expected failure(s)";
  std::cout << tail.str() << std::endl;
  report << tail.str() << '\n';
  return failures == 0 ? 0 : 1;
}
