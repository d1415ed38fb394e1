#include "efgcl/harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "efgcl/errors.hpp"
#include "efgcl/harness/svg_plot.hpp"

namespace efgcl::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string show(const std::optional<int>& v) { return v ? std::to_string(*v) : "never"; }

std::string show(const std::optional<double>& v) {
  if (!v) return "undefined";
  if (std::isinf(*v)) return "never";
  std::ostringstream os;
  os.precision(4);
  os << *v;
  return os.str();
}

ArmCurve curve(const std::vector<RunResult>& runs, bool success) {
  ArmCurve c;
  std::size_t len = 0;
  for (const auto& r : runs) len = std::max(len, r.metrics.rows.size());
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<double> v;
    for (const auto& r : runs) {
      if (i < r.metrics.rows.size()) {
        v.push_back(success ? r.metrics.rows[i].success_rate : r.metrics.rows[i].reward_mean);
      }
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    c.median.push_back(n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]));
    c.low.push_back(v.front());
    c.high.push_back(v.back());
  }
  return c;
}

}  // namespace

std::optional<double> median_with_never(const std::vector<std::optional<int>>& values) {
  if (values.empty()) return std::nullopt;
  std::vector<double> v;
  for (const auto& x : values) v.push_back(x ? static_cast<double>(*x) : kInf);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2) return v[n / 2];
  const double a = v[n / 2 - 1], b = v[n / 2];
  return std::isinf(b) ? kInf : 0.5 * (a + b);
}

std::string ComparisonReport::describe() const {
  std::ostringstream o;
  o << "seed  efgcl_iters  baseline_iters  efgcl_final  baseline_final\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    o << seeds[i] << "  " << show(efgcl_iterations[i]) << "  " << show(baseline_iterations[i]) << "  "
      << efgcl_final_success[i] << "  " << baseline_final_success[i] << '\n';
  }
  o << "median iterations to threshold: efgcl " << show(efgcl_median) << ", baseline "
    << show(baseline_median) << '\n';
  o << "speedup (baseline / efgcl): ";
  if (!speedup) o << "undefined\n";
  else if (std::isinf(*speedup)) o << "threshold never reached by the baseline\n";
  else o << show(speedup) << '\n';
  return o.str();
}

ComparisonReport run_comparison(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                const ComparisonOptions& options) {
  ComparisonReport rep;
  rep.seeds = seeds;
  for (const bool efgcl : {true, false}) {
    ExperimentConfig c = config;
    c.efgcl = efgcl;
    const int budget = efgcl ? options.efgcl_budget : options.baseline_budget;
    if (budget >= 0) c.iterations = budget;
    for (const auto seed : seeds) {
      RunOptions ro;
      ro.quiet = options.quiet;
      ro.checkpoint_budget = options.checkpoint_budget;
      if (!options.out_dir.empty()) {
        ro.out_dir = (std::filesystem::path(options.out_dir) /
                      ((efgcl ? "efgcl_seed" : "baseline_seed") + std::to_string(seed)))
                         .string();
      }
      RunResult run = run_training(c, seed, ro);
      (efgcl ? rep.efgcl_iterations : rep.baseline_iterations).push_back(run.metrics.iterations_to_threshold);
      (efgcl ? rep.efgcl_final_success : rep.baseline_final_success).push_back(run.metrics.final_success_rate);
      (efgcl ? rep.efgcl_runs : rep.baseline_runs).push_back(std::move(run));
    }
  }
  rep.efgcl_median = median_with_never(rep.efgcl_iterations);
  rep.baseline_median = median_with_never(rep.baseline_iterations);
  if (rep.efgcl_median && rep.baseline_median && std::isfinite(*rep.efgcl_median)) {
    rep.speedup = *rep.efgcl_median > 0 ? *rep.baseline_median / *rep.efgcl_median
                                        : std::optional<double>{};
  }
  rep.efgcl_success = curve(rep.efgcl_runs, true);
  rep.baseline_success = curve(rep.baseline_runs, true);
  rep.efgcl_reward = curve(rep.efgcl_runs, false);
  rep.baseline_reward = curve(rep.baseline_runs, false);
  if (!options.out_dir.empty()) write_comparison(options.out_dir, rep);
  if (!options.keep_runs) {
    rep.efgcl_runs.clear();
    rep.baseline_runs.clear();
  }
  return rep;
}

void write_comparison(const std::string& dir, const ComparisonReport& rep) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  {
    std::ofstream f(d / "seeds.csv");
    f << "seed,efgcl_iterations_to_threshold,baseline_iterations_to_threshold,efgcl_final_success,"
         "baseline_final_success\n";
    for (std::size_t i = 0; i < rep.seeds.size(); ++i) {
      f << rep.seeds[i] << ',' << show(rep.efgcl_iterations[i]) << ',' << show(rep.baseline_iterations[i])
        << ',' << rep.efgcl_final_success[i] << ',' << rep.baseline_final_success[i] << '\n';
    }
  }
  {
    std::ofstream f(d / "curves.csv");
    f << "iteration,arm,success_median,success_min,success_max,reward_median,reward_min,reward_max\n";
    auto rows = [&](const char* arm, const ArmCurve& s, const ArmCurve& r) {
      for (std::size_t i = 0; i < s.median.size(); ++i) {
        f << i << ',' << arm << ',' << s.median[i] << ',' << s.low[i] << ',' << s.high[i] << ','
          << r.median[i] << ',' << r.low[i] << ',' << r.high[i] << '\n';
      }
    };
    rows("efgcl", rep.efgcl_success, rep.efgcl_reward);
    rows("baseline", rep.baseline_success, rep.baseline_reward);
  }
  std::ofstream(d / "report.txt") << rep.describe();
  auto series = [](const std::string& label, const ArmCurve& c, const std::string& color) {
    Series s;
    s.label = label;
    s.color = color;
    for (std::size_t i = 0; i < c.median.size(); ++i) {
      s.x.push_back(static_cast<double>(i));
      s.y.push_back(0.5 * (c.low[i] + c.high[i]));
      s.spread.push_back(0.5 * (c.high[i] - c.low[i]));
    }
    s.y = c.median;
    return s;
  };
  write_svg((d / "curves.svg").string(),
            {series("EFGCL", rep.efgcl_reward, "#d62728"), series("no assist", rep.baseline_reward, "#1f77b4")},
            "Mean episode reward (median, min-max band)", "iteration", "reward");
}

ProbeTrajectory record_probe(const TaskSetup& setup, const rl::GaussianPolicy& policy, std::uint64_t seed,
                             int attempts) {
  env::Rng rng = derive_rng(seed, 4);
  const Controller ctl = mean_controller(policy, setup.obs_scale);
  for (int a = 0; a < attempts; ++a) {
    // Mid-range command first, then spread across the range.
    const double u = a == 0 ? 0.5 : static_cast<double>(a % 10) / 9.0;
    const double command = setup.env.command_min + u * (setup.env.command_max - setup.env.command_min);
    std::vector<env::Observation> obs;
    if (!run_episode(setup, ctl, command, rng, 0.0, nullptr, &obs).success) continue;
    ProbeTrajectory p;
    p.command = command;
    p.observations.resize(setup.obs_dim(), static_cast<Eigen::Index>(obs.size()));
    for (std::size_t i = 0; i < obs.size(); ++i) p.observations.col(i) = obs[i].full().cwiseProduct(setup.obs_scale);
    return p;
  }
  throw DomainError("no successful probe episode in " + std::to_string(attempts) + " attempts");
}

double probe_mse(const rl::Mlp& value, const rl::Mlp& reference, const ProbeTrajectory& probe) {
  if (probe.observations.cols() == 0) throw DomainError("empty probe trajectory");
  const Eigen::MatrixXd d = value.forward(probe.observations) - reference.forward(probe.observations);
  return d.squaredNorm() / static_cast<double>(d.size());
}

std::vector<std::optional<double>> value_probe_curve(const RunResult& run, const std::vector<double>& fractions,
                                                     const ProbeTrajectory& probe) {
  auto find = [&](double f) -> const ValueSnapshot* {
    for (const auto& s : run.snapshots) {
      if (std::abs(s.fraction - f) < 1e-9) return &s;
    }
    return nullptr;
  };
  std::vector<std::optional<double>> out(fractions.size());
  const ValueSnapshot* final_snap = find(1.0);
  if (!final_snap) return out;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (const ValueSnapshot* s = find(fractions[i])) out[i] = probe_mse(s->value, final_snap->value, probe);
  }
  return out;
}

ValueProbeReport measure_value_acceleration(const std::vector<RunResult>& efgcl_runs,
                                            const std::vector<RunResult>& baseline_runs,
                                            const ProbeTrajectory& probe, const std::vector<double>& fractions) {
  ValueProbeReport rep;
  rep.fractions = fractions;
  for (const auto& r : efgcl_runs) rep.efgcl_mse.push_back(value_probe_curve(r, fractions, probe));
  for (const auto& r : baseline_runs) rep.baseline_mse.push_back(value_probe_curve(r, fractions, probe));
  return rep;
}

ValueProbeReport measure_value_acceleration(const ExperimentConfig& config,
                                            const std::vector<std::uint64_t>& seeds,
                                            const ProbeTrajectory& probe) {
  ComparisonOptions opt;
  const ComparisonReport cmp = run_comparison(config, seeds, opt);
  return measure_value_acceleration(cmp.efgcl_runs, cmp.baseline_runs, probe);
}

std::string ValueProbeReport::describe() const {
  std::ostringstream o;
  o << "arm       seed";
  for (double f : fractions) o << "  mse@" << f * 100 << "%";
  o << '\n';
  auto arm = [&](const char* name, const std::vector<std::vector<std::optional<double>>>& m) {
    for (std::size_t s = 0; s < m.size(); ++s) {
      o << name << "  #" << s;
      for (const auto& v : m[s]) o << "  " << (v ? show(v) : std::string("gap"));
      o << '\n';
    }
  };
  arm("efgcl   ", efgcl_mse);
  arm("baseline", baseline_mse);
  return o.str();
}

void write_value_probe(const std::string& path, const ValueProbeReport& rep,
                       const std::vector<std::uint64_t>& seeds) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << "arm,seed,fraction,mse\n";
  auto arm = [&](const char* name, const std::vector<std::vector<std::optional<double>>>& m) {
    for (std::size_t s = 0; s < m.size(); ++s) {
      for (std::size_t i = 0; i < rep.fractions.size(); ++i) {
        f << name << ',' << (s < seeds.size() ? seeds[s] : s) << ',' << rep.fractions[i] << ','
          << (m[s][i] ? std::to_string(*m[s][i]) : std::string("gap")) << '\n';
      }
    }
  };
  arm("efgcl", rep.efgcl_mse);
  arm("baseline", rep.baseline_mse);
}

SweepSpec default_flip_sweep(const AssistSettings& base) {
  SweepSpec s;
  for (double r : {100.0, 140.0, 175.0, 210.0, 250.0}) s.magnitudes.push_back(base.magnitude * r / 175.0);
  for (double k : {1.0, 0.6, 0.2}) s.offsets.emplace_back(base.offset.x() * k, base.offset.y());
  s.windows.push_back(base.window);
  s.windows.push_back({base.window.start, base.window.start + 0.05});
  return s;
}

double AblationCell::success_fraction() const {
  if (success.empty()) return 0.0;
  return static_cast<double>(std::count(success.begin(), success.end(), true)) /
         static_cast<double>(success.size());
}

AblationReport run_ablation(const ExperimentConfig& config, const SweepSpec& sweep,
                            const std::vector<std::uint64_t>& seeds, bool quiet) {
  AblationReport rep;
  rep.seeds = seeds;
  auto add = [&](const std::string& dim, const std::string& label, AssistSettings a) {
    AblationCell cell{dim, label, a, {}, {}};
    ExperimentConfig c = config;
    c.efgcl = true;
    c.assist = a;
    c.curriculum.stop_on_completion = true;
    c.curriculum.confirm_iterations = 0;
    for (const auto seed : seeds) {
      RunOptions ro;
      ro.quiet = quiet;
      ro.checkpoint_fractions.clear();
      const RunResult run = run_training(c, seed, ro);
      cell.success.push_back(run.curriculum.complete);
      cell.iterations.push_back(run.metrics.iterations_to_threshold);
    }
    rep.cells.push_back(std::move(cell));
  };
  for (double m : sweep.magnitudes) {
    AssistSettings a = config.assist;
    a.magnitude = m;
    std::ostringstream l;
    l << m << " N";
    add("magnitude", l.str(), a);
  }
  for (const auto& p : sweep.offsets) {
    AssistSettings a = config.assist;
    a.offset = p;
    std::ostringstream l;
    l << "(" << p.x() << " " << p.y() << ") m";
    add("offset", l.str(), a);
  }
  for (const auto& w : sweep.windows) {
    AssistSettings a = config.assist;
    a.window = w;
    std::ostringstream l;
    l << "(" << w.start << " " << w.end << ") s";
    add("window", l.str(), a);
  }
  return rep;
}

std::string AblationReport::describe() const {
  std::ostringstream o;
  for (const auto& c : cells) {
    o << c.dimension << ' ' << c.label << ": success " << c.success_fraction() * 100 << "% (";
    for (std::size_t i = 0; i < c.iterations.size(); ++i) o << (i ? " " : "") << show(c.iterations[i]);
    o << ")\n";
  }
  return o.str();
}

void write_ablation(const std::string& path, const AblationReport& rep) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << "dimension,value,seed,success,iterations_to_threshold\n";
  for (const auto& c : rep.cells) {
    for (std::size_t i = 0; i < rep.seeds.size() && i < c.success.size(); ++i) {
      f << c.dimension << ',' << c.label << ',' << rep.seeds[i] << ',' << (c.success[i] ? 1 : 0) << ','
        << show(c.iterations[i]) << '\n';
    }
  }
}

}  // namespace efgcl::harness
