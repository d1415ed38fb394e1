// Command-line front end: train, compare, ablate, value-probe, distill.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "efgcl/distill/distill.hpp"
#include "efgcl/errors.hpp"
#include "efgcl/harness/config.hpp"
#include "efgcl/harness/experiments.hpp"
#include "efgcl/harness/svg_plot.hpp"
#include "efgcl/harness/training.hpp"

namespace fs = std::filesystem;
using namespace efgcl;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string task;
  std::string efgcl;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Config file (key = value, [sections])")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Seed (replaces the config's seed list)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--task", f.task, "Task")->check(CLI::IsMember({"jump", "flip"}));
  cmd->add_option("--efgcl", f.efgcl, "Assist curriculum")->check(CLI::IsMember({"on", "off"}));
  cmd->add_flag("--quiet", f.quiet, "Suppress per-iteration progress");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

harness::ExperimentConfig resolve(const CommonFlags& f) {
  const std::string text = f.config_path.empty() ? std::string() : read_file(f.config_path);
  harness::ExperimentConfig c;
  if (f.task.empty()) {
    c = harness::parse_config(text);
  } else {
    try {
      // Task goes first so the file's keys override the task defaults.
      c = harness::parse_config("task = " + f.task + "\n" + text);
    } catch (const ParseError& e) {
      if (e.key().find("task") == std::string::npos) throw;
      c = harness::parse_config(text);
      if (task_name(c.task) != f.task) {
        throw ConfigError("--task " + f.task + " conflicts with the config file's task");
      }
    }
  }
  if (!f.efgcl.empty()) c.efgcl = f.efgcl == "on";
  if (f.seed) c.seeds = {*f.seed};
  if (!f.out.empty()) c.out_dir = f.out;
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void write_learning_curve(const fs::path& path, const harness::RunResult& run) {
  harness::Series success{"success rate", {}, {}, {}, "#d62728"};
  harness::Series alpha{"alpha", {}, {}, {}, "#7f7f7f"};
  for (const auto& r : run.metrics.rows) {
    success.x.push_back(r.iteration);
    success.y.push_back(r.success_rate);
    alpha.x.push_back(r.iteration);
    alpha.y.push_back(r.alpha);
  }
  harness::write_svg(path.string(), {success, alpha}, "Learning curve", "iteration", "fraction");
}

int cmd_train(const CommonFlags& f, bool trace, bool svg) {
  const auto c = resolve(f);
  const std::uint64_t seed = c.seeds.front();
  harness::RunOptions o;
  o.out_dir = c.out_dir;
  o.write_trace = trace;
  o.quiet = f.quiet;
  fs::create_directories(c.out_dir);
  write_text(fs::path(c.out_dir) / "config.txt", harness::dump_config(c));
  const auto run = harness::run_training(c, seed, o);
  if (svg) write_learning_curve(fs::path(c.out_dir) / "learning_curve.svg", run);
  std::printf("final success %.3f, iterations to threshold %s, curriculum %s\n", run.metrics.final_success_rate,
              run.metrics.iterations_to_threshold ? std::to_string(*run.metrics.iterations_to_threshold).c_str()
                                                  : "never",
              run.curriculum.complete ? "complete" : "incomplete");
  return 0;
}

harness::ComparisonOptions comparison_options(const harness::ExperimentConfig& c, double factor, bool quiet) {
  harness::ComparisonOptions o;
  o.efgcl_budget = c.iterations;
  o.baseline_budget = static_cast<int>(std::ceil(factor * c.iterations));
  o.checkpoint_budget = c.iterations;
  o.out_dir = c.out_dir;
  o.quiet = quiet;
  return o;
}

int cmd_compare(const CommonFlags& f, double factor) {
  const auto c = resolve(f);
  const auto report = harness::run_comparison(c, c.seeds, comparison_options(c, factor, f.quiet));
  std::cout << report.describe();
  return 0;
}

int cmd_value_probe(const CommonFlags& f) {
  const auto c = resolve(f);
  auto opt = comparison_options(c, 1.0, f.quiet);
  const auto cmp = harness::run_comparison(c, c.seeds, opt);
  const auto setup = harness::TaskSetup::from_config(c);
  std::optional<harness::ProbeTrajectory> probe;
  for (const auto& run : cmp.efgcl_runs) {
    try {
      probe = harness::record_probe(setup, run.policy, run.seed);
      break;
    } catch (const DomainError&) {
    }
  }
  if (!probe) throw DomainError("no trained EFGCL policy produced a successful probe episode");
  const auto rep = harness::measure_value_acceleration(cmp.efgcl_runs, cmp.baseline_runs, *probe);
  harness::write_value_probe((fs::path(c.out_dir) / "value_probe.csv").string(), rep, c.seeds);
  std::cout << rep.describe();
  return 0;
}

int cmd_ablate(const CommonFlags& f) {
  const auto c = resolve(f);
  const auto sweep = harness::default_flip_sweep(c.assist);
  const auto rep = harness::run_ablation(c, sweep, c.seeds, f.quiet);
  fs::create_directories(c.out_dir);
  harness::write_ablation((fs::path(c.out_dir) / "ablation.csv").string(), rep);
  std::cout << rep.describe();
  return 0;
}

int cmd_distill(const CommonFlags& f, const std::string& teacher_path) {
  const auto c = resolve(f);
  const auto setup = harness::TaskSetup::from_config(c);
  const std::uint64_t seed = c.seeds.front();
  fs::create_directories(c.out_dir);
  harness::Teacher teacher;
  if (!teacher_path.empty()) {
    teacher = harness::teacher_from_checkpoint(harness::load_checkpoint(teacher_path));
  } else {
    harness::RunOptions o;
    o.out_dir = (fs::path(c.out_dir) / "teacher").string();
    o.quiet = f.quiet;
    const auto run = harness::run_training(c, seed, o);
    teacher = harness::teacher_from_checkpoint(harness::make_teacher_checkpoint(c, run, c.iterations));
  }
  const auto res = distill::train_student(teacher, setup, c.distill, seed, c.execution);
  harness::save_checkpoint((fs::path(c.out_dir) / "student.ckpt").string(),
                           distill::make_student_checkpoint(res.student, c.task, res.report));
  write_text(fs::path(c.out_dir) / "distill_report.txt", res.report.describe());
  std::cout << res.report.describe();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assist-force guided curriculum learning on planar robots"};
  app.require_subcommand(1);

  CommonFlags train_f, compare_f, ablate_f, probe_f, distill_f;
  bool trace = false, svg = false;
  double factor = 1.5;
  std::string teacher_path;

  auto* train = app.add_subcommand("train", "Train one policy");
  add_common(train, train_f);
  train->add_flag("--trace", trace, "Write trace.csv for a deterministic episode");
  train->add_flag("--svg", svg, "Write learning_curve.svg");

  auto* compare = app.add_subcommand("compare", "EFGCL against the no-assist baseline over seeds");
  add_common(compare, compare_f);
  compare->add_option("--baseline-factor", factor, "Baseline budget as a multiple of the EFGCL budget")
      ->check(CLI::PositiveNumber);

  auto* ablate = app.add_subcommand("ablate", "Assist magnitude, point and window sweep");
  add_common(ablate, ablate_f);

  auto* probe = app.add_subcommand("value-probe", "Value-net convergence on a fixed probe trajectory");
  add_common(probe, probe_f);

  auto* dist = app.add_subcommand("distill", "Distil a teacher into a proprioceptive student");
  add_common(dist, distill_f);
  dist->add_option("--teacher", teacher_path, "Teacher checkpoint (trained first when omitted)")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return cmd_train(train_f, trace, svg);
    if (*compare) return cmd_compare(compare_f, factor);
    if (*ablate) return cmd_ablate(ablate_f);
    if (*probe) return cmd_value_probe(probe_f);
    if (*dist) return cmd_distill(distill_f, teacher_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
