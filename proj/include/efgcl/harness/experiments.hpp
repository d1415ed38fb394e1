#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "efgcl/harness/config.hpp"
#include "efgcl/harness/training.hpp"

namespace efgcl::harness {

/// Median with unreached entries (empty optionals) counted as +infinity.
/// Empty input gives nullopt.
std::optional<double> median_with_never(const std::vector<std::optional<int>>& values);

struct ArmCurve {
  std::vector<double> median, low, high;  // per iteration, over seeds (min/max band)
};

struct ComparisonReport {
  std::vector<std::uint64_t> seeds;
  std::vector<std::optional<int>> efgcl_iterations;     // to threshold, per seed
  std::vector<std::optional<int>> baseline_iterations;
  std::vector<double> efgcl_final_success, baseline_final_success;
  std::optional<double> efgcl_median, baseline_median;  // +inf: median seed never reached
  /// baseline median / EFGCL median. nullopt when undefined (no runs, or
  /// neither arm reached the threshold); +inf when only EFGCL did.
  std::optional<double> speedup;
  ArmCurve efgcl_success, baseline_success, efgcl_reward, baseline_reward;
  std::vector<RunResult> efgcl_runs, baseline_runs;

  std::string describe() const;
};

struct ComparisonOptions {
  int efgcl_budget = -1;      // iterations; < 0 uses config.iterations
  int baseline_budget = -1;
  int checkpoint_budget = 0;  // value snapshots at fractions of this (0: each arm's own budget)
  std::string out_dir;        // per-seed run directories, curves.csv, seeds.csv, curves.svg
  bool keep_runs = true;
  bool quiet = true;
};

/// EFGCL and no-assist runs for every seed.
ComparisonReport run_comparison(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                const ComparisonOptions& options = {});
void write_comparison(const std::string& dir, const ComparisonReport& report);

/// Fixed state sequence (scaled observations, one column per step) from a
/// successful deterministic episode.
struct ProbeTrajectory {
  Eigen::MatrixXd observations;
  double command = 0.0;
};

/// Deterministic episodes of `policy` with no assist, trying commands from
/// the task range until one succeeds. Throws DomainError if none does.
ProbeTrajectory record_probe(const TaskSetup& setup, const rl::GaussianPolicy& policy,
                             std::uint64_t seed, int attempts = 20);

/// Mean squared difference between two value nets over the probe states.
double probe_mse(const rl::Mlp& value, const rl::Mlp& reference, const ProbeTrajectory& probe);

struct ValueProbeReport {
  std::vector<double> fractions;
  /// [seed][fraction] MSE to the same run's final (fraction 1) values; empty
  /// entries mark missing checkpoints.
  std::vector<std::vector<std::optional<double>>> efgcl_mse, baseline_mse;
  std::string describe() const;
};

/// Per-run value-net MSE to its own final snapshot over the probe states.
std::vector<std::optional<double>> value_probe_curve(const RunResult& run, const std::vector<double>& fractions,
                                                     const ProbeTrajectory& probe);
ValueProbeReport measure_value_acceleration(const std::vector<RunResult>& efgcl_runs,
                                            const std::vector<RunResult>& baseline_runs,
                                            const ProbeTrajectory& probe,
                                            const std::vector<double>& fractions = {0.1, 0.2, 0.5, 1.0});
/// Trains both arms for every seed at the configured budget, then probes.
ValueProbeReport measure_value_acceleration(const ExperimentConfig& config,
                                            const std::vector<std::uint64_t>& seeds,
                                            const ProbeTrajectory& probe);
void write_value_probe(const std::string& path, const ValueProbeReport& report,
                       const std::vector<std::uint64_t>& seeds);

struct SweepSpec {
  std::vector<double> magnitudes;             // N
  std::vector<Eigen::Vector2d> offsets;       // body frame, m
  std::vector<curriculum::TimeWindow> windows;
  bool empty() const { return magnitudes.empty() && offsets.empty() && windows.empty(); }
};

/// Planar analogs of the backflip force-design grid: magnitudes scaled from
/// the base magnitude by 100/140/175/210/250 over 175, the base
/// point and two points nearer the centre, and the nominal and shortened windows.
SweepSpec default_flip_sweep(const AssistSettings& base);

struct AblationCell {
  std::string dimension;  // magnitude | offset | window
  std::string label;
  AssistSettings assist;
  std::vector<bool> success;  // per seed: curriculum completed within budget
  std::vector<std::optional<int>> iterations;
  double success_fraction() const;
};

struct AblationReport {
  std::vector<std::uint64_t> seeds;
  std::vector<AblationCell> cells;
  std::string describe() const;
};

/// One EFGCL run per cell and seed, each cell changing a single assist
/// dimension of the base config. Runs stop once the curriculum completes.
AblationReport run_ablation(const ExperimentConfig& config, const SweepSpec& sweep,
                            const std::vector<std::uint64_t>& seeds, bool quiet = true);
void write_ablation(const std::string& path, const AblationReport& report);

}  // namespace efgcl::harness
