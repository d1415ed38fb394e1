#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace efgcl::harness {

inline constexpr const char* kMetricsHeader =
    "iteration,reward_mean,success_rate,alpha,stage,value_loss,wall_ms";

/// One training iteration. `alpha` is the assist level the batch was collected
/// under and `stage` the curriculum stage at that time.
struct MetricsRow {
  int iteration = 0;
  double reward_mean = 0.0;   // mean undiscounted episode return
  double success_rate = 0.0;  // fraction of the batch's episodes that succeeded
  double alpha = 0.0;
  int stage = 0;
  double value_loss = 0.0;
  double wall_ms = 0.0;       // cumulative since the run started

  bool operator==(const MetricsRow&) const = default;
};

struct RunMetrics {
  std::vector<MetricsRow> rows;
  /// First iteration whose batch reached the success threshold with no assist
  /// (alpha = 0); empty when never reached.
  std::optional<int> iterations_to_threshold;
  double final_success_rate = 0.0;
  bool curriculum_complete = false;
};

/// Fills iterations_to_threshold and final_success_rate from the rows.
void summarize(RunMetrics& metrics, double zeta);

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);
/// Inverse of write_metrics_csv. Throws ParseError (line and column name) on
/// a wrong header, malformed field or out-of-order iteration.
std::vector<MetricsRow> read_metrics_csv(std::istream& in);
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

void write_summary(const std::string& path, const RunMetrics& metrics, const std::string& extra = "");

}  // namespace efgcl::harness
