#include "efgcl/harness/metrics.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "efgcl/errors.hpp"

namespace efgcl::harness {

namespace {

const char* const kColumns[] = {"iteration", "reward_mean", "success_rate", "alpha",
                                "stage",     "value_loss",  "wall_ms"};

std::string num(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

template <typename T>
T field(const std::string& text, int line, int column) {
  T value{};
  const auto r = std::from_chars(text.data(), text.data() + text.size(), value);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(kColumns[column], line, "malformed value '" + text + "'");
  }
  return value;
}

}  // namespace

void summarize(RunMetrics& m, double zeta) {
  m.iterations_to_threshold.reset();
  for (const auto& row : m.rows) {
    if (row.alpha == 0.0 && row.success_rate >= zeta) {
      m.iterations_to_threshold = row.iteration;
      break;
    }
  }
  m.final_success_rate = m.rows.empty() ? 0.0 : m.rows.back().success_rate;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.iteration << ',' << num(r.reward_mean) << ',' << num(r.success_rate) << ','
        << num(r.alpha) << ',' << r.stage << ',' << num(r.value_loss) << ',' << num(r.wall_ms)
        << '\n';
  }
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  write_metrics_csv(f, rows);
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw ParseError("header", 1, "expected '" + std::string(kMetricsHeader) + "'");
  }
  std::vector<MetricsRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw ParseError("row", line_no, "expected 7 fields");
    MetricsRow r;
    r.iteration = field<int>(cells[0], line_no, 0);
    r.reward_mean = field<double>(cells[1], line_no, 1);
    r.success_rate = field<double>(cells[2], line_no, 2);
    r.alpha = field<double>(cells[3], line_no, 3);
    r.stage = field<int>(cells[4], line_no, 4);
    r.value_loss = field<double>(cells[5], line_no, 5);
    r.wall_ms = field<double>(cells[6], line_no, 6);
    if (!rows.empty() && r.iteration <= rows.back().iteration) {
      throw ParseError("iteration", line_no, "rows must be strictly ordered by iteration");
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  return read_metrics_csv(f);
}

void write_summary(const std::string& path, const RunMetrics& m, const std::string& extra) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << "iterations_run = " << m.rows.size() << '\n';
  f << "iterations_to_threshold = "
    << (m.iterations_to_threshold ? std::to_string(*m.iterations_to_threshold) : "never") << '\n';
  f << "final_success_rate = " << num(m.final_success_rate) << '\n';
  f << "final_alpha = " << (m.rows.empty() ? "n/a" : num(m.rows.back().alpha)) << '\n';
  f << "curriculum_complete = " << (m.curriculum_complete ? "yes" : "no") << '\n';
  f << extra;
}

}  // namespace efgcl::harness
