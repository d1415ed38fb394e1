#include "efgcl/env/trace.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "efgcl/errors.hpp"

namespace efgcl::env {

TraceRecorder::TraceRecorder(int num_joints, std::vector<std::string> extra_columns)
    : num_joints_(num_joints), extra_columns_(std::move(extra_columns)) {}

void TraceRecorder::record(const EnvState& s, const std::vector<double>& extra) {
  if (s.q.size() != num_joints_) throw ConfigError("trace: joint count mismatch");
  if (extra.size() != extra_columns_.size()) throw ConfigError("trace: extra column count mismatch");
  std::vector<double> row{s.t, s.h, s.theta};
  for (int k = 0; k < num_joints_; ++k) row.push_back(s.q[k]);
  for (int k = 0; k < num_joints_; ++k) row.push_back(s.foot_contact[k]);
  row.push_back(s.trunk_contact ? 1.0 : 0.0);
  row.push_back(s.assist_applied);
  row.insert(row.end(), extra.begin(), extra.end());
  rows_.push_back(std::move(row));
}

void TraceRecorder::write_csv(std::ostream& out) const {
  out << "t,h,theta";
  for (int k = 0; k < num_joints_; ++k) out << ",q" << k;
  for (int k = 0; k < num_joints_; ++k) out << ",contact" << k;
  out << ",trunk_contact,assist_N";
  for (const auto& name : extra_columns_) out << ',' << name;
  out << '\n' << std::setprecision(9);
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void TraceRecorder::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open trace file " + path);
  write_csv(f);
}

}  // namespace efgcl::env
