#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "efgcl/env/planar_env.hpp"

namespace efgcl::env {

/// Per-step state trace of one episode, written as CSV:
/// t,h,theta,q0..,contact0..,trunk_contact,assist_N[,extra columns]
class TraceRecorder {
 public:
  TraceRecorder(int num_joints, std::vector<std::string> extra_columns = {});

  void record(const EnvState& state, const std::vector<double>& extra = {});
  std::size_t size() const { return rows_.size(); }
  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;

 private:
  int num_joints_;
  std::vector<std::string> extra_columns_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace efgcl::env
