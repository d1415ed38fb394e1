#pragma once

#include <numbers>

#include "efgcl/task.hpp"

namespace efgcl::curriculum {

struct SuccessSpec {
  Task task = Task::kJump;
  double height_tolerance = 0.1;  // m
  double angle_tolerance = 0.3;   // rad
  double target_angle = 2.0 * std::numbers::pi;
};

/// What the success test needs from a finished episode. Heights are
/// deviations from the standing height.
struct EpisodeSummary {
  double max_height_gain = 0.0;     // h_max - h_stand
  double final_height_dev = 0.0;    // h_final - h_stand
  double final_angle = 0.0;         // unwrapped pitch, rad
  bool faulted = false;             // simulation fault: always a failure
  bool fell = false;                // ended by trunk-ground contact: always a failure
};

/// jump: |gain - h_target| < tol_h and |final dev| < tol_h
/// flip: |angle - target| < tol_a and |final dev| < tol_h  (strict inequalities)
bool check_success(const EpisodeSummary& episode, const SuccessSpec& spec, double h_target);

}  // namespace efgcl::curriculum
