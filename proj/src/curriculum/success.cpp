#include "efgcl/curriculum/success.hpp"

namespace efgcl::curriculum {

namespace {
// Written as a two-sided bound rather than |x - c| < tol so that a value
// constructed as c - tol is rejected exactly, without rounding in x - c.
bool within(double value, double center, double tolerance) {
  return value > center - tolerance && value < center + tolerance;
}
}  // namespace

bool check_success(const EpisodeSummary& episode, const SuccessSpec& spec, double h_target) {
  if (episode.faulted || episode.fell) return false;
  const bool landed = within(episode.final_height_dev, 0.0, spec.height_tolerance);
  if (spec.task == Task::kJump) {
    return landed && within(episode.max_height_gain, h_target, spec.height_tolerance);
  }
  return landed && within(episode.final_angle, spec.target_angle, spec.angle_tolerance);
}

}  // namespace efgcl::curriculum
