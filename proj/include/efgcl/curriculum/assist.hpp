#pragma once

#include <Eigen/Dense>

#include <vector>

namespace efgcl::curriculum {

/// Force magnitude (N) that, held for `push_duration` seconds on a mass
/// starting at rest, lifts it by `height_gain` metres at the apex:
///   f = (m g / 2) (1 + sqrt(1 + 8 l / (g dt^2))).
/// Throws DomainError unless height_gain >= 0, mass > 0, push_duration > 0, gravity > 0.
double f_jump(double height_gain, double mass, double push_duration, double gravity);

/// Bounded clock feature: s^3 / (1 + s^3) with s = t / lambda. Lies in [0, 1).
/// Throws DomainError for lambda <= 0 or t < 0.
double time_encoding(double t, double lambda);

struct TimeWindow {
  double start = 0.0;  // s, inclusive
  double end = 0.0;    // s, exclusive
  bool contains(double t) const { return t >= start && t < end; }
};

/// External guidance: where forces act (body-frame offsets from the centre of
/// mass, m), what they are (world frame, N) and when (windows, s). Either one
/// force per point or a single force shared by all points.
struct AssistPattern {
  std::vector<Eigen::Vector2d> points;
  std::vector<Eigen::Vector2d> forces;
  std::vector<TimeWindow> windows;

  void validate() const;
  const Eigen::Vector2d& force_at(std::size_t point_index) const {
    return forces.size() == 1 ? forces.front() : forces[point_index];
  }
  /// Sum of force magnitudes over points: what one active window delivers at alpha = 1.
  double total_magnitude() const;
};

struct AppliedForce {
  Eigen::Vector2d point;  // body frame
  Eigen::Vector2d force;  // world frame
};

/// Forces active at time t with the pattern scaled by alpha in [0, 1]. Every
/// window containing t contributes the full point set; alpha == 0 yields nothing.
std::vector<AppliedForce> assist_force(const AssistPattern& pattern, double t, double alpha);

/// The jump assist: vertical force f_jump(h_target) over the window, split
/// evenly across `split` coincident points at the centre of mass (the planar
/// body has a single attachment where the quadruped has four).
AssistPattern jump_pattern(double h_target, double mass, double gravity, TimeWindow window,
                           int split = 1);

/// A single upward push of `magnitude` N at body-frame `offset` over `window`.
AssistPattern push_pattern(const Eigen::Vector2d& offset, double magnitude, TimeWindow window);

}  // namespace efgcl::curriculum
