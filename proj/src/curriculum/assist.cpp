#include "efgcl/curriculum/assist.hpp"

#include <cmath>

#include "efgcl/errors.hpp"

namespace efgcl::curriculum {

double f_jump(double height_gain, double mass, double push_duration, double gravity) {
  if (!(height_gain >= 0.0)) throw DomainError("f_jump: height gain must be >= 0");
  if (!(mass > 0.0)) throw DomainError("f_jump: mass must be positive");
  if (!(push_duration > 0.0)) throw DomainError("f_jump: push duration must be positive");
  if (!(gravity > 0.0)) throw DomainError("f_jump: gravity must be positive");
  const double weight = mass * gravity;
  return 0.5 * weight *
         (1.0 + std::sqrt(1.0 + 8.0 * height_gain / (gravity * push_duration * push_duration)));
}

double time_encoding(double t, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("time_encoding: lambda must be positive");
  if (!(t >= 0.0)) throw DomainError("time_encoding: t must be >= 0");
  const double s = t / lambda;
  const double s3 = s * s * s;
  return s3 / (1.0 + s3);
}

void AssistPattern::validate() const {
  for (const auto& w : windows) {
    if (!(w.start < w.end)) throw ConfigError("assist window must have start < end");
  }
  if (!(forces.size() == points.size() || forces.size() == 1)) {
    throw ConfigError("assist pattern needs one force per point or a single shared force");
  }
}

double AssistPattern::total_magnitude() const {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) total += force_at(i).norm();
  return total;
}

std::vector<AppliedForce> assist_force(const AssistPattern& pattern, double t, double alpha) {
  std::vector<AppliedForce> out;
  if (alpha == 0.0) return out;
  for (const auto& window : pattern.windows) {
    if (!window.contains(t)) continue;
    for (std::size_t i = 0; i < pattern.points.size(); ++i) {
      out.push_back({pattern.points[i], alpha * pattern.force_at(i)});
    }
  }
  return out;
}

AssistPattern jump_pattern(double h_target, double mass, double gravity, TimeWindow window,
                           int split) {
  if (split <= 0) throw ConfigError("jump pattern split must be positive");
  const double f = f_jump(h_target, mass, window.end - window.start, gravity);
  AssistPattern p;
  p.points.assign(split, Eigen::Vector2d::Zero());
  p.forces = {Eigen::Vector2d(0.0, f / split)};
  p.windows = {window};
  p.validate();
  return p;
}

AssistPattern push_pattern(const Eigen::Vector2d& offset, double magnitude, TimeWindow window) {
  AssistPattern p;
  p.points = {offset};
  p.forces = {Eigen::Vector2d(0.0, magnitude)};
  p.windows = {window};
  p.validate();
  return p;
}

}  // namespace efgcl::curriculum
