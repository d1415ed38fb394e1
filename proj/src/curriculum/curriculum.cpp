#include "efgcl/curriculum/curriculum.hpp"

#include <algorithm>
#include <cmath>

#include "efgcl/errors.hpp"

namespace efgcl::curriculum {

double decay_factor(int stage, double epsilon) {
  const double alpha = std::max(0.0, 1.0 - epsilon * static_cast<double>(stage));
  return alpha < 1e-12 ? 0.0 : alpha;
}

CurriculumState curriculum_start(double epsilon, double zeta) {
  if (!(epsilon > 0.0)) throw DomainError("curriculum epsilon must be positive");
  if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("curriculum zeta must lie in (0, 1)");
  CurriculumState s;
  s.epsilon = epsilon;
  s.zeta = zeta;
  s.alpha = decay_factor(0, epsilon);
  return s;
}

int stages_to_zero(double epsilon) {
  int i = static_cast<int>(std::ceil(1.0 / epsilon)) - 1;
  while (decay_factor(i, epsilon) > 0.0) ++i;
  while (i > 0 && decay_factor(i - 1, epsilon) == 0.0) --i;
  return i;
}

CurriculumState curriculum_advance(const CurriculumState& state, double measured_success_rate) {
  if (!(measured_success_rate >= 0.0 && measured_success_rate <= 1.0)) {
    throw DomainError("success rate must lie in [0, 1]");
  }
  CurriculumState next = state;
  next.last_success_rate = measured_success_rate;
  ++next.evaluations_in_stage;
  if (state.complete || measured_success_rate < state.zeta) return next;

  if (state.alpha == 0.0) {
    next.complete = true;
    return next;
  }
  next.stage = state.stage + 1;
  next.alpha = decay_factor(next.stage, state.epsilon);
  next.evaluations_in_stage = 0;
  return next;
}

}  // namespace efgcl::curriculum
