#pragma once

namespace efgcl::curriculum {

/// Stage machine of the success-gated assist decay.
///
/// Training at stage i runs under alpha_i = max(0, 1 - epsilon * i) times the
/// full assist. Every measured success rate >= zeta moves to the next stage;
/// lower rates keep the stage. Once alpha is 0, one more qualifying
/// measurement marks the curriculum complete. The learner is never reset
/// between stages.
struct CurriculumState {
  int stage = 0;
  double alpha = 1.0;
  double epsilon = 0.01;
  double zeta = 0.6;
  // Statistics of the current stage; cleared whenever the stage advances.
  int evaluations_in_stage = 0;
  double last_success_rate = 0.0;
  bool complete = false;
};

/// alpha for a stage index, clamped at 0. Rounding residue below 1e-12 is
/// snapped to exactly 0 so that ceil(1/epsilon) stages always reach it.
double decay_factor(int stage, double epsilon);

/// Fresh state at stage 0 (alpha = 1). Throws DomainError unless
/// epsilon > 0 and 0 < zeta < 1.
CurriculumState curriculum_start(double epsilon, double zeta);

/// Number of qualifying measurements needed to bring alpha to 0.
int stages_to_zero(double epsilon);

/// Folds one measured success rate (in [0, 1]) into the state.
CurriculumState curriculum_advance(const CurriculumState& state, double measured_success_rate);

}  // namespace efgcl::curriculum
