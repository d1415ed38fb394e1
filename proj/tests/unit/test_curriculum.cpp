#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "efgcl/curriculum/assist.hpp"
#include "efgcl/curriculum/curriculum.hpp"
#include "efgcl/curriculum/success.hpp"
#include "efgcl/errors.hpp"

using namespace efgcl;
using namespace efgcl::curriculum;

TEST_CASE("decay factor follows max(0, 1 - eps i)") {
  CHECK(decay_factor(0, 0.01) == 1.0);
  CHECK(decay_factor(50, 0.01) == doctest::Approx(0.5));
  CHECK(decay_factor(100, 0.01) == 0.0);
  CHECK(decay_factor(250, 0.01) == 0.0);
  CHECK(stages_to_zero(0.01) == 100);
  CHECK(stages_to_zero(0.3) == 4);
  CHECK(stages_to_zero(0.25) == 4);
  CHECK(stages_to_zero(1.0) == 1);
}

TEST_CASE("curriculum rejects invalid parameters and rates") {
  CHECK_THROWS_AS(curriculum_start(0.0, 0.6), DomainError);
  CHECK_THROWS_AS(curriculum_start(0.01, 1.0), DomainError);
  CHECK_THROWS_AS(curriculum_start(0.01, 0.0), DomainError);
  const CurriculumState s = curriculum_start(0.01, 0.6);
  CHECK_THROWS_AS(curriculum_advance(s, 1.5), DomainError);
  CHECK_THROWS_AS(curriculum_advance(s, -0.1), DomainError);
  CHECK_THROWS_AS(curriculum_advance(s, std::nan("")), DomainError);
}

TEST_CASE("threshold boundary: exactly zeta advances, just below holds") {
  const CurriculumState s = curriculum_start(0.01, 0.6);
  CHECK(curriculum_advance(s, 0.6).stage == 1);
  CHECK(curriculum_advance(s, std::nextafter(0.6, 0.0)).stage == 0);
}

TEST_CASE("property: random success streams") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double eps = trial % 3 == 0 ? 0.01 : 0.05 + 0.3 * u(rng);
    const double zeta = 0.1 + 0.8 * u(rng);
    CurriculumState s = curriculum_start(eps, zeta);
    int qualifying = 0;
    const int needed = static_cast<int>(std::ceil(1.0 / eps - 1e-9));
    for (int k = 0; k < 400; ++k) {
      const double rate = u(rng);
      const CurriculumState next = curriculum_advance(s, rate);
      CHECK(next.alpha <= s.alpha);
      CHECK(next.alpha >= 0.0);
      CHECK(next.alpha <= 1.0);
      CHECK(next.alpha == decay_factor(next.stage, eps));
      if (rate < zeta) {
        CHECK(next.stage == s.stage);
        CHECK(next.complete == s.complete);
      } else if (!s.complete) {
        ++qualifying;
      }
      if (next.stage != s.stage) CHECK(next.evaluations_in_stage == 0);
      // alpha reaches zero after exactly ceil(1/eps) qualifying measurements.
      CHECK((next.alpha == 0.0) == (std::min(qualifying, needed) == needed));
      // Completion takes one further qualifying measurement at alpha = 0.
      CHECK(next.complete == (qualifying > needed));
      s = next;
    }
  }
}

TEST_CASE("eps = 0.01 needs one hundred decays") {
  CurriculumState s = curriculum_start(0.01, 0.6);
  for (int i = 0; i < 99; ++i) s = curriculum_advance(s, 1.0);
  CHECK(s.alpha > 0.0);
  s = curriculum_advance(s, 1.0);
  CHECK(s.alpha == 0.0);
  CHECK(!s.complete);
  s = curriculum_advance(s, 0.59);
  CHECK(!s.complete);
  s = curriculum_advance(s, 0.6);
  CHECK(s.complete);
  CHECK(s.stage == 100);
}

TEST_CASE("success checks") {
  SuccessSpec jump;
  EpisodeSummary e{0.55, 0.02, 0.0, false, false};
  CHECK(check_success(e, jump, 0.5));
  e.max_height_gain = 0.6;  // boundary is exclusive
  CHECK(!check_success(e, jump, 0.5));
  e.max_height_gain = 0.45;
  e.final_height_dev = -0.1;
  CHECK(!check_success(e, jump, 0.5));
  e.final_height_dev = 0.0;
  e.fell = true;
  CHECK(!check_success(e, jump, 0.5));
  e.fell = false;
  e.faulted = true;
  CHECK(!check_success(e, jump, 0.5));

  SuccessSpec flip;
  flip.task = Task::kFlip;
  EpisodeSummary f{0.0, 0.0, 2.0 * std::numbers::pi, false, false};
  CHECK(check_success(f, flip, 0.0));
  f.final_angle = 2.0 * std::numbers::pi - 0.29;
  CHECK(check_success(f, flip, 0.0));
  f.final_angle = 2.0 * std::numbers::pi + 0.3;
  CHECK(!check_success(f, flip, 0.0));
  // Unwrapped: a flip the wrong way or two turns are not 2 pi.
  f.final_angle = -2.0 * std::numbers::pi;
  CHECK(!check_success(f, flip, 0.0));
  f.final_angle = 4.0 * std::numbers::pi;
  CHECK(!check_success(f, flip, 0.0));
}

TEST_CASE("assist force scaling and windows") {
  const AssistPattern p = push_pattern({0.25, 0.0}, 350.0, {1.0, 1.1});
  CHECK(assist_force(p, 0.99, 1.0).empty());
  CHECK(assist_force(p, 1.1, 1.0).empty());
  const auto at = assist_force(p, 1.0, 0.4);
  REQUIRE(at.size() == 1);
  CHECK(at[0].force.y() == doctest::Approx(140.0));
  CHECK(at[0].force.x() == 0.0);
  CHECK(at[0].point.x() == 0.25);
  CHECK(assist_force(p, 1.05, 0.0).empty());
  CHECK(p.total_magnitude() == doctest::Approx(350.0));

  const AssistPattern j = jump_pattern(0.5, 18.0, 9.81, {1.0, 1.1}, 4);
  const auto four = assist_force(j, 1.05, 1.0);
  REQUIRE(four.size() == 4);
  for (const auto& f : four) CHECK(f.force.y() == doctest::Approx(f_jump(0.5, 18.0, 0.1, 9.81) / 4));
  CHECK(j.total_magnitude() == doctest::Approx(f_jump(0.5, 18.0, 0.1, 9.81)));

  AssistPattern bad = p;
  bad.windows = {{1.1, 1.0}};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
