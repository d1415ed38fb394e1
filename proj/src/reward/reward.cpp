#include "efgcl/reward/reward.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "efgcl/errors.hpp"

namespace efgcl::reward {

RewardConfig jump_reward_config(double h_target) {
  RewardConfig c;
  c.task = Task::kJump;
  c.x_target = h_target;
  c.s_x = 0.01;
  return c;
}

RewardConfig flip_reward_config() {
  RewardConfig c;
  c.task = Task::kFlip;
  c.x_target = 2.0 * std::numbers::pi;
  c.s_x = std::numbers::pi * std::numbers::pi;
  return c;
}

std::vector<std::string> differing_fields(const RewardConfig& a, const RewardConfig& b) {
  // Every field of RewardConfig; extend together with the struct.
  const std::pair<const char*, double RewardConfig::*> numeric[] = {
      {"x_target", &RewardConfig::x_target},
      {"s_x", &RewardConfig::s_x},
      {"lambda_omega", &RewardConfig::lambda_omega},
      {"stand_height_scale", &RewardConfig::stand_height_scale},
      {"stand_joint_scale", &RewardConfig::stand_joint_scale},
      {"collision_coef", &RewardConfig::collision_coef},
      {"termination_coef", &RewardConfig::termination_coef},
      {"joint_velocity_coef", &RewardConfig::joint_velocity_coef},
      {"joint_acceleration_coef", &RewardConfig::joint_acceleration_coef},
  };
  // Task (padded) plus nine doubles.
  static_assert(sizeof(RewardConfig) == 10 * sizeof(double),
                "RewardConfig gained a field that differing_fields does not compare");
  std::vector<std::string> out;
  if (a.task != b.task) out.emplace_back("task");
  for (const auto& [name, field] : numeric) {
    if (a.*field != b.*field) out.emplace_back(name);
  }
  return out;
}

double rho_task(double x, double x_target, double s_x) {
  if (!(s_x > 0.0)) throw DomainError("rho_task: s_x must be positive");
  const double d = x - x_target;
  return std::exp(-d * d / s_x);
}

double rho_stand(double height_dev, const Eigen::VectorXd& q, const Eigen::VectorXd& q_stand,
                 double height_scale, double joint_scale) {
  if (q.size() != q_stand.size()) throw ConfigError("rho_stand: q and q_stand lengths differ");
  return std::exp(-height_dev * height_dev / height_scale) +
         std::exp(-(q - q_stand).squaredNorm() / joint_scale);
}

RewardBreakdown reward_terms(const RewardInputs& in, const RewardConfig& c) {
  RewardBreakdown r;
  r.task = rho_task(in.x, c.x_target, c.s_x);
  r.stand = rho_stand(in.height_dev, in.q, in.q_stand, c.stand_height_scale, c.stand_joint_scale);
  // r_ang = -|| (omega_non_target)^2 ||, squares taken elementwise
  r.angular = in.omega_non_target.size() == 0
                  ? 0.0
                  : -c.lambda_omega * in.omega_non_target.array().square().matrix().norm();
  r.collision = c.collision_coef * static_cast<double>(in.body_contacts);
  r.termination = in.terminated ? c.termination_coef : 0.0;
  r.joint_velocity = in.q_dot.size() ? c.joint_velocity_coef * in.q_dot.squaredNorm() : 0.0;
  r.joint_acceleration =
      in.q_ddot.size() ? c.joint_acceleration_coef * in.q_ddot.squaredNorm() : 0.0;
  r.total = r.task + r.task * r.stand + r.angular + r.collision + r.termination +
            r.joint_velocity + r.joint_acceleration;
  return r;
}

}  // namespace efgcl::reward
