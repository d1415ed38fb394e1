#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "efgcl/task.hpp"

namespace efgcl::reward {

/// Shared reward structure. Tasks differ only in the target variable: which
/// quantity x_t is (selected by `task`), its target and its normalisation s_x.
/// Weights, functional forms and penalties are common. The standing pose is a
/// property of the body, so it travels with the inputs instead.
struct RewardConfig {
  Task task = Task::kJump;
  double x_target = 0.5;       // m (jump height gain) or rad (flip angle)
  double s_x = 0.01;           // m^2 or rad^2
  double lambda_omega = 0.1;   // project choice: subdominant to rho_task
  double stand_height_scale = 0.01;  // m^2, rho_stand height term
  double stand_joint_scale = 0.25;   // rad^2, rho_stand joint term
  double collision_coef = -1.0;      // per non-foot body in contact
  double termination_coef = -100.0;
  double joint_velocity_coef = -5e-4;
  double joint_acceleration_coef = -1e-7;
};

RewardConfig jump_reward_config(double h_target);
RewardConfig flip_reward_config();

/// Names of the RewardConfig fields whose values differ ("task" stands for
/// the choice of x_t).
std::vector<std::string> differing_fields(const RewardConfig& a, const RewardConfig& b);

struct RewardInputs {
  double x = 0.0;              // task variable
  double height_dev = 0.0;     // h - h_stand, m
  Eigen::VectorXd q;
  Eigen::VectorXd q_stand;
  Eigen::VectorXd q_dot;
  Eigen::VectorXd q_ddot;      // (q_dot_t - q_dot_{t-1}) / dt_ctrl
  Eigen::VectorXd omega_non_target;  // empty for the planar tasks
  int body_contacts = 0;       // non-foot bodies touching the ground
  bool terminated = false;
};

struct RewardBreakdown {
  double task = 0.0;       // rho_task
  double stand = 0.0;      // rho_stand
  double angular = 0.0;    // lambda_omega * r_ang
  double collision = 0.0;
  double termination = 0.0;
  double joint_velocity = 0.0;
  double joint_acceleration = 0.0;
  double total = 0.0;      // rho_task + rho_task*rho_stand + angular + common
};

/// exp(-(x - x_target)^2 / s_x). Throws DomainError for s_x <= 0.
double rho_task(double x, double x_target, double s_x);

/// exp(-h_dev^2 / 0.01) + exp(-|q - q_stand|^2 / 0.25) with the default scales.
double rho_stand(double height_dev, const Eigen::VectorXd& q, const Eigen::VectorXd& q_stand,
                 double height_scale = 0.01, double joint_scale = 0.25);

RewardBreakdown reward_terms(const RewardInputs& inputs, const RewardConfig& config);

inline double total_reward(const RewardInputs& inputs, const RewardConfig& config) {
  return reward_terms(inputs, config).total;
}

}  // namespace efgcl::reward
