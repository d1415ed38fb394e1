#include "efgcl/env/planar_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "efgcl/errors.hpp"

namespace efgcl::env {

namespace {

struct Rotation {
  double c = 1.0;
  double s = 0.0;
  explicit Rotation(double theta) : c(std::cos(theta)), s(std::sin(theta)) {}
  Eigen::Vector2d operator*(const Eigen::Vector2d& v) const {
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
  }
};

double cross(const Eigen::Vector2d& r, const Eigen::Vector2d& f) {
  return r.x() * f.y() - r.y() * f.x();
}

double joint_stop_torque(const EnvConfig& c, double q, double q_dot) {
  if (q < c.q_min) return c.joint_stop_stiffness * (c.q_min - q) - c.joint_stop_damping * q_dot;
  if (q > c.q_max) return -c.joint_stop_stiffness * (q - c.q_max) - c.joint_stop_damping * q_dot;
  return 0.0;
}

double actuator_torque(const EnvConfig& c, const Eigen::VectorXd& command, int k, double q,
                       double q_dot) {
  double tau = 0.0;
  if (c.actuation == Actuation::kTorque) {
    tau = command[k];
  } else {
    tau = c.kp * (command[k] - q) - c.kd * q_dot;
  }
  return std::clamp(tau, -c.torque_limit, c.torque_limit);
}

// Leg state of a pinned foot, read off the trunk pose.
struct StanceGeometry {
  Eigen::Vector2d axis;  // unit vector foot -> hip
  double length = 0.0;
  double length_rate = 0.0;
  bool valid = false;
};

StanceGeometry stance_geometry(const EnvConfig& c, const EnvState& s, int k) {
  const Rotation rot(s.theta);
  const Eigen::Vector2d rel = rot * c.hips[k];
  const Eigen::Vector2d hip(s.x + rel.x(), s.h + rel.y());
  const Eigen::Vector2d hip_vel(s.vx - s.omega * rel.y(), s.vh + s.omega * rel.x());
  StanceGeometry g;
  const double dx = hip.x() - s.foot_x[k];
  const double dy = hip.y();
  if (dy <= 1e-6) return g;
  g.length = std::hypot(dx, dy);
  g.axis = Eigen::Vector2d(dx, dy) / g.length;
  g.length_rate = g.axis.dot(hip_vel);
  g.valid = true;
  return g;
}

void refresh_stance_joints(const EnvConfig& c, EnvState& s) {
  for (int k = 0; k < c.num_joints(); ++k) {
    if (!s.foot_contact[k]) continue;
    const StanceGeometry g = stance_geometry(c, s, k);
    if (!g.valid) continue;
    s.q[k] = c.q_stand + (g.length - c.leg_length_stand) / c.moment_arm;
    s.q_dot[k] = g.length_rate / c.moment_arm;
  }
}

void check_finite(const EnvState& s) {
  const bool ok = std::isfinite(s.x) && std::isfinite(s.h) && std::isfinite(s.theta) &&
                  std::isfinite(s.vx) && std::isfinite(s.vh) && std::isfinite(s.omega) &&
                  s.q.allFinite() && s.q_dot.allFinite();
  if (!ok) {
    throw SimulationFault("non-finite state at t = " + std::to_string(s.t));
  }
}

// One physics substep of length dt_sim. `command` holds torques (torque
// actuation) or absolute joint targets (PD actuation).
void substep(const EnvConfig& c, EnvState& s, const Eigen::VectorXd& command,
             const ExternalForces& ext, long sim_step) {
  const double dt = c.dt_sim;
  const double t = static_cast<double>(sim_step) * dt;
  const int nj = c.num_joints();
  const Rotation rot(s.theta);

  Eigen::Vector2d force = Eigen::Vector2d::Zero();  // everything except gravity
  double moment = 0.0;
  Eigen::VectorXd joint_acc = Eigen::VectorXd::Zero(nj);

  for (int k = 0; k < nj; ++k) {
    const Eigen::Vector2d rel = rot * c.hips[k];
    if (s.foot_contact[k]) {
      const Eigen::Vector2d hip(s.x + rel.x(), s.h + rel.y());
      double dx = hip.x() - s.foot_x[k];
      const double dy = hip.y();
      if (dy <= 1e-6) {
        s.foot_contact[k] = 0;
      } else {
        if (c.planar_rotation && std::abs(dx) > c.friction * dy) {
          // Outside the friction cone the foot slides until the leg lies on it.
          dx = std::copysign(c.friction * dy, dx);
          s.foot_x[k] = hip.x() - dx;
        }
        const double length = std::hypot(dx, dy);
        const Eigen::Vector2d axis(dx / length, dy / length);
        const Eigen::Vector2d hip_vel(s.vx - s.omega * rel.y(), s.vh + s.omega * rel.x());
        const double q = c.q_stand + (length - c.leg_length_stand) / c.moment_arm;
        const double q_dot = axis.dot(hip_vel) / c.moment_arm;
        s.q[k] = q;
        s.q_dot[k] = q_dot;
        const double tau = actuator_torque(c, command, k, q, q_dot) + joint_stop_torque(c, q, q_dot);
        const double axial = tau / c.moment_arm;
        if (q > c.q_max || axial <= 0.0) {
          // Fully extended or pulling: a foot cannot hold tension, so it lifts.
          s.foot_contact[k] = 0;
        } else {
          const Eigen::Vector2d f = axial * axis;
          force += f;
          moment += cross(rel, f);
        }
      }
    }
    if (!s.foot_contact[k]) {
      const double tau =
          actuator_torque(c, command, k, s.q[k], s.q_dot[k]) + joint_stop_torque(c, s.q[k], s.q_dot[k]);
      joint_acc[k] = tau / c.rotor_inertia;
    }
  }

  if (ext.pattern != nullptr && ext.alpha != 0.0) {
    for (const auto& window : ext.pattern->windows) {
      if (!window.contains(t)) continue;
      double magnitude = 0.0;
      for (std::size_t i = 0; i < ext.pattern->points.size(); ++i) {
        const Eigen::Vector2d f = ext.alpha * ext.pattern->force_at(i);
        force += f;
        moment += cross(rot * ext.pattern->points[i], f);
        magnitude += f.norm();
      }
      s.assist_applied = std::max(s.assist_applied, magnitude);
    }
  }
  double constant_magnitude = 0.0;
  for (const auto& applied : ext.constant) {
    force += applied.force;
    moment += cross(rot * applied.point, applied.force);
    constant_magnitude += applied.force.norm();
  }
  s.assist_applied = std::max(s.assist_applied, constant_magnitude);

  // Semi-implicit Euler; the constant gravity term is integrated exactly so
  // free flight follows the true parabola.
  const double ay = force.y() / c.mass;
  s.h += (s.vh + ay * dt) * dt - 0.5 * c.gravity * dt * dt;
  s.vh += (ay - c.gravity) * dt;
  if (c.planar_rotation) {
    s.vx += force.x() / c.mass * dt;
    s.x += s.vx * dt;
    s.omega += moment / c.inertia * dt;
    s.theta += s.omega * dt;
  }
  for (int k = 0; k < nj; ++k) {
    if (s.foot_contact[k]) continue;
    s.q_dot[k] += joint_acc[k] * dt;
    s.q[k] += s.q_dot[k] * dt;
  }

  // Touchdown: the foot sticks where the leg line meets the ground (inelastic).
  const Rotation after(s.theta);
  const Eigen::Vector2d down = after * Eigen::Vector2d(0.0, -1.0);
  for (int k = 0; k < nj; ++k) {
    if (s.foot_contact[k]) continue;
    const Eigen::Vector2d rel = after * c.hips[k];
    const Eigen::Vector2d hip(s.x + rel.x(), s.h + rel.y());
    const Eigen::Vector2d foot = hip + c.leg_length(s.q[k]) * down;
    if (foot.y() > 0.0 || down.y() > -0.2 || hip.y() <= 1e-6) continue;
    const double reach = hip.y() / -down.y();
    s.foot_contact[k] = 1;
    s.foot_x[k] = hip.x() + reach * down.x();
    s.q[k] = c.q_stand + (reach - c.leg_length_stand) / c.moment_arm;
    const Eigen::Vector2d hip_vel(s.vx - s.omega * rel.y(), s.vh + s.omega * rel.x());
    s.q_dot[k] = (-down).dot(hip_vel) / c.moment_arm;
  }

  s.trunk_contact = trunk_touches_ground(c, s.h, s.theta);
  s.h_max = std::max(s.h_max, s.h);
}

}  // namespace

int EnvConfig::substeps() const {
  return static_cast<int>(std::lround(dt_ctrl / dt_sim));
}

double EnvConfig::h_stand() const {
  return hips.empty() ? leg_length_stand : -hips.front().y() + leg_length_stand;
}

void EnvConfig::validate() const {
  if (hips.empty()) throw ConfigError("env needs at least one leg");
  if (!(mass > 0 && gravity > 0 && inertia > 0)) throw ConfigError("mass, gravity and inertia must be positive");
  if (!(dt_sim > 0 && dt_ctrl > 0)) throw ConfigError("time steps must be positive");
  const double ratio = dt_ctrl / dt_sim;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0) {
    throw ConfigError("dt_sim must divide dt_ctrl");
  }
  if (!(torque_limit > 0 && moment_arm > 0 && rotor_inertia > 0 && episode_length > 0)) {
    throw ConfigError("actuator limits, moment arm, rotor inertia and episode length must be positive");
  }
  if (!(q_min < q_stand && q_stand < q_max)) throw ConfigError("q_stand must lie inside the joint limits");
  if (!(leg_length(q_min) > 0.0)) throw ConfigError("legs must keep positive length at q_min");
  if (!(command_min <= command_max)) throw ConfigError("command range is empty");
  if (!(time_lambda > 0)) throw ConfigError("time_lambda must be positive");
}

EnvConfig jumper_config() {
  EnvConfig c;
  c.task = Task::kJump;
  c.planar_rotation = false;
  c.trunk_half_length = 0.15;
  c.trunk_half_height = 0.1;
  c.hips = {Eigen::Vector2d(0.0, -0.1)};
  c.leg_length_stand = 0.3;
  c.command_min = 0.4;
  c.command_max = 0.8;
  return c;
}

EnvConfig flipper_config() {
  EnvConfig c;
  c.task = Task::kFlip;
  c.planar_rotation = true;
  c.trunk_half_length = 0.3;
  c.trunk_half_height = 0.05;
  c.inertia = c.mass * (0.6 * 0.6 + 0.1 * 0.1) / 12.0;
  c.hips = {Eigen::Vector2d(0.25, -0.05), Eigen::Vector2d(-0.25, -0.05)};
  c.leg_length_stand = 0.35;
  c.command_min = 2.0 * std::numbers::pi;
  c.command_max = 2.0 * std::numbers::pi;
  return c;
}

Eigen::VectorXd Observation::full() const {
  Eigen::VectorXd out(prop.size() + priv.size());
  out << prop, priv;
  return out;
}

int prop_size(const EnvConfig& c) { return 2 * c.num_joints() + 5; }
int priv_size(const EnvConfig&) { return 2; }

Eigen::VectorXd observation_scale(const EnvConfig& c) {
  const int nj = c.num_joints();
  Eigen::VectorXd s(observation_size(c));
  s.segment(0, nj).setConstant(1.0);        // q
  s.segment(nj, nj).setConstant(0.1);       // q_dot
  s.segment(2 * nj, 2).setConstant(1.0);    // gravity direction
  s[2 * nj + 2] = 0.1;                      // omega
  s[2 * nj + 3] = c.task == Task::kJump ? 2.0 : 1.0 / (2.0 * std::numbers::pi);  // command
  s[2 * nj + 4] = 1.0;                      // tau
  s[2 * nj + 5] = 1.0;                      // h
  s[2 * nj + 6] = c.task == Task::kJump ? 1.0 : 1.0 / (2.0 * std::numbers::pi);
  return s;
}

bool trunk_touches_ground(const EnvConfig& c, double h, double theta) {
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  for (double ax : {-c.trunk_half_length, c.trunk_half_length}) {
    for (double ay : {-c.trunk_half_height, c.trunk_half_height}) {
      if (h + sn * ax + cs * ay <= 0.0) return true;
    }
  }
  return false;
}

double mechanical_energy(const EnvConfig& c, const EnvState& s) {
  return 0.5 * c.mass * (s.vx * s.vx + s.vh * s.vh) + 0.5 * c.inertia * s.omega * s.omega +
         c.mass * c.gravity * s.h;
}

std::pair<EnvState, Observation> env_reset(const EnvConfig& config, double command, Rng& rng) {
  config.validate();
  if (!(command >= config.command_min - 1e-12 && command <= config.command_max + 1e-12)) {
    throw DomainError("command " + std::to_string(command) + " outside [" +
                      std::to_string(config.command_min) + ", " +
                      std::to_string(config.command_max) + "]");
  }
  const int nj = config.num_joints();
  EnvState s;
  s.command = command;
  s.q = config.q_stand_vector();
  if (config.reset_noise > 0.0) {
    std::uniform_real_distribution<double> noise(-config.reset_noise, config.reset_noise);
    for (int k = 0; k < nj; ++k) s.q[k] += noise(rng);
  }
  s.q_dot = Eigen::VectorXd::Zero(nj);
  s.prev_q_dot = Eigen::VectorXd::Zero(nj);
  s.foot_contact.assign(nj, 1);
  s.foot_x.assign(nj, 0.0);

  // Place the trunk so every foot, hanging along the body -y axis, is on the ground.
  if (config.planar_rotation && nj >= 2) {
    const auto& front = config.hips.front();
    const auto& back = config.hips.back();
    const double lf = config.leg_length(s.q[0]);
    const double lb = config.leg_length(s.q[nj - 1]);
    s.theta = std::atan(((lf - front.y()) - (lb - back.y())) / (front.x() - back.x()));
  }
  const Rotation rot(s.theta);
  {
    const Eigen::Vector2d foot_body(config.hips[0].x(), config.hips[0].y() - config.leg_length(s.q[0]));
    s.h = -(rot * foot_body).y();
  }
  for (int k = 0; k < nj; ++k) {
    const Eigen::Vector2d foot_body(config.hips[k].x(), config.hips[k].y() - config.leg_length(s.q[k]));
    s.foot_x[k] = s.x + (rot * foot_body).x();
  }
  s.h_max = s.h;
  s.trunk_contact = trunk_touches_ground(config, s.h, s.theta);
  const double tau = curriculum::time_encoding(0.0, config.time_lambda);
  Observation obs = build_observation(s, config, command, tau);
  return {std::move(s), std::move(obs)};
}

StepResult env_step(const EnvConfig& config, const EnvState& state, const Eigen::VectorXd& action,
                    const ExternalForces& external) {
  const int nj = config.num_joints();
  if (action.size() != nj) throw ConfigError("action length must equal the joint count");
  if (state.terminated) throw ConfigError("env_step called on a terminated episode");

  EnvState s = state;
  s.prev_q_dot = state.q_dot;
  s.assist_applied = 0.0;

  Eigen::VectorXd command(nj);
  for (int k = 0; k < nj; ++k) {
    if (config.actuation == Actuation::kTorque) {
      command[k] = std::clamp(action[k], -config.torque_limit, config.torque_limit);
    } else {
      command[k] = std::clamp(config.q_stand + config.action_scale * action[k], config.q_min,
                              config.q_max);
    }
  }

  const int n = config.substeps();
  long sim_step = std::lround(state.t / config.dt_sim);
  for (int i = 0; i < n; ++i) {
    substep(config, s, command, external, sim_step);
    ++sim_step;
    s.t = static_cast<double>(sim_step) * config.dt_sim;
    check_finite(s);
    if (s.trunk_contact) break;
  }
  refresh_stance_joints(config, s);

  StepResult out;
  if (s.trunk_contact) {
    s.terminated = true;
    s.cause = TerminationCause::kBodyContact;
  } else if (s.t >= config.episode_length - 0.5 * config.dt_sim) {
    s.terminated = true;
    s.cause = TerminationCause::kTimeLimit;
  }
  out.terminated = s.terminated;
  out.cause = s.cause;
  out.observation =
      build_observation(s, config, s.command, curriculum::time_encoding(s.t, config.time_lambda));
  out.state = std::move(s);
  return out;
}

Observation build_observation(const EnvState& s, const EnvConfig& c, double command, double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) throw DomainError("time encoding must lie in [0, 1)");
  const int nj = c.num_joints();
  Observation o;
  o.prop.resize(prop_size(c));
  o.prop.segment(0, nj) = s.q;
  o.prop.segment(nj, nj) = s.q_dot;
  // world down (0, -1) expressed in the body frame
  o.prop[2 * nj] = -std::sin(s.theta);
  o.prop[2 * nj + 1] = -std::cos(s.theta);
  o.prop[2 * nj + 2] = s.omega;
  o.prop[2 * nj + 3] = command;
  o.prop[2 * nj + 4] = tau;
  o.priv.resize(priv_size(c));
  o.priv[0] = s.h;
  o.priv[1] = c.task == Task::kJump ? s.h_max : s.theta;
  return o;
}

}  // namespace efgcl::env
