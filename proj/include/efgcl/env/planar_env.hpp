#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "efgcl/curriculum/assist.hpp"
#include "efgcl/task.hpp"

namespace efgcl::env {

using Rng = std::mt19937_64;

enum class Actuation {
  kTorque,      // action is joint torque in N m
  kPositionPd,  // action is a joint target offset from q_stand, in units of action_scale
};

/// Rigid trunk (a box) carried by massless telescoping legs. Each leg hangs
/// from a passive pivot at its hip; its length is driven by an actuated joint
/// through a constant moment arm:  L(q) = leg_length_stand + moment_arm (q - q_stand).
/// In flight a leg points along the trunk's -y axis and its joint has rotor
/// inertia; in stance the foot is pinned and the leg transmits axial force only.
///
/// The jumper is the same model with one leg under the centre of mass and
/// the trunk restricted to vertical translation.
struct EnvConfig {
  Task task = Task::kJump;
  bool planar_rotation = false;  // false: x and pitch are locked (jumper)

  double mass = 18.0;        // kg
  double gravity = 9.81;     // m/s^2
  double inertia = 0.555;    // kg m^2 about the centre of mass
  double dt_ctrl = 0.02;     // s
  double dt_sim = 0.001;     // s
  double episode_length = 3.0;  // s

  double trunk_half_length = 0.3;   // m
  double trunk_half_height = 0.05;  // m
  std::vector<Eigen::Vector2d> hips;  // body-frame hip offsets, m
  double leg_length_stand = 0.35;     // m
  double moment_arm = 0.1;            // m of leg length per rad
  double q_stand = 0.0;               // rad, same for every joint
  double q_min = -1.5;                // rad
  double q_max = 2.5;                 // rad
  double rotor_inertia = 0.02;        // kg m^2, joint side
  double torque_limit = 80.0;         // N m
  double joint_stop_stiffness = 1000.0;  // N m / rad
  double joint_stop_damping = 20.0;      // N m s / rad
  double friction = 0.8;

  Actuation actuation = Actuation::kPositionPd;
  double kp = 150.0;          // N m / rad
  double kd = 2.0;            // N m s / rad
  double action_scale = 1.0;  // rad per unit action

  double reset_noise = 0.05;  // rad, uniform +- on each joint at reset
  double command_min = 0.4;   // jump: target height gain range, m
  double command_max = 0.8;
  double time_lambda = 1.0;   // s, time-encoding scale

  int num_joints() const { return static_cast<int>(hips.size()); }
  int substeps() const;
  /// Trunk height when standing with every leg at q_stand.
  double h_stand() const;
  double leg_length(double q) const { return leg_length_stand + moment_arm * (q - q_stand); }
  Eigen::VectorXd q_stand_vector() const {
    return Eigen::VectorXd::Constant(num_joints(), q_stand);
  }
  void validate() const;
};

EnvConfig jumper_config();
EnvConfig flipper_config();

enum class TerminationCause : std::uint8_t { kNone, kBodyContact, kTimeLimit };

struct EnvState {
  double x = 0.0, h = 0.0, theta = 0.0;  // theta is unwrapped, never reduced mod 2 pi
  double vx = 0.0, vh = 0.0, omega = 0.0;
  Eigen::VectorXd q, q_dot, prev_q_dot;
  std::vector<std::uint8_t> foot_contact;
  std::vector<double> foot_x;  // pinned foot positions while in contact
  bool trunk_contact = false;
  double t = 0.0;
  double h_max = 0.0;
  double command = 0.0;
  bool terminated = false;
  TerminationCause cause = TerminationCause::kNone;
  double assist_applied = 0.0;  // N, peak magnitude during the last step
};

struct Observation {
  Eigen::VectorXd prop;  // q, q_dot, gravity in body frame, omega, command, tau
  Eigen::VectorXd priv;  // jump: (h, h_max); flip: (h, unwrapped angle)
  Eigen::VectorXd full() const;
};

int prop_size(const EnvConfig& config);
int priv_size(const EnvConfig& config);
inline int observation_size(const EnvConfig& c) { return prop_size(c) + priv_size(c); }

/// Per-feature multipliers applied before the networks see an observation.
Eigen::VectorXd observation_scale(const EnvConfig& config);

struct StepResult {
  EnvState state;
  Observation observation;
  bool terminated = false;
  TerminationCause cause = TerminationCause::kNone;
};

/// External loads for one control step: constant forces plus an assist
/// pattern evaluated at every physics substep.
struct ExternalForces {
  std::vector<curriculum::AppliedForce> constant;
  const curriculum::AssistPattern* pattern = nullptr;
  double alpha = 0.0;
};

/// Standing pose, zero velocities, t = 0, h_max = h. Joint noise is drawn
/// from `rng` when config.reset_noise > 0 and the trunk is placed so the feet
/// touch the ground. Throws DomainError for a command outside the range.
std::pair<EnvState, Observation> env_reset(const EnvConfig& config, double command, Rng& rng);

/// Advances one control step (dt_ctrl / dt_sim substeps). Throws
/// SimulationFault if the state becomes non-finite.
StepResult env_step(const EnvConfig& config, const EnvState& state, const Eigen::VectorXd& action,
                    const ExternalForces& external = {});

Observation build_observation(const EnvState& state, const EnvConfig& config, double command,
                              double tau);

/// Heights of the four trunk corners; contact when any is <= 0.
bool trunk_touches_ground(const EnvConfig& config, double h, double theta);

/// Trunk kinetic plus potential energy (ground at h = 0).
double mechanical_energy(const EnvConfig& config, const EnvState& state);

}  // namespace efgcl::env
