#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

#include "bip/sim/model.hpp"
#include "bip/world/terrain.hpp"

namespace bip {

using DofVector = Eigen::Matrix<double, kNumDof, 1>;

struct SimFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Positions/velocities of both point feet from the current state.
std::array<Vector2d, kNumFeet> foot_positions(const RobotState& state,
                                              const RobotModel& model);
std::array<Vector2d, kNumFeet> foot_velocities(const RobotState& state,
                                               const RobotModel& model);

// Spring-damper penalty contact with a Coulomb friction clamp. Zero above
// the surface; the normal component is never negative.
Vector2d contact_force(const Vector2d& foot_pos, const Vector2d& foot_vel,
                       const TerrainMap& terrain, const SimConfig& cfg,
                       double friction_scale = 1.0);

// Generalized accelerations of the 5-body planar chain under the given joint
// torques, external foot forces and gravity. Entries of `locked` with value
// true are constrained to zero acceleration (test fixture hook). Throws
// SimFault if the mass matrix is numerically singular.
DofVector forward_dynamics(
    const RobotState& state, const Eigen::Vector4d& torques,
    const std::array<Vector2d, kNumFeet>& external_foot_forces,
    const RobotModel& model, double gravity,
    const std::array<bool, kNumDof>* locked = nullptr);

// Mechanical energy and momentum diagnostics (test oracles).
double total_energy(const RobotState& state, const RobotModel& model,
                    double gravity);
Vector2d linear_momentum(const RobotState& state, const RobotModel& model);
double angular_momentum(const RobotState& state, const RobotModel& model);

struct StepResultSim {
  RobotState state;
  std::array<FootState, kNumFeet> feet;
  StepInfo info;
  std::optional<std::string> fault;  // set if the state went non-finite
};

// Per-joint gain/limit scaling applied by domain randomization.
struct ActuatorScales {
  double kp = 1.0;
  double kd = 1.0;
  double torque = 1.0;  // motor strength
};

// Advances `control_decimation` semi-implicit substeps. Each substep applies
// PD torques tau = kp (a - q) - kd qd clamped to the torque limits, then
// contact and articulated dynamics. `terrain` may be null (no contact).
StepResultSim step(const RobotState& state, const Eigen::Vector4d& action,
                   const RobotModel& model, const TerrainMap* terrain,
                   const SimConfig& cfg, const ActuatorScales& scales = {},
                   double friction_scale = 1.0);

struct TerminationLimits {
  double min_height_fraction = 0.4;  // of nominal base height
  double max_pitch = 1.0;            // rad
};

std::optional<std::string> termination_check(const RobotState& state,
                                             const RobotModel& model,
                                             const TerminationLimits& limits);

}  // namespace bip
