#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

namespace bip {

using Eigen::Vector2d;

// Planar point-foot biped: torso (3 DoF base: x, z, pitch) plus hip and knee
// per leg. Joint order everywhere: [left hip, left knee, right hip, right knee].
inline constexpr int kNumJoints = 4;
inline constexpr int kNumDof = 3 + kNumJoints;
inline constexpr int kNumFeet = 2;

struct RobotModel {
  double torso_mass = 10.0;      // kg
  double torso_inertia = 0.15;   // kg m^2 about torso CoM
  double torso_com_offset = 0.0; // m, CoM shift along body x from hip anchor
  double link_mass = 1.0;        // kg per thigh/shank link
  double thigh_length = 0.35;    // m
  double shank_length = 0.35;    // m
  double nominal_base_height = 0.62;  // m
  double gravity = 9.81;         // m/s^2

  Eigen::Vector4d joint_lower{-1.0, -2.4, -1.0, -2.4};  // rad
  Eigen::Vector4d joint_upper{1.5, -0.1, 1.5, -0.1};    // rad
  Eigen::Vector4d torque_limit{60.0, 60.0, 60.0, 60.0}; // N m
  Eigen::Vector4d kp{80.0, 80.0, 80.0, 80.0};           // N m / rad
  Eigen::Vector4d kd{2.0, 2.0, 2.0, 2.0};               // N m s / rad

  double total_mass() const { return torso_mass + 4.0 * link_mass; }
  double total_weight() const { return total_mass() * gravity; }  // mg, N
  double link_inertia(double length) const {  // uniform rod about its CoM
    return link_mass * length * length / 12.0;
  }
  bool valid() const {
    return torso_mass > 0 && torso_inertia > 0 && link_mass > 0 &&
           thigh_length > 0 && shank_length > 0 && nominal_base_height > 0 &&
           (kp.array() >= 0).all() && (kd.array() >= 0).all();
  }

  // Crouch pose that puts both feet straight below the base at the nominal
  // height (two-link IK, knee flexed backward).
  Eigen::Vector4d nominal_joint_q() const {
    const double l1 = thigh_length, l2 = shank_length;
    const double d =
        std::min(nominal_base_height, 0.999 * (l1 + l2));
    const double cg = (l1 * l1 + l2 * l2 - d * d) / (2.0 * l1 * l2);
    const double gamma = std::acos(std::clamp(cg, -1.0, 1.0));
    const double knee = -(M_PI - gamma);
    const double cd = (l1 * l1 + d * d - l2 * l2) / (2.0 * l1 * d);
    const double hip = std::acos(std::clamp(cd, -1.0, 1.0));
    return {hip, knee, hip, knee};
  }
};

struct RobotState {
  // Generalized coordinates: base x, z (hip anchor), pitch, then joints.
  Eigen::Matrix<double, kNumDof, 1> q = Eigen::Matrix<double, kNumDof, 1>::Zero();
  Eigen::Matrix<double, kNumDof, 1> qd = Eigen::Matrix<double, kNumDof, 1>::Zero();
  Eigen::Vector4d applied_torque = Eigen::Vector4d::Zero();  // last substep
  double base_height = 0.0;  // m above local ground
  double time = 0.0;         // s

  double base_x() const { return q[0]; }
  double base_z() const { return q[1]; }
  double pitch() const { return q[2]; }
  double base_vx() const { return qd[0]; }
  double base_vz() const { return qd[1]; }
  double pitch_rate() const { return qd[2]; }
  Eigen::Vector4d joint_q() const { return q.tail<4>(); }
  Eigen::Vector4d joint_qd() const { return qd.tail<4>(); }

  bool finite() const { return q.allFinite() && qd.allFinite(); }
};

struct FootState {
  Vector2d position = Vector2d::Zero();
  Vector2d velocity = Vector2d::Zero();
  Vector2d force = Vector2d::Zero();  // instantaneous contact force
  bool in_contact = false;

  double speed() const { return velocity.norm(); }
  double force_magnitude() const { return force.norm(); }
};

// Per-control-step aggregates for reward evaluation: substep-averaged foot
// forces and joint torques, joint velocities at the step boundary.
struct StepInfo {
  std::array<Vector2d, kNumFeet> avg_foot_force = {Vector2d::Zero(),
                                                   Vector2d::Zero()};
  Eigen::Vector4d avg_torque = Eigen::Vector4d::Zero();
  Eigen::Vector4d joint_qd = Eigen::Vector4d::Zero();
  double mech_power = 0.0;  // substep-averaged |tau . qd| contributions

  double foot_force_mag(int foot) const { return avg_foot_force[foot].norm(); }
};

struct SimConfig {
  double physics_dt = 0.001;    // s
  int control_decimation = 10;  // physics substeps per policy step (100 Hz)
  double contact_stiffness = 5.0e4;   // N/m
  double contact_damping = 300.0;     // N s/m
  double tangent_damping = 300.0;     // N s/m
  double friction = 1.0;              // Coulomb coefficient
  double gravity = 9.81;              // m/s^2; 0 disables gravity

  double policy_dt() const { return physics_dt * control_decimation; }
};

}  // namespace bip
