#pragma once

#include <array>

#include "bip/kernels.hpp"
#include "bip/sim/model.hpp"
#include "bip/world/world.hpp"

namespace bip {

// Stance/swing penalization coefficients per foot. Q_v is ~1 in stance
// (penalizes foot movement while in contact), Q_f is ~1 in swing (penalizes
// contact force while airborne); they sum to 1 everywhere and transitions
// are smoothed over 10% of the gait cycle.
struct GaitPhase {
  std::array<double, kNumFeet> phase;  // in [0,1)
  std::array<double, kNumFeet> q_v;
  std::array<double, kNumFeet> q_f;
};

GaitPhase gait_phase_coefficients(const Command& cmd, double t);

struct RewardConfig {
  KernelParams k_v{0.1, 1, 0.02};       // velocity tracking (Gaussian)
  KernelParams k_omega{0.1, 1, 0.02};   // pitch-rate tracking (Gaussian)
  KernelParams k_orient{0.1, 1, 0.0025};  // orientation, argument sin^2(pitch)
  KernelParams k_height{0.2, 1, 0.02};  // base height (Gaussian)
  KernelParams k_gait_vel{0.1, 1, 8.0};   // stance foot speed (Cauchy)
  KernelParams k_gait_frc{0.1, 1, 8.0};   // swing contact force (Cauchy)
  KernelParams k_impact{0.1, 3, 0.2};     // foot force rate (Cauchy)
  KernelParams k_torque{0.1, 2, 160.0};   // torque rate (Cauchy)
  KernelParams k_joint_acc{0.1, 1, 8.0};  // joint velocity rate (Cauchy)
  KernelParams k_cot{0.1, 3, 1.6};        // cost of transport (Cauchy)
  double omega_target = 0.0;   // rad/s
  double height_target = 0.62; // m
  double eps_v = 0.1;          // m/s floor for divisions by ||v||
};

inline constexpr int kNumRewardTerms = 10;
inline constexpr std::array<const char*, kNumRewardTerms> kRewardTermNames = {
    "r_v", "r_omega", "r_r", "r_h", "r_eVel",
    "r_eFrc", "r_i", "r_tau", "r_qdot", "r_CoT"};

struct RewardBreakdown {
  std::array<double, kNumRewardTerms> terms{};
  double total = 0.0;
};

// All ten terms from consecutive policy-step aggregates. Forces are
// normalized by the robot weight mg before entering their kernels.
RewardBreakdown compute_reward(const StepInfo& prev, const StepInfo& cur,
                               const RobotState& state,
                               const std::array<FootState, kNumFeet>& feet,
                               const Command& cmd, const GaitPhase& phase,
                               const RobotModel& model,
                               const RewardConfig& cfg);

}  // namespace bip
