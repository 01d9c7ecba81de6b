#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bip/common/rng.hpp"
#include "bip/sim/model.hpp"
#include "bip/world/terrain.hpp"

namespace bip {

using Eigen::VectorXd;

// Planar observation o_t in R^15: projected gravity (2, body frame), base
// pitch rate (1), joint positions (4), joint velocities (4), previous
// action (4). Normalized per-channel.
inline constexpr int kObsDim = 15;
// Privileged state P_t in R^24: true base velocity (2, body frame), true
// base height (1), terrain heights at 5 points around each foot (10), 11
// points spanning +-1 m around the base (11). All heights relative to the
// terrain height under the base.
inline constexpr int kPrivDim = 24;
// Explicitly estimable prefix e_t: velocity (2), height (1), foot
// heightmap (10).
inline constexpr int kEstTargetDim = 13;
inline constexpr int kCmdDim = 4;
inline constexpr int kHistoryLen = 50;
inline constexpr int kMaxLatency = 2;

// Gait signal triple plus desired forward velocity.
struct Command {
  double gait_frequency = 1.5;  // Hz
  double gait_duty = 0.5;       // swing fraction of the cycle, in (0,1)
  double gait_offset = 0.5;     // phase offset between legs, in [0,1)
  double vx_des = 0.0;          // m/s, |vx_des| <= 1.2
};

struct CommandRanges {
  double vx_max = 1.2;
  double freq_lo = 1.2, freq_hi = 2.0;
  double duty_lo = 0.45, duty_hi = 0.55;
  double offset_lo = 0.5, offset_hi = 0.5;
};

Command sample_command(Rng& rng, const CommandRanges& ranges);

// Per-episode physical randomization (appendix table ranges).
struct DomainParams {
  double base_com_offset = 0.0;      // m in [-0.15, 0.15]
  double payload_mass = 0.0;         // kg in [-2.0, 12.5]
  double friction_rate = 1.0;        // [0.25, 1.25]
  double motor_strength_factor = 1.0;  // [0.8, 1.2]
  double kp_factor = 1.0;            // [0.9, 1.1]
  double kd_factor = 1.0;            // [0.9, 1.1]
  int latency_steps = 0;             // {0, 1, 2} policy steps
};

struct DomainRanges {
  bool enabled = true;
  double com_lo = -0.15, com_hi = 0.15;
  double payload_lo = -2.0, payload_hi = 12.5;
  double friction_lo = 0.25, friction_hi = 1.25;
  double motor_lo = 0.8, motor_hi = 1.2;
  double kp_lo = 0.9, kp_hi = 1.1;
  double kd_lo = 0.9, kd_hi = 1.1;
  int latency_max = 2;
};

DomainParams sample_domain_params(Rng& rng, const DomainRanges& ranges);

// Game-inspired terrain curriculum: promotion on traversal distance,
// demotion on early failure.
struct CurriculumState {
  int level = 0;
  double promote_distance = 3.0;      // m
  double demote_survival_time = 4.0;  // s
};

CurriculumState update_curriculum(const CurriculumState& cur,
                                  double episode_distance, double episode_time,
                                  int max_level);

struct ObservationScales {
  double gravity = 1.0;
  double pitch_rate = 0.25;
  double joint_pos = 1.0;
  double joint_vel = 0.05;
  double prev_action = 1.0;
  double cmd_freq = 0.5;
  double cmd_vx = 1.0;
};

// Uniform noise amplitudes applied per channel of the normalized observation.
struct NoiseScales {
  bool enabled = true;
  double gravity = 0.01;
  double pitch_rate = 0.05;
  double joint_pos = 0.01;
  double joint_vel = 0.05;
  double prev_action = 0.0;
};

// True normalized observation, no noise. prev_action_normalized is the last
// policy output mapped to [-1, 1].
VectorXd build_observation(const RobotState& state, const RobotModel& model,
                           const Eigen::Vector4d& prev_action_normalized,
                           const ObservationScales& scales);

VectorXd add_observation_noise(const VectorXd& obs, const NoiseScales& noise,
                               Rng& rng);

// Normalized command vector as fed to the policy backbone.
VectorXd normalize_command(const Command& cmd, const ObservationScales& scales);

// Ground truth, no noise, no latency.
VectorXd assemble_privileged(const RobotState& state, const RobotModel& model,
                             const TerrainMap& terrain);

// Ring of past observation frames supporting latency delivery and the
// encoder's 50-frame window. Frames older than the episode are zeros.
class ObservationHistory {
 public:
  ObservationHistory(int frame_dim, int window, int max_latency);

  void reset();
  void push(const VectorXd& frame);

  // Frame pushed `latency` pushes ago (the delivered observation).
  VectorXd delivered(int latency) const;
  // The `window` frames strictly before delivered(latency), oldest first,
  // flattened into out (size window * frame_dim).
  void window_before_delivered(int latency, Eigen::Ref<VectorXd> out) const;

  int frame_dim() const { return frame_dim_; }
  int window() const { return window_; }

 private:
  int frame_dim_;
  int window_;
  int capacity_;
  long count_ = 0;  // frames pushed since reset
  std::vector<VectorXd> ring_;
};

}  // namespace bip
