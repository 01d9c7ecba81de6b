#include "bip/world/world.hpp"

#include <algorithm>
#include <cmath>

#include "bip/sim/sim.hpp"

namespace bip {

Command sample_command(Rng& rng, const CommandRanges& r) {
  Command c;
  c.gait_frequency = rng.uniform(r.freq_lo, r.freq_hi);
  c.gait_duty = rng.uniform(r.duty_lo, r.duty_hi);
  c.gait_offset = rng.uniform(r.offset_lo, r.offset_hi);
  c.vx_des = rng.uniform(-r.vx_max, r.vx_max);
  return c;
}

DomainParams sample_domain_params(Rng& rng, const DomainRanges& r) {
  DomainParams p;
  if (!r.enabled) return p;
  p.base_com_offset = rng.uniform(r.com_lo, r.com_hi);
  p.payload_mass = rng.uniform(r.payload_lo, r.payload_hi);
  p.friction_rate = rng.uniform(r.friction_lo, r.friction_hi);
  p.motor_strength_factor = rng.uniform(r.motor_lo, r.motor_hi);
  p.kp_factor = rng.uniform(r.kp_lo, r.kp_hi);
  p.kd_factor = rng.uniform(r.kd_lo, r.kd_hi);
  p.latency_steps = static_cast<int>(rng.uniform_int(r.latency_max + 1));
  return p;
}

CurriculumState update_curriculum(const CurriculumState& cur,
                                  double episode_distance, double episode_time,
                                  int max_level) {
  CurriculumState next = cur;
  if (episode_distance >= cur.promote_distance)
    next.level += 1;
  else if (episode_time < cur.demote_survival_time)
    next.level -= 1;
  next.level = std::clamp(next.level, 0, max_level);
  return next;
}

VectorXd build_observation(const RobotState& state, const RobotModel& model,
                           const Eigen::Vector4d& prev_action_normalized,
                           const ObservationScales& sc) {
  VectorXd o(kObsDim);
  const double th = state.pitch();
  // World gravity direction (0, -1) expressed in the body frame.
  o[0] = -std::sin(th) * sc.gravity;
  o[1] = -std::cos(th) * sc.gravity;
  o[2] = state.pitch_rate() * sc.pitch_rate;
  const Eigen::Vector4d q_rel = state.joint_q() - model.nominal_joint_q();
  o.segment<4>(3) = q_rel * sc.joint_pos;
  o.segment<4>(7) = state.joint_qd() * sc.joint_vel;
  o.segment<4>(11) = prev_action_normalized * sc.prev_action;
  return o;
}

VectorXd add_observation_noise(const VectorXd& obs, const NoiseScales& n,
                               Rng& rng) {
  if (!n.enabled) return obs;
  VectorXd out = obs;
  auto u = [&](double s) { return rng.uniform(-s, s); };
  out[0] += u(n.gravity);
  out[1] += u(n.gravity);
  out[2] += u(n.pitch_rate);
  for (int i = 0; i < 4; ++i) out[3 + i] += u(n.joint_pos);
  for (int i = 0; i < 4; ++i) out[7 + i] += u(n.joint_vel);
  for (int i = 0; i < 4; ++i) out[11 + i] += u(n.prev_action);
  return out;
}

VectorXd normalize_command(const Command& cmd, const ObservationScales& sc) {
  VectorXd c(kCmdDim);
  c[0] = cmd.gait_frequency * sc.cmd_freq;
  c[1] = cmd.gait_duty;
  c[2] = cmd.gait_offset;
  c[3] = cmd.vx_des * sc.cmd_vx;
  return c;
}

VectorXd assemble_privileged(const RobotState& state, const RobotModel& model,
                             const TerrainMap& terrain) {
  VectorXd p(kPrivDim);
  const double th = state.pitch();
  const double c = std::cos(th), s = std::sin(th);
  // R(th)^T v: world base velocity in the body frame.
  p[0] = c * state.base_vx() + s * state.base_vz();
  p[1] = -s * state.base_vx() + c * state.base_vz();
  const double ground = terrain.height_at(state.base_x());
  p[2] = state.base_z() - ground;
  const auto feet = foot_positions(state, model);
  static constexpr double kFootOffsets[5] = {-0.2, -0.1, 0.0, 0.1, 0.2};
  int idx = 3;
  for (int f = 0; f < kNumFeet; ++f)
    for (double off : kFootOffsets)
      p[idx++] = terrain.height_at(feet[f].x() + off) - ground;
  for (int i = 0; i < 11; ++i) {
    const double off = -1.0 + 0.2 * i;
    p[idx++] = terrain.height_at(state.base_x() + off) - ground;
  }
  return p;
}

ObservationHistory::ObservationHistory(int frame_dim, int window,
                                       int max_latency)
    : frame_dim_(frame_dim), window_(window),
      capacity_(window + max_latency + 1),
      ring_(capacity_, VectorXd::Zero(frame_dim)) {}

void ObservationHistory::reset() {
  count_ = 0;
  for (auto& f : ring_) f.setZero();
}

void ObservationHistory::push(const VectorXd& frame) {
  ring_[count_ % capacity_] = frame;
  ++count_;
}

VectorXd ObservationHistory::delivered(int latency) const {
  const long k = count_ - 1 - latency;  // index of the frame `latency` ago
  if (k < 0) return VectorXd::Zero(frame_dim_);
  return ring_[k % capacity_];
}

void ObservationHistory::window_before_delivered(int latency,
                                                 Eigen::Ref<VectorXd> out) const {
  const long newest = count_ - 1 - latency;  // delivered frame index
  for (int i = 0; i < window_; ++i) {
    const long k = newest - window_ + i;
    if (k < 0)
      out.segment(i * frame_dim_, frame_dim_).setZero();
    else
      out.segment(i * frame_dim_, frame_dim_) = ring_[k % capacity_];
  }
}

}  // namespace bip
