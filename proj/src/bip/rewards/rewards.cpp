#include "bip/rewards/rewards.hpp"

#include <cmath>

namespace bip {
namespace {

constexpr double kTransitionWindow = 0.1;  // fraction of the gait cycle

inline double smoothstep01(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

// Smooth indicator of the swing interval [0, duty) on the unit phase
// circle. Built from the signed distance to the interval (positive inside,
// negative outside), which is continuous across the wrap point; transitions
// span kTransitionWindow centered on each boundary.
inline double swing_indicator(double phi, double duty) {
  const double dist = phi < duty ? std::min(phi, duty - phi)
                                 : -std::min(phi - duty, 1.0 - phi);
  return smoothstep01(dist / kTransitionWindow + 0.5);
}

}  // namespace

GaitPhase gait_phase_coefficients(const Command& cmd, double t) {
  GaitPhase g{};
  for (int f = 0; f < kNumFeet; ++f) {
    const double offset = f == 0 ? 0.0 : cmd.gait_offset;
    double phi = std::fmod(cmd.gait_frequency * t + offset, 1.0);
    if (phi < 0.0) phi += 1.0;
    g.phase[f] = phi;
    g.q_f[f] = swing_indicator(phi, cmd.gait_duty);
    g.q_v[f] = 1.0 - g.q_f[f];
  }
  return g;
}

RewardBreakdown compute_reward(const StepInfo& prev, const StepInfo& cur,
                               const RobotState& state,
                               const std::array<FootState, kNumFeet>& feet,
                               const Command& cmd, const GaitPhase& phase,
                               const RobotModel& model,
                               const RewardConfig& cfg) {
  const double mg = model.total_weight();
  const Vector2d v(state.base_vx(), state.base_vz());
  const Vector2d v_des(cmd.vx_des, 0.0);
  const double speed_floor = std::max(v.norm(), cfg.eps_v);

  RewardBreakdown r;
  r.terms[0] = gaussian_kernel(cfg.k_v, (v - v_des).norm());
  r.terms[1] =
      gaussian_kernel(cfg.k_omega, std::abs(cfg.omega_target - state.pitch_rate()));
  const double sth = std::sin(state.pitch());
  r.terms[2] = gaussian_kernel(cfg.k_orient, sth * sth);
  r.terms[3] =
      gaussian_kernel(cfg.k_height, std::abs(cfg.height_target - state.base_height));

  const double stance_speed =
      phase.q_v[0] * feet[0].speed() + phase.q_v[1] * feet[1].speed();
  r.terms[4] = cauchy_kernel(cfg.k_gait_vel, stance_speed);
  const double swing_force = (phase.q_f[0] * cur.foot_force_mag(0) +
                              phase.q_f[1] * cur.foot_force_mag(1)) /
                             mg;
  r.terms[5] = cauchy_kernel(cfg.k_gait_frc, swing_force);

  Eigen::Vector4d dforce;
  dforce << cur.avg_foot_force[0] - prev.avg_foot_force[0],
      cur.avg_foot_force[1] - prev.avg_foot_force[1];
  r.terms[6] = cauchy_kernel(cfg.k_impact, dforce.norm() / mg);
  r.terms[7] = cauchy_kernel(cfg.k_torque, (cur.avg_torque - prev.avg_torque).norm());
  r.terms[8] = cauchy_kernel(cfg.k_joint_acc,
                             (cur.joint_qd - prev.joint_qd).norm() / speed_floor);
  r.terms[9] = cauchy_kernel(cfg.k_cot, cur.mech_power / (mg * speed_floor));

  r.total = 0.0;
  for (double term : r.terms) r.total += term;
  return r;
}

}  // namespace bip
