#include "bip/sim/sim.hpp"

#include <cmath>

namespace bip {
namespace {

inline Vector2d leg_dir(double phi) { return {std::sin(phi), -std::cos(phi)}; }
inline Vector2d leg_dir_d(double phi) { return {std::cos(phi), std::sin(phi)}; }

// One rigid body of the chain: CoM kinematics, its 2 x ndof Jacobian, the
// CoM acceleration at zero generalized acceleration, and the dofs its
// orientation depends on.
struct BodyKin {
  double mass = 0.0;
  double inertia = 0.0;
  Vector2d com = Vector2d::Zero();
  Eigen::Matrix<double, 2, kNumDof> jac = Eigen::Matrix<double, 2, kNumDof>::Zero();
  Vector2d bias_acc = Vector2d::Zero();
  int ang_dofs[3] = {-1, -1, -1};
  int n_ang = 0;
  double omega = 0.0;
};

struct ChainKin {
  std::array<BodyKin, 5> bodies;  // torso, L thigh, L shank, R thigh, R shank
  std::array<Vector2d, kNumFeet> foot_pos;
  std::array<Eigen::Matrix<double, 2, kNumDof>, kNumFeet> foot_jac;
  std::array<Vector2d, kNumFeet> foot_bias;
};

ChainKin chain_kinematics(const RobotState& s, const RobotModel& m) {
  ChainKin k;
  const double x = s.q[0], z = s.q[1], th = s.q[2];
  const Vector2d base(x, z);
  const double l1 = m.thigh_length, l2 = m.shank_length;

  // Torso: CoM offset c along body x from the hip anchor.
  {
    BodyKin& b = k.bodies[0];
    b.mass = m.torso_mass;
    b.inertia = m.torso_inertia;
    const double c = m.torso_com_offset;
    const Vector2d r(std::cos(th), std::sin(th));
    b.com = base + c * r;
    b.jac(0, 0) = 1.0;
    b.jac(1, 1) = 1.0;
    b.jac.col(2) = c * Vector2d(-std::sin(th), std::cos(th));
    b.bias_acc = -c * r * s.qd[2] * s.qd[2];
    b.ang_dofs[0] = 2;
    b.n_ang = 1;
    b.omega = s.qd[2];
  }

  for (int leg = 0; leg < 2; ++leg) {
    const int hip = 3 + 2 * leg;
    const int knee = hip + 1;
    const double phi1 = th + s.q[hip];
    const double phi2 = phi1 + s.q[knee];
    const double w1 = s.qd[2] + s.qd[hip];
    const double w2 = w1 + s.qd[knee];
    const Vector2d u1 = leg_dir(phi1), du1 = leg_dir_d(phi1);
    const Vector2d u2 = leg_dir(phi2), du2 = leg_dir_d(phi2);

    BodyKin& thigh = k.bodies[1 + 2 * leg];
    thigh.mass = m.link_mass;
    thigh.inertia = m.link_inertia(l1);
    thigh.com = base + 0.5 * l1 * u1;
    thigh.jac(0, 0) = 1.0;
    thigh.jac(1, 1) = 1.0;
    thigh.jac.col(2) = 0.5 * l1 * du1;
    thigh.jac.col(hip) = 0.5 * l1 * du1;
    thigh.bias_acc = -0.5 * l1 * u1 * w1 * w1;
    thigh.ang_dofs[0] = 2;
    thigh.ang_dofs[1] = hip;
    thigh.n_ang = 2;
    thigh.omega = w1;

    BodyKin& shank = k.bodies[2 + 2 * leg];
    shank.mass = m.link_mass;
    shank.inertia = m.link_inertia(l2);
    shank.com = base + l1 * u1 + 0.5 * l2 * u2;
    shank.jac(0, 0) = 1.0;
    shank.jac(1, 1) = 1.0;
    shank.jac.col(2) = l1 * du1 + 0.5 * l2 * du2;
    shank.jac.col(hip) = shank.jac.col(2);
    shank.jac.col(knee) = 0.5 * l2 * du2;
    shank.bias_acc = -l1 * u1 * w1 * w1 - 0.5 * l2 * u2 * w2 * w2;
    shank.ang_dofs[0] = 2;
    shank.ang_dofs[1] = hip;
    shank.ang_dofs[2] = knee;
    shank.n_ang = 3;
    shank.omega = w2;

    k.foot_pos[leg] = base + l1 * u1 + l2 * u2;
    auto& jf = k.foot_jac[leg];
    jf.setZero();
    jf(0, 0) = 1.0;
    jf(1, 1) = 1.0;
    jf.col(2) = l1 * du1 + l2 * du2;
    jf.col(hip) = jf.col(2);
    jf.col(knee) = l2 * du2;
    k.foot_bias[leg] = -l1 * u1 * w1 * w1 - l2 * u2 * w2 * w2;
  }
  return k;
}

}  // namespace

std::array<Vector2d, kNumFeet> foot_positions(const RobotState& state,
                                              const RobotModel& model) {
  return chain_kinematics(state, model).foot_pos;
}

std::array<Vector2d, kNumFeet> foot_velocities(const RobotState& state,
                                               const RobotModel& model) {
  const ChainKin k = chain_kinematics(state, model);
  return {Vector2d(k.foot_jac[0] * state.qd), Vector2d(k.foot_jac[1] * state.qd)};
}

Vector2d contact_force(const Vector2d& foot_pos, const Vector2d& foot_vel,
                       const TerrainMap& terrain, const SimConfig& cfg,
                       double friction_scale) {
  const double gap = terrain.height_at(foot_pos.x()) - foot_pos.y();
  const Vector2d n = terrain.normal_at(foot_pos.x());
  const double penetration = gap * n.y();  // perpendicular distance below surface
  if (penetration <= 0.0) return Vector2d::Zero();
  const double vn = foot_vel.dot(n);
  const Vector2d t(n.y(), -n.x());
  const double vt = foot_vel.dot(t);
  double normal = cfg.contact_stiffness * penetration +
                  cfg.contact_damping * std::max(0.0, -vn);
  normal = std::max(normal, 0.0);
  const double mu = cfg.friction * terrain.friction * friction_scale;
  const double tangent =
      std::clamp(-cfg.tangent_damping * vt, -mu * normal, mu * normal);
  return normal * n + tangent * t;
}

DofVector forward_dynamics(
    const RobotState& state, const Eigen::Vector4d& torques,
    const std::array<Vector2d, kNumFeet>& external_foot_forces,
    const RobotModel& model, double gravity,
    const std::array<bool, kNumDof>* locked) {
  const ChainKin k = chain_kinematics(state, model);

  Eigen::Matrix<double, kNumDof, kNumDof> M;
  M.setZero();
  DofVector rhs = DofVector::Zero();
  for (const BodyKin& b : k.bodies) {
    M.noalias() += b.mass * b.jac.transpose() * b.jac;
    for (int i = 0; i < b.n_ang; ++i)
      for (int j = 0; j < b.n_ang; ++j)
        M(b.ang_dofs[i], b.ang_dofs[j]) += b.inertia;
    rhs.noalias() -= b.mass * (b.jac.transpose() * b.bias_acc);
    rhs.noalias() +=
        b.jac.transpose() * Vector2d(0.0, -b.mass * gravity);
  }
  rhs.tail<kNumJoints>() += torques;
  for (int f = 0; f < kNumFeet; ++f)
    rhs.noalias() += k.foot_jac[f].transpose() * external_foot_forces[f];

  if (!locked) {
    Eigen::LDLT<Eigen::Matrix<double, kNumDof, kNumDof>> ldlt(M);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw SimFault("singular mass matrix");
    return ldlt.solve(rhs);
  }

  // Locked dofs are constrained to zero acceleration; solve the free block.
  std::array<int, kNumDof> free{};
  int nf = 0;
  for (int i = 0; i < kNumDof; ++i)
    if (!(*locked)[i]) free[nf++] = i;
  Eigen::MatrixXd Mf(nf, nf);
  Eigen::VectorXd rf(nf);
  for (int i = 0; i < nf; ++i) {
    rf[i] = rhs[free[i]];
    for (int j = 0; j < nf; ++j) Mf(i, j) = M(free[i], free[j]);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Mf);
  if (ldlt.info() != Eigen::Success)
    throw SimFault("singular mass matrix (reduced)");
  const Eigen::VectorXd af = ldlt.solve(rf);
  DofVector acc = DofVector::Zero();
  for (int i = 0; i < nf; ++i) acc[free[i]] = af[i];
  return acc;
}

double total_energy(const RobotState& state, const RobotModel& model,
                    double gravity) {
  const ChainKin k = chain_kinematics(state, model);
  double e = 0.0;
  for (const BodyKin& b : k.bodies) {
    const Vector2d v = b.jac * state.qd;
    e += 0.5 * b.mass * v.squaredNorm() + 0.5 * b.inertia * b.omega * b.omega;
    e += b.mass * gravity * b.com.y();
  }
  return e;
}

Vector2d linear_momentum(const RobotState& state, const RobotModel& model) {
  const ChainKin k = chain_kinematics(state, model);
  Vector2d p = Vector2d::Zero();
  for (const BodyKin& b : k.bodies) p += b.mass * (b.jac * state.qd);
  return p;
}

double angular_momentum(const RobotState& state, const RobotModel& model) {
  const ChainKin k = chain_kinematics(state, model);
  double l = 0.0;
  for (const BodyKin& b : k.bodies) {
    const Vector2d v = b.jac * state.qd;
    l += b.mass * (b.com.x() * v.y() - b.com.y() * v.x());
    l += b.inertia * b.omega;
  }
  return l;
}

StepResultSim step(const RobotState& state, const Eigen::Vector4d& action,
                   const RobotModel& model, const TerrainMap* terrain,
                   const SimConfig& cfg, const ActuatorScales& scales,
                   double friction_scale) {
  StepResultSim out;
  RobotState s = state;
  const Eigen::Vector4d target =
      action.cwiseMax(model.joint_lower).cwiseMin(model.joint_upper);
  const Eigen::Vector4d tau_max = scales.torque * model.torque_limit;

  Eigen::Vector4d tau = Eigen::Vector4d::Zero();
  const double inv_n = 1.0 / cfg.control_decimation;
  for (int sub = 0; sub < cfg.control_decimation; ++sub) {
    const Eigen::Vector4d q_j = s.q.tail<kNumJoints>();
    const Eigen::Vector4d qd_j = s.qd.tail<kNumJoints>();
    tau = (scales.kp * model.kp.array() * (target - q_j).array() -
           scales.kd * model.kd.array() * qd_j.array())
              .matrix();
    tau = tau.cwiseMax(-tau_max).cwiseMin(tau_max);

    std::array<Vector2d, kNumFeet> forces = {Vector2d::Zero(), Vector2d::Zero()};
    if (terrain) {
      const ChainKin k = chain_kinematics(s, model);
      for (int f = 0; f < kNumFeet; ++f)
        forces[f] = contact_force(k.foot_pos[f], k.foot_jac[f] * s.qd, *terrain,
                                  cfg, friction_scale);
    }
    const DofVector acc = forward_dynamics(s, tau, forces, model, cfg.gravity);
    s.qd += cfg.physics_dt * acc;
    s.q += cfg.physics_dt * s.qd;
    s.time += cfg.physics_dt;

    for (int f = 0; f < kNumFeet; ++f) out.info.avg_foot_force[f] += inv_n * forces[f];
    out.info.avg_torque += inv_n * tau;
    out.info.mech_power += inv_n * tau.dot(s.qd.tail<kNumJoints>());
    if (!s.finite()) {
      out.fault = "non-finite state";
      break;
    }
  }

  s.applied_torque = tau;
  s.base_height = s.q[1] - (terrain ? terrain->height_at(s.q[0]) : 0.0);
  out.info.joint_qd = s.qd.tail<kNumJoints>();

  const ChainKin k = chain_kinematics(s, model);
  for (int f = 0; f < kNumFeet; ++f) {
    FootState& fs = out.feet[f];
    fs.position = k.foot_pos[f];
    fs.velocity = k.foot_jac[f] * s.qd;
    fs.force = terrain ? contact_force(fs.position, fs.velocity, *terrain, cfg,
                                       friction_scale)
                       : Vector2d::Zero();
    fs.in_contact = fs.force.norm() > 0.0;
  }
  out.state = s;
  return out;
}

std::optional<std::string> termination_check(const RobotState& state,
                                             const RobotModel& model,
                                             const TerminationLimits& limits) {
  if (!state.finite()) return "non_finite";
  if (state.base_height < limits.min_height_fraction * model.nominal_base_height)
    return "height";
  if (std::abs(state.pitch()) > limits.max_pitch) return "pitch";
  return std::nullopt;
}

}  // namespace bip
