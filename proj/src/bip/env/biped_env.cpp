#include "bip/env/biped_env.hpp"

#include <cmath>

namespace bip {

std::shared_ptr<const BipedContext> BipedContext::make(const RunConfig& cfg) {
  auto ctx = std::make_shared<BipedContext>();
  ctx->cfg = cfg;
  Rng rng(cfg.terrain_seed);
  ctx->terrains.resize(cfg.terrain_kinds.size());
  for (size_t k = 0; k < cfg.terrain_kinds.size(); ++k) {
    ctx->terrains[k].resize(cfg.terrain.max_level + 1);
    for (int lvl = 0; lvl <= cfg.terrain.max_level; ++lvl)
      for (int v = 0; v < cfg.terrain_variants; ++v)
        ctx->terrains[k][lvl].push_back(
            generate_terrain(cfg.terrain_kinds[k], lvl, rng.raw(), cfg.terrain));
  }
  return ctx;
}

VectorXd BipedEnv::action_nominal(const RobotModel& m) {
  return m.nominal_joint_q();
}

VectorXd BipedEnv::action_scale(const RobotModel& m) {
  const Eigen::Vector4d nom = m.nominal_joint_q();
  return (m.joint_upper - nom).cwiseMin(nom - m.joint_lower);
}

BipedEnv::BipedEnv(std::shared_ptr<const BipedContext> ctx, uint64_t seed,
                   int terrain_kind_index)
    : ctx_(std::move(ctx)), rng_(seed),
      kind_index_(terrain_kind_index %
                  static_cast<int>(ctx_->cfg.terrain_kinds.size())),
      history_(kObsDim, kHistoryLen, kMaxLatency) {
  const RunConfig& cfg = ctx_->cfg;
  curriculum_.level = 0;
  curriculum_.promote_distance = cfg.promote_fraction * cfg.terrain.extent;
  curriculum_.demote_survival_time =
      cfg.demote_fraction * cfg.episode_cap_steps * cfg.sim.policy_dt();
  eff_model_ = cfg.model;
  terrain_ = &ctx_->terrains[kind_index_][0][0];
}

EnvDims BipedEnv::dims() const {
  return {kObsDim, kCmdDim, kPrivDim, kEstTargetDim, kNumJoints, kHistoryLen};
}

void BipedEnv::reset() {
  const RunConfig& cfg = ctx_->cfg;

  if (have_episode_ && cfg.curriculum_enabled && !eval_mode_)
    curriculum_ = update_curriculum(curriculum_, episode_distance(),
                                    episode_time(), cfg.terrain.max_level);
  const int level = fixed_level_ ? *fixed_level_ : curriculum_.level;
  const int variant =
      static_cast<int>(rng_.uniform_int(ctx_->terrains[kind_index_][level].size()));
  terrain_ = &ctx_->terrains[kind_index_][level][variant];

  if (eval_mode_) {
    domain_ = DomainParams{};
  } else {
    domain_ = sample_domain_params(rng_, cfg.domain);
  }
  eff_model_ = cfg.model;
  eff_model_.torso_mass = cfg.model.torso_mass + domain_.payload_mass;
  eff_model_.torso_com_offset = domain_.base_com_offset;
  act_scales_ = {domain_.kp_factor, domain_.kd_factor,
                 domain_.motor_strength_factor};
  friction_scale_ = domain_.friction_rate;

  command_ = fixed_command_ ? *fixed_command_ : sample_command(rng_, cfg.commands);

  build_initial_state();
  history_.reset();
  prev_action_norm_.setZero();
  prev_info_ = StepInfo{};
  prev_info_.joint_qd = state_.joint_qd();
  episode_steps_ = 0;
  episode_t0_ = state_.time;
  episode_x0_ = state_.base_x();
  have_episode_ = true;
  last_term_.reset();
  push_observation();
}

void BipedEnv::build_initial_state() {
  const RunConfig& cfg = ctx_->cfg;
  RobotState s;
  s.time = state_.time;  // keep a monotone clock across episodes
  const Eigen::Vector4d nominal = cfg.model.nominal_joint_q();
  for (int j = 0; j < kNumJoints; ++j) {
    const double noise =
        eval_mode_ ? 0.0 : rng_.uniform(-cfg.init_joint_noise, cfg.init_joint_noise);
    s.q[3 + j] = std::clamp(nominal[j] + noise, cfg.model.joint_lower[j],
                            cfg.model.joint_upper[j]);
  }
  s.q[2] = eval_mode_ ? 0.0
                      : rng_.uniform(-cfg.init_pitch_noise, cfg.init_pitch_noise);
  s.q[0] = cfg.spawn_x;
  s.q[1] = 0.0;
  // Drop the base so the lower foot rests exactly on the terrain.
  const auto feet = foot_positions(s, eff_model_);
  double base_z = -1e9;
  for (const auto& f : feet)
    base_z = std::max(base_z, terrain_->height_at(f.x()) - f.y());
  s.q[1] = base_z;
  s.qd.setZero();
  s.qd[0] = eval_mode_ ? 0.0 : rng_.uniform(-cfg.init_vx_noise, cfg.init_vx_noise);
  s.base_height = s.q[1] - terrain_->height_at(s.q[0]);
  state_ = s;
  const auto fp = foot_positions(state_, eff_model_);
  for (int f = 0; f < kNumFeet; ++f) {
    feet_[f] = FootState{};
    feet_[f].position = fp[f];
  }
}

void BipedEnv::push_observation() {
  const RunConfig& cfg = ctx_->cfg;
  VectorXd obs =
      build_observation(state_, cfg.model, prev_action_norm_, cfg.obs_scales);
  if (!eval_mode_) obs = add_observation_noise(obs, cfg.noise, rng_);
  history_.push(obs);
}

void BipedEnv::fill_inputs(Eigen::Ref<Eigen::VectorXd> obs,
                           Eigen::Ref<Eigen::VectorXd> history,
                           Eigen::Ref<Eigen::VectorXd> priv,
                           Eigen::Ref<Eigen::VectorXd> e_target,
                           Eigen::Ref<Eigen::VectorXd> cmd) {
  const int latency = eval_mode_ ? 0 : domain_.latency_steps;
  obs = history_.delivered(latency);
  history_.window_before_delivered(latency, history);
  priv = assemble_privileged(state_, eff_model_, *terrain_);
  e_target = priv.head(kEstTargetDim);
  cmd = normalize_command(command_, ctx_->cfg.obs_scales);
}

Env::StepResult BipedEnv::step(const Eigen::VectorXd& action) {
  const RunConfig& cfg = ctx_->cfg;
  StepResult out;
  out.terms.resize(kNumRewardTerms);

  const Eigen::Vector4d a = action;
  StepResultSim sr =
      bip::step(state_, a, eff_model_, terrain_, cfg.sim, act_scales_,
                friction_scale_);
  state_ = sr.state;
  feet_ = sr.feet;

  const GaitPhase phase = gait_phase_coefficients(command_, episode_time());
  const RewardBreakdown rb = compute_reward(prev_info_, sr.info, state_, feet_,
                                            command_, phase, eff_model_,
                                            cfg.rewards);
  for (int i = 0; i < kNumRewardTerms; ++i) out.terms[i] = rb.terms[i];
  out.reward = rb.total;
  prev_info_ = sr.info;

  ++episode_steps_;
  auto term = sr.fault ? std::optional<std::string>("non_finite")
                       : termination_check(state_, cfg.model, cfg.termination);
  if (term) {
    out.terminated = true;
    out.done = true;
    last_term_ = term;
  } else if (episode_steps_ >=
             (cap_override_ ? *cap_override_ : cfg.episode_cap_steps)) {
    out.done = true;
  }

  const VectorXd nom = action_nominal(cfg.model);
  const VectorXd sc = action_scale(cfg.model);
  prev_action_norm_ =
      ((a - nom).array() / sc.array()).cwiseMax(-1.0).cwiseMin(1.0);
  push_observation();
  return out;
}

}  // namespace bip
