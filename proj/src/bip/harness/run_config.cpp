#include "bip/harness/run_config.hpp"

namespace bip {
namespace {

KernelParams kernel(const Config& c, const std::string& key,
                    const KernelParams& def) {
  KernelParams k;
  k.alpha = c.get_double(key + "_alpha", def.alpha);
  k.beta = c.get_int(key + "_beta", def.beta);
  k.sigma = c.get_double(key + "_sigma", def.sigma);
  return k;
}

}  // namespace

RunConfig RunConfig::load(const Config& c) {
  RunConfig r;

  r.model.torso_mass = c.get_double("model.torso_mass", 10.0);
  r.model.torso_inertia = c.get_double("model.torso_inertia", 0.15);
  r.model.link_mass = c.get_double("model.link_mass", 1.0);
  r.model.thigh_length = c.get_double("model.thigh_length", 0.35);
  r.model.shank_length = c.get_double("model.shank_length", 0.35);
  r.model.nominal_base_height = c.get_double("model.nominal_base_height", 0.62);
  r.model.gravity = c.get_double("model.gravity", 9.81);
  const double hip_lo = c.get_double("model.hip_limit_lo", -1.0);
  const double hip_hi = c.get_double("model.hip_limit_hi", 1.5);
  const double knee_lo = c.get_double("model.knee_limit_lo", -2.4);
  const double knee_hi = c.get_double("model.knee_limit_hi", -0.1);
  r.model.joint_lower << hip_lo, knee_lo, hip_lo, knee_lo;
  r.model.joint_upper << hip_hi, knee_hi, hip_hi, knee_hi;
  r.model.torque_limit.setConstant(c.get_double("model.torque_limit", 60.0));
  r.model.kp.setConstant(c.get_double("model.kp", 80.0));
  r.model.kd.setConstant(c.get_double("model.kd", 2.0));

  r.sim.physics_dt = c.get_double("sim.physics_dt", 0.001);
  r.sim.control_decimation = c.get_int("sim.control_decimation", 10);
  r.sim.contact_stiffness = c.get_double("sim.contact_stiffness", 5.0e4);
  r.sim.contact_damping = c.get_double("sim.contact_damping", 300.0);
  r.sim.tangent_damping = c.get_double("sim.tangent_damping", 300.0);
  r.sim.friction = c.get_double("sim.ground_friction", 1.0);
  r.sim.gravity = r.model.gravity;

  r.terrain.spacing = c.get_double("terrain.spacing", 0.05);
  r.terrain.x_min = c.get_double("terrain.x_min", -16.0);
  r.terrain.x_max = c.get_double("terrain.x_max", 16.0);
  r.terrain.extent = c.get_double("terrain.extent", 6.0);
  r.terrain.max_level = c.get_int("terrain.max_level", 5);
  r.terrain.max_slope_deg = c.get_double("terrain.max_slope_deg", 25.0);
  r.terrain.max_stair_rise = c.get_double("terrain.max_stair_rise", 0.10);
  r.terrain.stair_steps = c.get_int("terrain.stair_steps", 3);
  r.terrain.stair_tread = c.get_double("terrain.stair_tread", 0.30);
  r.terrain.max_rough_height = c.get_double("terrain.max_rough_height", 0.04);
  r.terrain.rough_block = c.get_double("terrain.rough_block", 0.25);
  r.terrain.friction = c.get_double("terrain.friction", 1.0);
  for (const auto& k : c.get_string_list(
           "terrain.kinds", {"flat", "rough_profiles", "slope", "stairs"}))
    r.terrain_kinds.push_back(terrain_kind_from_string(k));
  r.terrain_variants = c.get_int("terrain.variants_per_level", 8);
  r.terrain_seed = c.get_int("terrain.seed", 12345);

  r.promote_fraction = c.get_double("curriculum.promote_fraction", 0.5);
  r.demote_fraction = c.get_double("curriculum.demote_fraction", 0.4);
  r.curriculum_enabled = c.get_bool("curriculum.enabled", true);

  r.commands.vx_max = c.get_double("commands.vx_max", 1.2);
  r.commands.freq_lo = c.get_double("commands.gait_freq_lo", 1.2);
  r.commands.freq_hi = c.get_double("commands.gait_freq_hi", 2.0);
  r.commands.duty_lo = c.get_double("commands.gait_duty_lo", 0.45);
  r.commands.duty_hi = c.get_double("commands.gait_duty_hi", 0.55);
  r.commands.offset_lo = c.get_double("commands.gait_offset_lo", 0.5);
  r.commands.offset_hi = c.get_double("commands.gait_offset_hi", 0.5);

  r.domain.enabled = c.get_bool("domain_rand.enabled", true);
  r.domain.com_lo = c.get_double("domain_rand.com_offset_lo", -0.15);
  r.domain.com_hi = c.get_double("domain_rand.com_offset_hi", 0.15);
  r.domain.payload_lo = c.get_double("domain_rand.payload_lo", -2.0);
  r.domain.payload_hi = c.get_double("domain_rand.payload_hi", 12.5);
  r.domain.friction_lo = c.get_double("domain_rand.friction_rate_lo", 0.25);
  r.domain.friction_hi = c.get_double("domain_rand.friction_rate_hi", 1.25);
  r.domain.motor_lo = c.get_double("domain_rand.motor_strength_lo", 0.8);
  r.domain.motor_hi = c.get_double("domain_rand.motor_strength_hi", 1.2);
  r.domain.kp_lo = c.get_double("domain_rand.kp_factor_lo", 0.9);
  r.domain.kp_hi = c.get_double("domain_rand.kp_factor_hi", 1.1);
  r.domain.kd_lo = c.get_double("domain_rand.kd_factor_lo", 0.9);
  r.domain.kd_hi = c.get_double("domain_rand.kd_factor_hi", 1.1);
  r.domain.latency_max = c.get_int("domain_rand.latency_max", 2);

  r.obs_scales.gravity = c.get_double("observation.gravity_scale", 1.0);
  r.obs_scales.pitch_rate = c.get_double("observation.pitch_rate_scale", 0.25);
  r.obs_scales.joint_pos = c.get_double("observation.joint_pos_scale", 1.0);
  r.obs_scales.joint_vel = c.get_double("observation.joint_vel_scale", 0.05);
  r.obs_scales.prev_action = c.get_double("observation.prev_action_scale", 1.0);
  r.obs_scales.cmd_freq = c.get_double("observation.cmd_freq_scale", 0.5);
  r.obs_scales.cmd_vx = c.get_double("observation.cmd_vx_scale", 1.0);

  r.noise.enabled = c.get_bool("observation.noise_enabled", true);
  r.noise.gravity = c.get_double("observation.noise_gravity", 0.01);
  r.noise.pitch_rate = c.get_double("observation.noise_pitch_rate", 0.05);
  r.noise.joint_pos = c.get_double("observation.noise_joint_pos", 0.01);
  r.noise.joint_vel = c.get_double("observation.noise_joint_vel", 0.05);
  r.noise.prev_action = c.get_double("observation.noise_prev_action", 0.0);

  r.rewards.k_v = kernel(c, "rewards.r_v", {0.1, 1, 0.02});
  r.rewards.k_omega = kernel(c, "rewards.r_omega", {0.1, 1, 0.02});
  r.rewards.k_orient = kernel(c, "rewards.r_r", {0.1, 1, 0.0025});
  r.rewards.k_height = kernel(c, "rewards.r_h", {0.2, 1, 0.02});
  r.rewards.k_gait_vel = kernel(c, "rewards.r_eVel", {0.1, 1, 8.0});
  r.rewards.k_gait_frc = kernel(c, "rewards.r_eFrc", {0.1, 1, 8.0});
  r.rewards.k_impact = kernel(c, "rewards.r_i", {0.1, 3, 0.2});
  r.rewards.k_torque = kernel(c, "rewards.r_tau", {0.1, 2, 160.0});
  r.rewards.k_joint_acc = kernel(c, "rewards.r_qdot", {0.1, 1, 8.0});
  r.rewards.k_cot = kernel(c, "rewards.r_CoT", {0.1, 3, 1.6});
  r.rewards.omega_target = c.get_double("rewards.omega_target", 0.0);
  r.rewards.height_target =
      c.get_double("rewards.height_target", r.model.nominal_base_height);
  r.rewards.eps_v = c.get_double("rewards.eps_v", 0.1);

  r.termination.min_height_fraction =
      c.get_double("termination.min_height_fraction", 0.4);
  r.termination.max_pitch = c.get_double("termination.max_pitch", 1.0);

  r.spawn_x = c.get_double("episode.spawn_x", -1.0);
  r.init_joint_noise = c.get_double("episode.init_joint_noise", 0.05);
  r.init_vx_noise = c.get_double("episode.init_vx_noise", 0.5);
  r.init_pitch_noise = c.get_double("episode.init_pitch_noise", 0.05);
  r.episode_cap_steps = c.get_int("episode.cap_steps", 1000);

  r.widths.encoder_hidden = c.get_int_list("policy.encoder_hidden", {128, 64, 32});
  r.widths.decoder_hidden = c.get_int_list("policy.decoder_hidden", {64});
  r.widths.backbone_hidden =
      c.get_int_list("policy.backbone_hidden", {256, 128, 64});
  r.widths.critic_hidden = c.get_int_list("policy.critic_hidden", {256, 128, 64});
  r.latent_dim = c.get_int("policy.latent_dim", 16);
  r.init_action_std = c.get_double("policy.init_action_std", 0.3);

  r.losses.velocity = c.get_double("losses.velocity_coef", 1.0);
  r.losses.heightmap = c.get_double("losses.heightmap_coef", 0.5);
  r.losses.height = c.get_double("losses.height_coef", 2.0);
  r.losses.vae_beta = c.get_double("losses.vae_beta", 50.0);
  r.losses.pred = c.get_double("losses.pred_coef", 2.0);
  r.losses.value_coef = c.get_double("losses.value_coef", 1.0);
  r.losses.entropy_coef = c.get_double("losses.entropy_coef", 0.005);

  r.ppo.num_envs = c.get_int("ppo.num_envs", 256);
  r.ppo.horizon = c.get_int("ppo.horizon", 50);
  r.ppo.epochs = c.get_int("ppo.epochs", 4);
  r.ppo.minibatches = c.get_int("ppo.minibatches", 4);
  r.ppo.lr_init = c.get_double("ppo.lr_init", 5e-4);
  r.ppo.gamma = c.get_double("ppo.gamma", 0.996);
  r.ppo.lam = c.get_double("ppo.lam", 0.95);
  r.ppo.clip = c.get_double("ppo.clip", 0.2);
  r.ppo.max_grad_norm = c.get_double("ppo.max_grad_norm", 1.0);
  r.ppo.kl_target = c.get_double("ppo.kl_target", 0.01);
  r.ppo.lr_min = c.get_double("ppo.lr_min", 1e-5);
  r.ppo.lr_max = c.get_double("ppo.lr_max", 1e-3);
  r.ppo.max_updates = c.get_int("ppo.max_updates", 1500);
  r.ppo.checkpoint_every = c.get_int("ppo.checkpoint_every", 200);

  r.tracking_trials = c.get_int("eval.tracking_trials", 128);
  r.tracking_duration = c.get_double("eval.tracking_duration", 10.0);
  r.traversal_trials = c.get_int("eval.traversal_trials", 20);
  r.traversal_command = c.get_double("eval.traversal_command", 0.8);
  r.traversal_time_cap = c.get_double("eval.traversal_time_cap", 15.0);
  r.orientation_duration = c.get_double("eval.orientation_duration", 60.0);

  r.saliency_p = c.get_int("saliency.p", 25);
  r.saliency_samples = c.get_int("saliency.samples", 4096);
  r.saliency_episodes = c.get_int("saliency.episodes", 16);

  return r;
}

}  // namespace bip
