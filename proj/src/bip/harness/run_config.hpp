#pragma once

#include <string>
#include <vector>

#include "bip/common/config.hpp"
#include "bip/policy/actor_critic.hpp"
#include "bip/rewards/rewards.hpp"
#include "bip/rl/ppo.hpp"
#include "bip/sim/sim.hpp"
#include "bip/world/world.hpp"

namespace bip {

// Everything a run needs, resolved from the sectioned config file with
// spec defaults for every field.
struct RunConfig {
  RobotModel model;
  SimConfig sim;
  TerrainConfig terrain;
  std::vector<TerrainKind> terrain_kinds;
  int terrain_variants = 8;
  int terrain_seed = 12345;

  double promote_fraction = 0.5;  // of terrain extent
  double demote_fraction = 0.4;   // of the episode time cap
  bool curriculum_enabled = true;

  CommandRanges commands;
  DomainRanges domain;
  ObservationScales obs_scales;
  NoiseScales noise;
  RewardConfig rewards;
  TerminationLimits termination;

  double spawn_x = -1.0;
  double init_joint_noise = 0.05;  // rad
  double init_vx_noise = 0.5;      // m/s
  double init_pitch_noise = 0.05;  // rad
  int episode_cap_steps = 1000;    // 10 s at 100 Hz

  NetWidths widths;
  int latent_dim = 16;
  double init_action_std = 0.3;
  LossWeights losses;
  PpoConfig ppo;

  int tracking_trials = 128;
  double tracking_duration = 10.0;
  int traversal_trials = 20;
  double traversal_command = 0.8;
  double traversal_time_cap = 15.0;
  double orientation_duration = 60.0;

  int saliency_p = 25;
  int saliency_samples = 4096;
  int saliency_episodes = 16;

  static RunConfig load(const Config& c);
  // The resolved key/value map (after load touched every key).
  static RunConfig defaults() { return load(Config()); }
};

}  // namespace bip
