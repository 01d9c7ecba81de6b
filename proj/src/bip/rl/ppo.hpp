#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bip/common/rng.hpp"
#include "bip/nn/adam.hpp"
#include "bip/policy/actor_critic.hpp"
#include "bip/rl/env.hpp"

namespace bip {

struct PpoConfig {
  int num_envs = 256;
  int horizon = 50;
  int epochs = 4;
  int minibatches = 4;
  double lr_init = 5e-4;
  double gamma = 0.996;
  double lam = 0.95;
  double clip = 0.2;
  double max_grad_norm = 1.0;
  double kl_target = 0.01;  // adaptive learning rate setpoint
  double lr_min = 1e-5;
  double lr_max = 1e-3;
  int max_updates = 1500;
  uint64_t seed = 1;
  int checkpoint_every = 200;
  bool aux_losses_enabled = true;  // estimation + reconstruction losses
};

// Fixed-capacity on-policy storage; column index = step * num_envs + env.
struct RolloutBuffer {
  int num_envs = 0, horizon = 0;
  EnvDims dims;
  MatrixXd obs, history, priv, e_target, cmd;
  MatrixXd action, action_mean_old, latent_noise;
  VectorXd logprob_old, reward, value, done;
  VectorXd logstd_old;
  MatrixXd reward_terms;
  VectorXd advantage, ret;
  VectorXd bootstrap_value;

  int size() const { return num_envs * horizon; }
  void allocate(int num_envs, int horizon, const EnvDims& dims, int latent_dim,
                int n_terms);
};

struct UpdateDiag {
  double policy_loss = 0, value_loss = 0, entropy = 0;
  double est_loss = 0, ae_loss = 0;
  double kl = 0, lr = 0, grad_norm = 0, clip_fraction = 0;
};

struct TrainDiag {
  int update = 0;
  long total_env_steps = 0;
  double mean_episode_reward = 0;  // over the last 10 completed episodes
  double mean_episode_length = 0;
  long episodes_completed = 0;
  double mean_curriculum_level = 0;
  std::vector<double> term_means;  // per reward term, averaged over buffer
  UpdateDiag opt;
};

struct TrainOutputs {
  std::string out_dir;  // metrics.jsonl, timing.csv, checkpoints/ inside
  nlohmann::json checkpoint_extra;  // merged into every checkpoint header
  // Called after every update; return false to stop training early.
  std::function<bool(const TrainDiag&)> on_update;
};

class PpoTrainer {
 public:
  PpoTrainer(ActorCritic& ac, const LossWeights& weights, const PpoConfig& cfg,
             std::vector<std::unique_ptr<Env>> envs);

  void collect_rollouts(RolloutBuffer& buf);
  UpdateDiag update(RolloutBuffer& buf);

  // Alternates collect/update for cfg.max_updates, writing the metrics
  // stream and periodic checkpoints. Returns the final checkpoint path.
  std::string train(const TrainOutputs& out);

  double r_final() const;  // mean episodic reward over last 10 episodes
  const std::deque<double>& completed_episode_returns() const {
    return episode_returns_;
  }
  ActorCritic& policy() { return ac_; }
  Rng& rng() { return rng_; }

 private:
  void gae_all(RolloutBuffer& buf);

  ActorCritic& ac_;
  LossWeights weights_;
  PpoConfig cfg_;
  std::vector<std::unique_ptr<Env>> envs_;
  Rng rng_;
  AdamState adam_;
  double lr_;
  long total_env_steps_ = 0;
  long episodes_completed_ = 0;
  std::vector<double> ep_return_, ep_length_;
  std::deque<double> episode_returns_;  // most recent completed, capped
  std::deque<double> episode_lengths_;
};

}  // namespace bip
