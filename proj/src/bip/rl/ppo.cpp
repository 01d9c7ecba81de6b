#include "bip/rl/ppo.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "bip/rl/gae.hpp"

namespace bip {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr int kEpisodeWindow = 10;
}  // namespace

void RolloutBuffer::allocate(int envs, int hor, const EnvDims& d,
                             int latent_dim, int n_terms) {
  num_envs = envs;
  horizon = hor;
  dims = d;
  const int n = envs * hor;
  obs.resize(d.obs, n);
  history.resize(d.obs * d.history, n);
  priv.resize(d.priv, n);
  e_target.resize(d.e_target, n);
  cmd.resize(d.cmd, n);
  action.resize(d.action, n);
  action_mean_old.resize(d.action, n);
  latent_noise.resize(latent_dim, n);
  logprob_old.resize(n);
  reward.resize(n);
  value.resize(n);
  done.resize(n);
  logstd_old.resize(d.action);
  reward_terms.resize(n_terms, n);
  advantage.resize(n);
  ret.resize(n);
  bootstrap_value.resize(envs);
}

PpoTrainer::PpoTrainer(ActorCritic& ac, const LossWeights& weights,
                       const PpoConfig& cfg,
                       std::vector<std::unique_ptr<Env>> envs)
    : ac_(ac), weights_(weights), cfg_(cfg), envs_(std::move(envs)),
      rng_(cfg.seed ^ 0x7069706f6c696379ull), adam_(ac.param_count(), cfg.lr_init),
      lr_(cfg.lr_init) {
  ep_return_.assign(envs_.size(), 0.0);
  ep_length_.assign(envs_.size(), 0.0);
  for (auto& e : envs_) e->reset();
}

void PpoTrainer::collect_rollouts(RolloutBuffer& buf) {
  const int E = static_cast<int>(envs_.size());
  const int H = cfg_.horizon;
  const EnvDims d = envs_[0]->dims();
  const int lat = ac_.est().latent_dim;
  const int n_terms = envs_[0]->num_reward_terms();
  if (buf.size() != E * H || buf.dims.obs != d.obs)
    buf.allocate(E, H, d, lat, n_terms);

  const VectorXd logstd = ac_.action_logstd();
  const VectorXd stddev = logstd.array().exp();
  buf.logstd_old = logstd;

  ActorCritic::ActorEval ev;
  MatrixXd value_out;
  Env::StepResult sr;
  for (int t = 0; t < H; ++t) {
    const int col0 = t * E;
    for (int e = 0; e < E; ++e) {
      const int c = col0 + e;
      envs_[e]->fill_inputs(buf.obs.col(c), buf.history.col(c), buf.priv.col(c),
                            buf.e_target.col(c), buf.cmd.col(c));
    }
    auto obs_b = buf.obs.middleCols(col0, E);
    auto hist_b = buf.history.middleCols(col0, E);
    auto cmd_b = buf.cmd.middleCols(col0, E);

    MatrixXd xi;
    if (lat > 0) {
      xi.resize(lat, E);
      for (int c = 0; c < E; ++c)
        for (int r = 0; r < lat; ++r) xi(r, c) = rng_.normal();
      buf.latent_noise.middleCols(col0, E) = xi;
    }
    ac_.actor_forward(hist_b, obs_b, cmd_b, lat > 0 ? &xi : nullptr, ev);
    ac_.critic_forward(obs_b, buf.priv.middleCols(col0, E), cmd_b, value_out);

    buf.action_mean_old.middleCols(col0, E) = ev.action_mean;
    for (int e = 0; e < E; ++e) {
      const int c = col0 + e;
      double lp = 0.0;
      for (int j = 0; j < d.action; ++j) {
        const double eps = rng_.normal();
        buf.action(j, c) = ev.action_mean(j, e) + stddev[j] * eps;
        lp += -0.5 * eps * eps - logstd[j] - 0.5 * kLog2Pi;
      }
      buf.logprob_old[c] = lp;
      buf.value[c] = value_out(0, e);
    }

    for (int e = 0; e < E; ++e) {
      const int c = col0 + e;
      sr = envs_[e]->step(buf.action.col(c));
      buf.reward[c] = sr.reward;
      buf.reward_terms.col(c) = sr.terms;
      buf.done[c] = sr.done ? 1.0 : 0.0;
      ep_return_[e] += sr.reward;
      ep_length_[e] += 1.0;
      ++total_env_steps_;
      if (sr.done) {
        episode_returns_.push_back(ep_return_[e]);
        episode_lengths_.push_back(ep_length_[e]);
        if (episode_returns_.size() > 100) {
          episode_returns_.pop_front();
          episode_lengths_.pop_front();
        }
        ++episodes_completed_;
        ep_return_[e] = 0.0;
        ep_length_[e] = 0.0;
        envs_[e]->reset();
      }
    }
  }

  // Bootstrap values for the states following the last stored step.
  MatrixXd obs_n(d.obs, E), hist_n(d.obs * d.history, E), priv_n(d.priv, E),
      e_n(d.e_target, E), cmd_n(d.cmd, E);
  for (int e = 0; e < E; ++e)
    envs_[e]->fill_inputs(obs_n.col(e), hist_n.col(e), priv_n.col(e),
                          e_n.col(e), cmd_n.col(e));
  ac_.critic_forward(obs_n, priv_n, cmd_n, value_out);
  for (int e = 0; e < E; ++e) buf.bootstrap_value[e] = value_out(0, e);

  gae_all(buf);
}

void PpoTrainer::gae_all(RolloutBuffer& buf) {
  const int E = buf.num_envs, H = buf.horizon;
  VectorXd r(H), v(H), dn(H), adv(H), ret(H);
  for (int e = 0; e < E; ++e) {
    for (int t = 0; t < H; ++t) {
      r[t] = buf.reward[t * E + e];
      v[t] = buf.value[t * E + e];
      dn[t] = buf.done[t * E + e];
    }
    compute_gae(r, v, dn, buf.bootstrap_value[e], cfg_.gamma, cfg_.lam, adv, ret);
    for (int t = 0; t < H; ++t) {
      buf.advantage[t * E + e] = adv[t];
      buf.ret[t * E + e] = ret[t];
    }
  }
}

UpdateDiag PpoTrainer::update(RolloutBuffer& buf) {
  const int N = buf.size();
  const int A = buf.dims.action;
  const int lat = ac_.est().latent_dim;

  // Advantage normalization over the whole buffer.
  const double mean = buf.advantage.mean();
  const double var = (buf.advantage.array() - mean).square().mean();
  const double sd = std::sqrt(var);
  if (sd > 1e-12)
    buf.advantage = (buf.advantage.array() - mean) / sd;
  else
    buf.advantage.setZero();

  UpdateDiag diag;
  diag.entropy = 0.0;
  int n_batches = 0;

  std::vector<int> perm(N);
  VectorXd grad = VectorXd::Zero(ac_.param_count());
  const int mb_size = N / cfg_.minibatches;

  MatrixXd obs_mb, hist_mb, cmd_mb, priv_mb, e_mb, act_mb, xi_mb;
  VectorXd adv_mb, ret_mb, lp_old_mb;
  ActorCritic::ActorEval ev;
  MlpCache critic_cache;
  MatrixXd value_out;

  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    for (int i = 0; i < N; ++i) perm[i] = i;
    for (int i = N - 1; i > 0; --i)
      std::swap(perm[i], perm[rng_.uniform_int(i + 1)]);

    for (int mb = 0; mb < cfg_.minibatches; ++mb) {
      const int off = mb * mb_size;
      const int M = (mb + 1 == cfg_.minibatches) ? N - off : mb_size;

      obs_mb.resize(buf.dims.obs, M);
      hist_mb.resize(buf.dims.obs * buf.dims.history, M);
      cmd_mb.resize(buf.dims.cmd, M);
      priv_mb.resize(buf.dims.priv, M);
      e_mb.resize(buf.dims.e_target, M);
      act_mb.resize(A, M);
      xi_mb.resize(lat, M);
      adv_mb.resize(M);
      ret_mb.resize(M);
      lp_old_mb.resize(M);
      MatrixXd mean_old(A, M);
      for (int i = 0; i < M; ++i) {
        const int c = perm[off + i];
        obs_mb.col(i) = buf.obs.col(c);
        hist_mb.col(i) = buf.history.col(c);
        cmd_mb.col(i) = buf.cmd.col(c);
        priv_mb.col(i) = buf.priv.col(c);
        e_mb.col(i) = buf.e_target.col(c);
        act_mb.col(i) = buf.action.col(c);
        if (lat > 0) xi_mb.col(i) = buf.latent_noise.col(c);
        adv_mb[i] = buf.advantage[c];
        ret_mb[i] = buf.ret[c];
        lp_old_mb[i] = buf.logprob_old[c];
        mean_old.col(i) = buf.action_mean_old.col(c);
      }

      ac_.actor_forward(hist_mb, obs_mb, cmd_mb, lat > 0 ? &xi_mb : nullptr, ev);
      ac_.critic_forward(obs_mb, priv_mb, cmd_mb, value_out, &critic_cache);

      const VectorXd logstd = ac_.action_logstd();
      const VectorXd stddev = logstd.array().exp();
      const VectorXd inv_var = (-2.0 * logstd.array()).exp();

      // New log-probs of the stored actions.
      VectorXd lp_new = VectorXd::Constant(M, -0.5 * A * kLog2Pi - logstd.sum());
      MatrixXd u = act_mb - ev.action_mean;  // (a - mu)
      for (int i = 0; i < M; ++i)
        lp_new[i] -= 0.5 * (u.col(i).array().square() * inv_var.array()).sum();

      // Clip-surrogate policy loss.
      double policy_loss = 0.0, kl_sum = 0.0;
      int clipped = 0;
      MatrixXd d_mean = MatrixXd::Zero(A, M);
      VectorXd d_logstd = VectorXd::Zero(A);
      for (int i = 0; i < M; ++i) {
        const double ratio = std::exp(lp_new[i] - lp_old_mb[i]);
        const double surr1 = ratio * adv_mb[i];
        const double clipped_ratio =
            std::clamp(ratio, 1.0 - cfg_.clip, 1.0 + cfg_.clip);
        const double surr2 = clipped_ratio * adv_mb[i];
        policy_loss -= std::min(surr1, surr2);
        if (surr1 > surr2) ++clipped;
        if (surr1 <= surr2) {
          // Gradient flows through the unclipped branch only.
          const double dl_dlogp = -adv_mb[i] * ratio / M;
          d_mean.col(i) += dl_dlogp * (u.col(i).array() * inv_var.array()).matrix();
          for (int j = 0; j < A; ++j) {
            const double uj = u(j, i) / stddev[j];
            d_logstd[j] += dl_dlogp * (uj * uj - 1.0);
          }
        }
        // KL(old || new) for the adaptive learning rate.
        double kl_i = 0.0;
        for (int j = 0; j < A; ++j) {
          const double dmu = mean_old(j, i) - ev.action_mean(j, i);
          const double so2 = std::exp(2.0 * buf.logstd_old[j]);
          kl_i += logstd[j] - buf.logstd_old[j] +
                  (so2 + dmu * dmu) * 0.5 * inv_var[j] - 0.5;
        }
        kl_sum += kl_i;
      }
      policy_loss /= M;
      const double kl = kl_sum / M;

      // Entropy bonus (state-independent for a global log-std).
      const double entropy = A * 0.5 * (kLog2Pi + 1.0) + logstd.sum();
      d_logstd.array() -= weights_.entropy_coef;

      // Value loss.
      VectorXd verr = value_out.row(0).transpose() - ret_mb;
      const double value_loss = verr.squaredNorm() / M;
      MatrixXd d_value = (2.0 * weights_.value_coef / M) * verr.transpose();

      // Auxiliary estimation / reconstruction losses.
      double est_loss = 0.0, ae_loss = 0.0;
      ActorCritic::ActorGrads g;
      g.d_action_mean = d_mean;
      if (cfg_.aux_losses_enabled) {
        MatrixXd d_e_hat, d_recon, d_zm, d_zl;
        est_loss = ac_.estimation_loss(ev.e_hat, e_mb, weights_, &d_e_hat);
        g.d_e_hat = std::move(d_e_hat);
        if (ac_.est().has_decoder) {
          ae_loss = ac_.auto_encoder_loss(ev.recon, obs_mb, ev.z_mean,
                                          ev.z_logvar, weights_, &d_recon,
                                          &d_zm, &d_zl);
          g.d_recon = std::move(d_recon);
          g.d_z_mean = std::move(d_zm);
          g.d_z_logvar = std::move(d_zl);
        }
      }

      grad.setZero();
      ac_.actor_backward(ev, g, grad);
      ac_.accumulate_logstd_grad(d_logstd, grad);
      ac_.critic_backward(critic_cache, d_value, grad);

      const double gnorm = grad.norm();
      if (gnorm > cfg_.max_grad_norm && gnorm > 0.0)
        grad *= cfg_.max_grad_norm / gnorm;
      adam_.lr = lr_;
      adam_.update(ac_.params, grad);

      // Adaptive learning rate keeping KL near the target.
      if (cfg_.kl_target > 0.0) {
        if (kl > cfg_.kl_target * 1.5)
          lr_ = std::max(lr_ / 2.0, cfg_.lr_min);
        else if (kl < cfg_.kl_target / 1.5 && kl >= 0.0)
          lr_ = std::min(lr_ * 2.0, cfg_.lr_max);
      }

      diag.policy_loss += policy_loss;
      diag.value_loss += value_loss;
      diag.entropy = entropy;
      diag.est_loss += est_loss;
      diag.ae_loss += ae_loss;
      diag.kl += kl;
      diag.grad_norm += gnorm;
      diag.clip_fraction += static_cast<double>(clipped) / M;
      ++n_batches;
    }
  }
  diag.policy_loss /= n_batches;
  diag.value_loss /= n_batches;
  diag.est_loss /= n_batches;
  diag.ae_loss /= n_batches;
  diag.kl /= n_batches;
  diag.grad_norm /= n_batches;
  diag.clip_fraction /= n_batches;
  diag.lr = lr_;
  return diag;
}

double PpoTrainer::r_final() const {
  if (episode_returns_.empty()) return 0.0;
  const int n = std::min<int>(kEpisodeWindow, episode_returns_.size());
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    s += episode_returns_[episode_returns_.size() - 1 - i];
  return s / n;
}

std::string PpoTrainer::train(const TrainOutputs& out) {
  namespace fs = std::filesystem;
  fs::create_directories(out.out_dir);
  fs::create_directories(out.out_dir + "/checkpoints");
  std::ofstream metrics(out.out_dir + "/metrics.jsonl", std::ios::trunc);
  std::ofstream timing(out.out_dir + "/timing.csv", std::ios::trunc);
  timing << "update,wall_seconds\n";
  const auto t0 = std::chrono::steady_clock::now();

  auto save = [&](const std::string& name, int update) {
    nlohmann::json extra = out.checkpoint_extra;
    extra["seed"] = cfg_.seed;
    extra["update"] = update;
    extra["r_final"] = r_final();
    ac_.to_checkpoint(extra).save(out.out_dir + "/checkpoints/" + name);
  };

  RolloutBuffer buf;
  const int n_terms = envs_[0]->num_reward_terms();
  save("ckpt_0000000.bip", 0);
  for (int upd = 1; upd <= cfg_.max_updates; ++upd) {
    collect_rollouts(buf);
    const UpdateDiag od = update(buf);
    if (!std::isfinite(od.policy_loss) || !std::isfinite(od.value_loss))
      throw std::runtime_error("non-finite loss at update " +
                               std::to_string(upd));

    TrainDiag td;
    td.update = upd;
    td.total_env_steps = total_env_steps_;
    td.mean_episode_reward = r_final();
    td.episodes_completed = episodes_completed_;
    double ml = 0.0;
    const int ne = static_cast<int>(episode_lengths_.size());
    for (int i = 0; i < std::min(ne, kEpisodeWindow); ++i)
      ml += episode_lengths_[ne - 1 - i];
    td.mean_episode_length = ne ? ml / std::min(ne, kEpisodeWindow) : 0.0;
    double lvl = 0.0;
    for (const auto& e : envs_) lvl += e->curriculum_level();
    td.mean_curriculum_level = lvl / envs_.size();
    td.term_means.resize(n_terms);
    for (int k = 0; k < n_terms; ++k)
      td.term_means[k] = buf.reward_terms.row(k).mean();
    td.opt = od;

    nlohmann::json rec;
    rec["update"] = td.update;
    rec["total_env_steps"] = td.total_env_steps;
    rec["mean_episode_reward"] = td.mean_episode_reward;
    rec["mean_episode_length"] = td.mean_episode_length;
    rec["episodes_completed"] = td.episodes_completed;
    rec["mean_curriculum_level"] = td.mean_curriculum_level;
    for (int k = 0; k < n_terms; ++k)
      rec[std::string("term_") + envs_[0]->term_name(k)] = td.term_means[k];
    rec["policy_loss"] = od.policy_loss;
    rec["value_loss"] = od.value_loss;
    rec["entropy"] = od.entropy;
    rec["estimation_loss"] = od.est_loss;
    rec["auto_encoder_loss"] = od.ae_loss;
    rec["kl"] = od.kl;
    rec["lr"] = od.lr;
    rec["grad_norm"] = od.grad_norm;
    rec["clip_fraction"] = od.clip_fraction;
    metrics << rec.dump() << "\n";
    metrics.flush();
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    timing << upd << "," << wall << "\n";
    timing.flush();

    if (cfg_.checkpoint_every > 0 && upd % cfg_.checkpoint_every == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "ckpt_%07d.bip", upd);
      save(name, upd);
    }
    if (out.on_update && !out.on_update(td)) break;
  }
  save("final.bip", cfg_.max_updates);
  return out.out_dir + "/checkpoints/final.bip";
}

}  // namespace bip
