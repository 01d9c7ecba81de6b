#include "bip/policy/actor_critic.hpp"

#include <cmath>

namespace bip {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

std::vector<int> full_widths(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> w;
  w.push_back(in);
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}
}  // namespace

double LossWeights::slice_coef(const std::string& name) const {
  if (name == "velocity") return velocity;
  if (name == "foot_heightmap") return heightmap;
  if (name == "height") return height;
  throw std::invalid_argument("unknown estimation slice: " + name);
}

ActorCritic::ActorCritic(const PolicyDims& dims, const EstimationSpec& est,
                         const NetWidths& widths, const VectorXd& action_nominal,
                         const VectorXd& action_scale, double init_action_std,
                         Rng& rng)
    : dims_(dims), est_(est), widths_(widths), action_nominal_(action_nominal),
      action_scale_(action_scale) {
  build_layout();
  params.setZero();
  mlp_init_orthogonal(enc_spec_, params.data() + enc_off_, rng);
  if (dec_spec_) mlp_init_orthogonal(*dec_spec_, params.data() + dec_off_, rng);
  mlp_init_orthogonal(bb_spec_, params.data() + bb_off_, rng);
  params.segment(logstd_off_, dims_.action)
      .setConstant(std::log(init_action_std));
  mlp_init_orthogonal(critic_spec_, params.data() + critic_off_, rng);
}

void ActorCritic::build_layout() {
  const int est_dim = est_.est_dim();
  const int lat = est_.latent_dim;
  enc_spec_ = MlpSpec(full_widths(dims_.history * dims_.obs,
                                  widths_.encoder_hidden, est_dim + 2 * lat));
  if (est_.has_decoder)
    dec_spec_ =
        MlpSpec(full_widths(est_dim + lat, widths_.decoder_hidden, dims_.obs));
  bb_spec_ = MlpSpec(full_widths(dims_.obs + est_dim + lat + dims_.cmd,
                                 widths_.backbone_hidden, dims_.action));
  critic_spec_ = MlpSpec(
      full_widths(dims_.obs + dims_.priv + dims_.cmd, widths_.critic_hidden, 1));
  enc_off_ = 0;
  dec_off_ = enc_off_ + enc_spec_.param_count();
  bb_off_ = dec_off_ + (dec_spec_ ? dec_spec_->param_count() : 0);
  logstd_off_ = bb_off_ + bb_spec_.param_count();
  critic_off_ = logstd_off_ + dims_.action;
  params.resize(critic_off_ + critic_spec_.param_count());
}

void ActorCritic::actor_forward(const Eigen::Ref<const MatrixXd>& history,
                                const Eigen::Ref<const MatrixXd>& obs,
                                const Eigen::Ref<const MatrixXd>& cmd,
                                const MatrixXd* xi, ActorEval& ev) const {
  const int B = static_cast<int>(obs.cols());
  const int est_dim = est_.est_dim();
  const int lat = est_.latent_dim;
  if (history.rows() != enc_spec_.input_dim() || cmd.rows() != dims_.cmd ||
      obs.rows() != dims_.obs)
    throw std::invalid_argument("actor_forward: input width mismatch");

  MatrixXd enc_out;
  mlp_forward(enc_spec_, params.data() + enc_off_, history, enc_out,
              &ev.enc_cache);
  ev.e_hat = enc_out.topRows(est_dim);
  ev.z_mean = enc_out.middleRows(est_dim, lat);
  ev.z_logvar = enc_out.bottomRows(lat);
  if (lat > 0 && xi) {
    ev.z = ev.z_mean.array() +
           (0.5 * ev.z_logvar.array()).exp() * xi->array();
  } else {
    ev.z = ev.z_mean;
  }

  if (dec_spec_) {
    MatrixXd dec_in(est_dim + lat, B);
    dec_in.topRows(est_dim) = ev.e_hat;
    dec_in.bottomRows(lat) = ev.z;
    mlp_forward(*dec_spec_, params.data() + dec_off_, dec_in, ev.recon,
                &ev.dec_cache);
  } else {
    ev.recon.resize(0, 0);
  }

  MatrixXd bb_in(bb_spec_.input_dim(), B);
  bb_in.topRows(dims_.obs) = obs;
  bb_in.middleRows(dims_.obs, est_dim) = ev.e_hat;
  bb_in.middleRows(dims_.obs + est_dim, lat) = ev.z;
  bb_in.bottomRows(dims_.cmd) = cmd;
  mlp_forward(bb_spec_, params.data() + bb_off_, bb_in, ev.raw, &ev.bb_cache);
  ev.tanh_raw = ev.raw.array().tanh();
  ev.action_mean =
      (ev.tanh_raw.array().colwise() * action_scale_.array()).colwise() +
      action_nominal_.array();
}

void ActorCritic::actor_backward(const ActorEval& ev, const ActorGrads& g,
                                 Eigen::Ref<VectorXd> grad) const {
  const int B = static_cast<int>(ev.action_mean.cols());
  const int est_dim = est_.est_dim();
  const int lat = est_.latent_dim;

  MatrixXd d_e_hat = MatrixXd::Zero(est_dim, B);
  MatrixXd d_z = MatrixXd::Zero(lat, B);
  MatrixXd d_z_mean = MatrixXd::Zero(lat, B);
  MatrixXd d_z_logvar = MatrixXd::Zero(lat, B);
  if (g.d_e_hat.size()) d_e_hat += g.d_e_hat;
  if (g.d_z_mean.size()) d_z_mean += g.d_z_mean;
  if (g.d_z_logvar.size()) d_z_logvar += g.d_z_logvar;

  if (g.d_action_mean.size()) {
    const MatrixXd d_raw =
        (g.d_action_mean.array() * (1.0 - ev.tanh_raw.array().square()))
            .colwise() *
        action_scale_.array();
    MatrixXd d_bb_in;
    mlp_backward(bb_spec_, params.data() + bb_off_, ev.bb_cache, d_raw,
                 grad.data() + bb_off_, &d_bb_in);
    d_e_hat += d_bb_in.middleRows(dims_.obs, est_dim);
    d_z += d_bb_in.middleRows(dims_.obs + est_dim, lat);
  }

  if (g.d_recon.size() && dec_spec_) {
    MatrixXd d_dec_in;
    mlp_backward(*dec_spec_, params.data() + dec_off_, ev.dec_cache, g.d_recon,
                 grad.data() + dec_off_, &d_dec_in);
    d_e_hat += d_dec_in.topRows(est_dim);
    d_z += d_dec_in.bottomRows(lat);
  }

  if (lat > 0) {
    // z = mean + exp(0.5 logvar) xi, so dz/dlogvar = 0.5 (z - mean).
    d_z_mean += d_z;
    d_z_logvar.array() += d_z.array() * 0.5 * (ev.z - ev.z_mean).array();
  }

  MatrixXd d_enc_out(est_dim + 2 * lat, B);
  d_enc_out.topRows(est_dim) = d_e_hat;
  d_enc_out.middleRows(est_dim, lat) = d_z_mean;
  d_enc_out.bottomRows(lat) = d_z_logvar;
  mlp_backward(enc_spec_, params.data() + enc_off_, ev.enc_cache, d_enc_out,
               grad.data() + enc_off_, nullptr);
}

void ActorCritic::critic_forward(const Eigen::Ref<const MatrixXd>& obs,
                                 const Eigen::Ref<const MatrixXd>& priv,
                                 const Eigen::Ref<const MatrixXd>& cmd,
                                 MatrixXd& value, MlpCache* cache) const {
  const int B = static_cast<int>(obs.cols());
  MatrixXd in(critic_spec_.input_dim(), B);
  in.topRows(dims_.obs) = obs;
  in.middleRows(dims_.obs, dims_.priv) = priv;
  in.bottomRows(dims_.cmd) = cmd;
  mlp_forward(critic_spec_, params.data() + critic_off_, in, value, cache);
}

void ActorCritic::critic_backward(const MlpCache& cache,
                                  const Eigen::Ref<const MatrixXd>& dvalue,
                                  Eigen::Ref<VectorXd> grad) const {
  mlp_backward(critic_spec_, params.data() + critic_off_, cache, dvalue,
               grad.data() + critic_off_, nullptr);
}

ActorCritic::ActResult ActorCritic::act(const VectorXd& history,
                                        const VectorXd& obs, const VectorXd& cmd,
                                        Rng& rng, bool stochastic) const {
  const int lat = est_.latent_dim;
  MatrixXd xi;
  if (stochastic && lat > 0) {
    xi.resize(lat, 1);
    for (int i = 0; i < lat; ++i) xi(i, 0) = rng.normal();
  }
  ActorEval ev;
  actor_forward(history, obs, cmd, stochastic && lat > 0 ? &xi : nullptr, ev);

  ActResult r;
  r.action_mean = ev.action_mean.col(0);
  r.e_hat = ev.e_hat.col(0);
  r.z = ev.z.col(0);
  if (ev.recon.size()) r.recon = ev.recon.col(0);
  const VectorXd logstd = action_logstd();
  const VectorXd std = logstd.array().exp();
  if (stochastic) {
    r.action = r.action_mean;
    for (int i = 0; i < dims_.action; ++i) r.action[i] += std[i] * rng.normal();
  } else {
    r.action = r.action_mean;
  }
  double lp = 0.0;
  for (int i = 0; i < dims_.action; ++i) {
    const double u = (r.action[i] - r.action_mean[i]) / std[i];
    lp += -0.5 * u * u - logstd[i] - 0.5 * kLog2Pi;
  }
  r.logprob = lp;
  return r;
}

double ActorCritic::estimation_loss(const Eigen::Ref<const MatrixXd>& e_hat,
                                    const Eigen::Ref<const MatrixXd>& e_target,
                                    const LossWeights& w,
                                    MatrixXd* d_e_hat) const {
  const int B = static_cast<int>(e_target.cols());
  if (d_e_hat) *d_e_hat = MatrixXd::Zero(est_.est_dim(), B);
  double loss = 0.0;
  int pos = 0;
  for (const auto& s : est_.slices) {
    const double coef = w.slice_coef(s.name);
    const MatrixXd diff =
        e_hat.middleRows(pos, s.dim) - e_target.middleRows(s.offset, s.dim);
    loss += coef * diff.squaredNorm() / (s.dim * B);
    if (d_e_hat)
      d_e_hat->middleRows(pos, s.dim) = (2.0 * coef / (s.dim * B)) * diff;
    pos += s.dim;
  }
  return loss;
}

double ActorCritic::auto_encoder_loss(
    const Eigen::Ref<const MatrixXd>& recon,
    const Eigen::Ref<const MatrixXd>& obs_target,
    const Eigen::Ref<const MatrixXd>& z_mean,
    const Eigen::Ref<const MatrixXd>& z_logvar, const LossWeights& w,
    MatrixXd* d_recon, MatrixXd* d_z_mean, MatrixXd* d_z_logvar) const {
  if (!est_.has_decoder) {
    if (d_recon) d_recon->resize(0, 0);
    if (d_z_mean) d_z_mean->resize(0, 0);
    if (d_z_logvar) d_z_logvar->resize(0, 0);
    return 0.0;
  }
  const int B = static_cast<int>(obs_target.cols());
  const int lat = est_.latent_dim;
  const MatrixXd diff = recon - obs_target;
  double loss = w.pred * diff.squaredNorm() / (dims_.obs * B);
  if (d_recon) *d_recon = (2.0 * w.pred / (dims_.obs * B)) * diff;

  if (lat > 0) {
    // KL(q(z) || N(0, I)) = 1/2 sum(mu^2 + sigma^2 - 1 - log sigma^2),
    // averaged over the batch and normalized by the latent dimension.
    const Eigen::ArrayXXd var = z_logvar.array().exp();
    const double kl =
        0.5 *
        (z_mean.array().square() + var - 1.0 - z_logvar.array()).sum() / B;
    loss += w.vae_beta * kl / lat;
    const double kscale = w.vae_beta / (lat * B);
    if (d_z_mean) *d_z_mean = kscale * z_mean;
    if (d_z_logvar) *d_z_logvar = (kscale * 0.5) * (var - 1.0).matrix();
  }
  return loss;
}

VectorXd ActorCritic::action_logstd() const {
  return params.segment(logstd_off_, dims_.action)
      .cwiseMax(kLogStdMin)
      .cwiseMin(kLogStdMax);
}

Eigen::Array<bool, Eigen::Dynamic, 1> ActorCritic::logstd_active() const {
  const auto raw = params.segment(logstd_off_, dims_.action).array();
  return raw > kLogStdMin && raw < kLogStdMax;
}

void ActorCritic::accumulate_logstd_grad(const VectorXd& d_logstd,
                                         Eigen::Ref<VectorXd> grad) const {
  const auto active = logstd_active();
  for (int i = 0; i < dims_.action; ++i)
    if (active[i]) grad[logstd_off_ + i] += d_logstd[i];
}

Checkpoint ActorCritic::to_checkpoint(const nlohmann::json& extra) const {
  Checkpoint ck;
  nlohmann::json& h = ck.header;
  h["estimation"] = est_.to_json();
  h["dims"] = {{"obs", dims_.obs},       {"cmd", dims_.cmd},
               {"priv", dims_.priv},     {"e_target", dims_.e_target},
               {"action", dims_.action}, {"history", dims_.history}};
  h["widths"] = {{"encoder", widths_.encoder_hidden},
                 {"decoder", widths_.decoder_hidden},
                 {"backbone", widths_.backbone_hidden},
                 {"critic", widths_.critic_hidden}};
  h["action_nominal"] = std::vector<double>(
      action_nominal_.data(), action_nominal_.data() + action_nominal_.size());
  h["action_scale"] = std::vector<double>(
      action_scale_.data(), action_scale_.data() + action_scale_.size());
  h["param_count"] = params.size();
  for (auto it = extra.begin(); it != extra.end(); ++it) h[it.key()] = it.value();
  ck.params = params;
  return ck;
}

ActorCritic ActorCritic::from_checkpoint(const Checkpoint& ck) {
  ActorCritic ac;
  const auto& h = ck.header;
  ac.est_ = EstimationSpec::from_json(h.at("estimation"));
  const auto& d = h.at("dims");
  ac.dims_ = {d.at("obs").get<int>(),      d.at("cmd").get<int>(),
              d.at("priv").get<int>(),     d.at("e_target").get<int>(),
              d.at("action").get<int>(),   d.at("history").get<int>()};
  const auto& w = h.at("widths");
  ac.widths_.encoder_hidden = w.at("encoder").get<std::vector<int>>();
  ac.widths_.decoder_hidden = w.at("decoder").get<std::vector<int>>();
  ac.widths_.backbone_hidden = w.at("backbone").get<std::vector<int>>();
  ac.widths_.critic_hidden = w.at("critic").get<std::vector<int>>();
  const auto nom = h.at("action_nominal").get<std::vector<double>>();
  const auto sc = h.at("action_scale").get<std::vector<double>>();
  ac.action_nominal_ = Eigen::Map<const VectorXd>(nom.data(), nom.size());
  ac.action_scale_ = Eigen::Map<const VectorXd>(sc.data(), sc.size());
  ac.build_layout();
  if (ck.params.size() != ac.params.size())
    throw CheckpointError("checkpoint parameter count mismatch");
  ac.params = ck.params;
  return ac;
}

}  // namespace bip
