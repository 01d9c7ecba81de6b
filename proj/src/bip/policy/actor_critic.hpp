#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "bip/common/rng.hpp"
#include "bip/nn/checkpoint.hpp"
#include "bip/nn/mlp.hpp"
#include "bip/policy/estimation_spec.hpp"

namespace bip {

struct PolicyDims {
  int obs = 15;
  int cmd = 4;
  int priv = 24;
  int e_target = 13;
  int action = 4;
  int history = 50;
};

struct NetWidths {
  std::vector<int> encoder_hidden{128, 64, 32};
  std::vector<int> decoder_hidden{64};
  std::vector<int> backbone_hidden{256, 128, 64};
  std::vector<int> critic_hidden{256, 128, 64};
};

struct LossWeights {
  double velocity = 1.0;    // estimation loss coefficients per slice name
  double heightmap = 0.5;
  double height = 2.0;
  double vae_beta = 50.0;   // KL weight, normalized by latent dimension
  double pred = 2.0;        // observation prediction (reconstruction)
  double value_coef = 1.0;
  double entropy_coef = 0.005;

  double slice_coef(const std::string& name) const;
};

// Asymmetric actor-critic. The actor is an auto-encoder (encoder over the
// 0.5 s observation history producing explicit estimates e_hat and a latent
// z; decoder reconstructing the current observation) plus a backbone mapping
// (o_t, e_hat, z, command) to a joint-target action mean, squashed by tanh
// into the joint ranges. The critic sees (o_t, P_t, command). All parameters
// live in one flat vector: [encoder | decoder | backbone | logstd | critic].
class ActorCritic {
 public:
  ActorCritic(const PolicyDims& dims, const EstimationSpec& est,
              const NetWidths& widths, const VectorXd& action_nominal,
              const VectorXd& action_scale, double init_action_std, Rng& rng);

  struct ActorEval {
    MlpCache enc_cache, dec_cache, bb_cache;
    MatrixXd e_hat;           // est_dim x B
    MatrixXd z_mean, z_logvar, z;  // latent x B
    MatrixXd recon;           // obs x B, empty when no decoder
    MatrixXd raw, tanh_raw;   // pre-squash backbone output
    MatrixXd action_mean;     // action x B
  };

  // xi: reparameterization noise (latent x B); pass nullptr to use the
  // latent mean (evaluation / saliency mode).
  void actor_forward(const Eigen::Ref<const MatrixXd>& history,
                     const Eigen::Ref<const MatrixXd>& obs,
                     const Eigen::Ref<const MatrixXd>& cmd,
                     const MatrixXd* xi, ActorEval& ev) const;

  struct ActorGrads {
    MatrixXd d_action_mean;  // any of these may be empty (treated as zero)
    MatrixXd d_e_hat;
    MatrixXd d_recon;
    MatrixXd d_z_mean;
    MatrixXd d_z_logvar;
  };
  // Accumulates parameter gradients for the composite actor loss into grad.
  void actor_backward(const ActorEval& ev, const ActorGrads& g,
                      Eigen::Ref<VectorXd> grad) const;

  void critic_forward(const Eigen::Ref<const MatrixXd>& obs,
                      const Eigen::Ref<const MatrixXd>& priv,
                      const Eigen::Ref<const MatrixXd>& cmd, MatrixXd& value,
                      MlpCache* cache = nullptr) const;
  void critic_backward(const MlpCache& cache,
                       const Eigen::Ref<const MatrixXd>& dvalue,
                       Eigen::Ref<VectorXd> grad) const;

  // Single-sample convenience: sampled (or mean) action with its diagonal
  // Gaussian log-density, plus the estimation outputs.
  struct ActResult {
    VectorXd action;
    double logprob = 0.0;
    VectorXd e_hat, z, recon;
    VectorXd action_mean;
  };
  ActResult act(const VectorXd& history, const VectorXd& obs,
                const VectorXd& cmd, Rng& rng, bool stochastic) const;

  // Losses (batch means) with optional gradients.
  double estimation_loss(const Eigen::Ref<const MatrixXd>& e_hat,
                         const Eigen::Ref<const MatrixXd>& e_target,
                         const LossWeights& w, MatrixXd* d_e_hat = nullptr) const;
  double auto_encoder_loss(const Eigen::Ref<const MatrixXd>& recon,
                           const Eigen::Ref<const MatrixXd>& obs_target,
                           const Eigen::Ref<const MatrixXd>& z_mean,
                           const Eigen::Ref<const MatrixXd>& z_logvar,
                           const LossWeights& w, MatrixXd* d_recon = nullptr,
                           MatrixXd* d_z_mean = nullptr,
                           MatrixXd* d_z_logvar = nullptr) const;

  // Clamped log-std of the action distribution, and the positions of the
  // raw values inside the clamp range (where gradient flows).
  VectorXd action_logstd() const;
  Eigen::Array<bool, Eigen::Dynamic, 1> logstd_active() const;
  void accumulate_logstd_grad(const VectorXd& d_logstd,
                              Eigen::Ref<VectorXd> grad) const;

  const PolicyDims& dims() const { return dims_; }
  const EstimationSpec& est() const { return est_; }
  const NetWidths& widths() const { return widths_; }
  const MlpSpec& encoder_spec() const { return enc_spec_; }
  const MlpSpec& backbone_spec() const { return bb_spec_; }
  const MlpSpec& critic_spec() const { return critic_spec_; }
  const std::optional<MlpSpec>& decoder_spec() const { return dec_spec_; }
  const VectorXd& action_nominal() const { return action_nominal_; }
  const VectorXd& action_scale() const { return action_scale_; }
  int backbone_input_dim() const { return bb_spec_.input_dim(); }
  int param_count() const { return static_cast<int>(params.size()); }
  const double* encoder_params() const { return params.data() + enc_off_; }
  const double* backbone_params() const { return params.data() + bb_off_; }
  const double* critic_params() const { return params.data() + critic_off_; }

  Checkpoint to_checkpoint(const nlohmann::json& extra = {}) const;
  static ActorCritic from_checkpoint(const Checkpoint& ck);

  VectorXd params;

 private:
  ActorCritic() = default;
  void build_layout();

  PolicyDims dims_;
  EstimationSpec est_;
  NetWidths widths_;
  MlpSpec enc_spec_, bb_spec_, critic_spec_;
  std::optional<MlpSpec> dec_spec_;
  VectorXd action_nominal_, action_scale_;
  int enc_off_ = 0, dec_off_ = 0, bb_off_ = 0, logstd_off_ = 0, critic_off_ = 0;
  static constexpr double kLogStdMin = -4.0;
  static constexpr double kLogStdMax = 1.0;
};

}  // namespace bip
