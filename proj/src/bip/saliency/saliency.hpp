#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <json.hpp>

#include "bip/nn/mlp.hpp"

namespace bip {

// A differentiable map with input-Jacobian access, the object integrated
// gradients are computed over.
class DiffFn {
 public:
  virtual ~DiffFn() = default;
  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;
  virtual MatrixXd value(const Eigen::Ref<const MatrixXd>& x) const = 0;
  // Jacobians at each column of x; jac[k] is output_dim x input_dim.
  virtual void jacobians(const Eigen::Ref<const MatrixXd>& x,
                         std::vector<MatrixXd>& jac) const;
  virtual MatrixXd jacobian(const VectorXd& x) const;
};

// An MLP (plus optional tanh output squash with per-output scale) as a
// DiffFn; Jacobians come from batched reverse-mode passes.
class MlpDiffFn : public DiffFn {
 public:
  MlpDiffFn(const MlpSpec& spec, const double* params)
      : spec_(spec), params_(params) {}
  // Squashed variant: y = nominal + scale .* tanh(net(x)).
  MlpDiffFn(const MlpSpec& spec, const double* params, VectorXd nominal,
            VectorXd scale)
      : spec_(spec), params_(params), nominal_(std::move(nominal)),
        scale_(std::move(scale)), squash_(true) {}

  int input_dim() const override { return spec_.input_dim(); }
  int output_dim() const override { return spec_.output_dim(); }
  MatrixXd value(const Eigen::Ref<const MatrixXd>& x) const override;
  void jacobians(const Eigen::Ref<const MatrixXd>& x,
                 std::vector<MatrixXd>& jac) const override;

 private:
  MlpSpec spec_;
  const double* params_;
  VectorXd nominal_, scale_;
  bool squash_ = false;
};

struct SaliencyConfig {
  int p = 25;         // integral horizon
  VectorXd baseline;  // defaults to zeros when empty
  // Named index partition of the input vector.
  std::vector<std::pair<std::string, std::vector<int>>> groups;
  int samples = 4096;
};

// Per-element integrated-gradient magnitude: the absolute value is taken per
// output after the path sum, then summed over outputs. The gradient is
// evaluated at p points on the straight path from the baseline to x
// (right-endpoint rule, k = 1..p reaching x exactly).
VectorXd integrated_gradient(const DiffFn& f, const VectorXd& x,
                             const SaliencyConfig& cfg);

// Signed per-output path integrals (no absolute value); used by the
// completeness check sum_i IG[j][i] ~= F_j(x) - F_j(baseline).
MatrixXd integrated_gradient_signed(const DiffFn& f, const VectorXd& x, int p,
                                    const VectorXd& baseline);

struct SaliencyNormalized {
  double epsilon = 0.0;  // mean of all integrated gradients
  MatrixXd s_d;          // thresholded saliency max(G - eps, 0)
  MatrixXd s;            // s_d / max(s_d), all zero if the max is zero
  bool degenerate = false;  // set when max(s_d) == 0
};

// G is samples x inputs.
SaliencyNormalized saliency_normalize(const Eigen::Ref<const MatrixXd>& g);

struct ImportanceResult {
  VectorXd per_element;             // I_i = sum_t S(x_{i,t})
  VectorXd per_group;               // I_o, group-size-normalized
  VectorXd relative;                // iota_o, on the simplex when nonzero
  std::vector<std::string> group_names;
};

ImportanceResult importance(
    const Eigen::Ref<const MatrixXd>& s,
    const std::vector<std::pair<std::string, std::vector<int>>>& groups);

struct SaliencyReport {
  MatrixXd g;  // samples x inputs
  SaliencyNormalized norm;
  ImportanceResult imp;
  MatrixXd per_sample_iota;  // samples x groups (each row renormalized)
  nlohmann::json metadata;

  nlohmann::json to_json() const;
  void write_group_means_csv(const std::string& path) const;   // pie data
  void write_per_sample_csv(const std::string& path) const;    // box data
};

// Full report over a set of collected inputs (columns of x).
SaliencyReport analyze_inputs(const DiffFn& f,
                              const Eigen::Ref<const MatrixXd>& x,
                              const SaliencyConfig& cfg);

}  // namespace bip
