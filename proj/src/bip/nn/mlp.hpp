#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bip/common/rng.hpp"

namespace bip {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Fixed-topology fully connected network, ELU on hidden layers, identity
// output. Parameters live in a caller-owned flat array; layout per layer is
// the (out x in) weight matrix in column-major order followed by the bias.
struct MlpSpec {
  std::vector<int> widths;  // [input, hidden..., output]

  MlpSpec() = default;
  explicit MlpSpec(std::vector<int> w) : widths(std::move(w)) {}

  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  int num_layers() const { return static_cast<int>(widths.size()) - 1; }

  bool valid() const {
    if (widths.size() < 3) return false;  // at least one hidden layer
    for (int w : widths)
      if (w < 1) return false;
    return true;
  }

  int param_count() const {
    int n = 0;
    for (int l = 0; l < num_layers(); ++l) n += (widths[l] + 1) * widths[l + 1];
    return n;
  }

  int layer_offset(int layer) const {
    int n = 0;
    for (int l = 0; l < layer; ++l) n += (widths[l] + 1) * widths[l + 1];
    return n;
  }
};

inline Eigen::Map<const MatrixXd> mlp_weight(const MlpSpec& s, const double* p,
                                             int layer) {
  return {p + s.layer_offset(layer), s.widths[layer + 1], s.widths[layer]};
}
inline Eigen::Map<MatrixXd> mlp_weight(const MlpSpec& s, double* p, int layer) {
  return {p + s.layer_offset(layer), s.widths[layer + 1], s.widths[layer]};
}
inline Eigen::Map<const VectorXd> mlp_bias(const MlpSpec& s, const double* p,
                                           int layer) {
  return {p + s.layer_offset(layer) + s.widths[layer] * s.widths[layer + 1],
          s.widths[layer + 1]};
}
inline Eigen::Map<VectorXd> mlp_bias(const MlpSpec& s, double* p, int layer) {
  return {p + s.layer_offset(layer) + s.widths[layer] * s.widths[layer + 1],
          s.widths[layer + 1]};
}

// Intermediate values kept for the backward pass. Batches are column-major:
// one sample per column.
struct MlpCache {
  MatrixXd input;
  std::vector<MatrixXd> pre;  // pre-activation of every layer
};

// y = net(x); x is (input_dim x batch). Pass a cache to enable backward.
void mlp_forward(const MlpSpec& spec, const double* params,
                 const Eigen::Ref<const MatrixXd>& x, MatrixXd& y,
                 MlpCache* cache = nullptr);

// Reverse-mode gradients. dy is the output cotangent (output_dim x batch).
// Parameter gradients are accumulated (+=) into dparams; if dx is non-null
// it receives the input gradient (overwritten).
void mlp_backward(const MlpSpec& spec, const double* params,
                  const MlpCache& cache, const Eigen::Ref<const MatrixXd>& dy,
                  double* dparams, MatrixXd* dx = nullptr);

// Orthogonal weight init (gain sqrt(2) hidden, 0.01 output), zero biases.
void mlp_init_orthogonal(const MlpSpec& spec, double* params, Rng& rng,
                         double hidden_gain = std::sqrt(2.0),
                         double output_gain = 0.01);

}  // namespace bip
