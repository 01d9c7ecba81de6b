#include "bip/nn/mlp.hpp"

#include <cassert>
#include <stdexcept>

namespace bip {
namespace {

// ELU, alpha = 1. For z <= 0 the activation is exp(z) - 1, whose derivative
// is act + 1; that identity is used in the backward pass.
inline MatrixXd elu(const MatrixXd& z) {
  return z.array().max(0.0) + (z.array().min(0.0).exp() - 1.0);
}

inline MatrixXd elu_grad(const MatrixXd& z) {
  return (z.array() > 0.0).select(MatrixXd::Ones(z.rows(), z.cols()),
                                  z.array().min(0.0).exp());
}

}  // namespace

void mlp_forward(const MlpSpec& spec, const double* params,
                 const Eigen::Ref<const MatrixXd>& x, MatrixXd& y,
                 MlpCache* cache) {
  assert(spec.valid());
  if (x.rows() != spec.input_dim())
    throw std::invalid_argument("mlp_forward: input width mismatch");
  const int L = spec.num_layers();
  if (cache) {
    cache->input = x;
    cache->pre.resize(L);
  }
  MatrixXd a = x;
  for (int l = 0; l < L; ++l) {
    MatrixXd z = (mlp_weight(spec, params, l) * a).colwise() +
                 mlp_bias(spec, params, l);
    if (cache) cache->pre[l] = z;
    a = (l + 1 < L) ? elu(z) : std::move(z);
  }
  y = std::move(a);
}

void mlp_backward(const MlpSpec& spec, const double* params,
                  const MlpCache& cache, const Eigen::Ref<const MatrixXd>& dy,
                  double* dparams, MatrixXd* dx) {
  const int L = spec.num_layers();
  if (dy.rows() != spec.output_dim() || dy.cols() != cache.input.cols())
    throw std::invalid_argument("mlp_backward: cotangent shape mismatch");
  MatrixXd dz = dy;  // output layer is identity
  MatrixXd a_prev_store;
  for (int l = L - 1; l >= 0; --l) {
    if (l > 0) a_prev_store = elu(cache.pre[l - 1]);
    const MatrixXd& a_prev = l == 0 ? cache.input : a_prev_store;
    mlp_weight(spec, dparams, l) += dz * a_prev.transpose();
    mlp_bias(spec, dparams, l) += dz.rowwise().sum();
    if (l == 0) {
      if (dx) *dx = mlp_weight(spec, params, 0).transpose() * dz;
      break;
    }
    MatrixXd da = mlp_weight(spec, params, l).transpose() * dz;
    dz = da.cwiseProduct(elu_grad(cache.pre[l - 1]));
  }
}

void mlp_init_orthogonal(const MlpSpec& spec, double* params, Rng& rng,
                         double hidden_gain, double output_gain) {
  assert(spec.valid());
  const int L = spec.num_layers();
  for (int l = 0; l < L; ++l) {
    const int rows = spec.widths[l + 1];
    const int cols = spec.widths[l];
    const bool tall = rows >= cols;
    const int r = tall ? rows : cols;
    const int c = tall ? cols : rows;
    MatrixXd g(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(r, c);
    const MatrixXd rmat = qr.matrixQR().topRows(c);
    for (int j = 0; j < c; ++j)
      if (rmat(j, j) < 0.0) q.col(j) = -q.col(j);
    const double gain = (l + 1 < L) ? hidden_gain : output_gain;
    auto w = mlp_weight(spec, params, l);
    w = gain * (tall ? q : MatrixXd(q.transpose()));
    mlp_bias(spec, params, l).setZero();
  }
}

}  // namespace bip
