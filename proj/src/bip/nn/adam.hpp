#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace bip {

// Bias-corrected Adam over a flat parameter vector.
struct AdamState {
  Eigen::VectorXd m, v;
  int64_t step = 0;
  double lr;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState(int n, double learning_rate)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)),
        lr(learning_rate) {}

  void update(Eigen::Ref<Eigen::VectorXd> params,
              const Eigen::Ref<const Eigen::VectorXd>& grad) {
    ++step;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

}  // namespace bip
