#pragma once

#include <cassert>
#include <cmath>

namespace bip {

// Coefficients of the bell-shaped reward kernels. beta is only used by the
// generalized Cauchy kernel.
struct KernelParams {
  double alpha = 1.0;  // peak value, > 0
  int beta = 1;        // Cauchy order, >= 1
  double sigma = 1.0;  // argument scale, > 0, same units as x

  bool valid() const { return alpha > 0.0 && sigma > 0.0 && beta >= 1; }
};

// Gaussian kernel: alpha * exp(-(x/sigma)^2). Peak alpha at x = 0, even,
// strictly decreasing in |x|.
inline double gaussian_kernel(const KernelParams& p, double x) {
  assert(p.valid());
  const double u = x / p.sigma;
  return p.alpha * std::exp(-u * u);
}

// Generalized Cauchy kernel: alpha * ((x/sigma)^(2*beta) + 1)^-1. Peak alpha
// at x = 0, even, strictly decreasing in |x|, heavy polynomial tail. For any
// beta the curve passes through (+-sigma, alpha/2), which makes sigma the
// natural tuning handle.
inline double cauchy_kernel(const KernelParams& p, double x) {
  assert(p.valid());
  const double u = x / p.sigma;
  return p.alpha / (std::pow(u * u, p.beta) + 1.0);
}

}  // namespace bip
