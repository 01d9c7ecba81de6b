#pragma once

#include "bip/kernels.hpp"
#include "bip/rl/env.hpp"
#include "bip/common/rng.hpp"
#include "bip/world/world.hpp"

namespace bip {

// Minimal velocity-tracking sanity environment: a 1D point mass whose action
// nudges its velocity, rewarded by the velocity-tracking kernel only. Used
// by the training smoke test.
class PointMassEnv : public Env {
 public:
  PointMassEnv(uint64_t seed, KernelParams velocity_kernel = {0.1, 1, 0.02},
               int episode_steps = 100)
      : rng_(seed), kernel_(velocity_kernel), episode_steps_(episode_steps),
        history_(1, kHistoryLen, 0) {}

  EnvDims dims() const override { return {1, 1, 1, 1, 1, kHistoryLen}; }
  int num_reward_terms() const override { return 1; }
  const char* term_name(int) const override { return "r_v"; }

  void reset() override {
    v_target_ = rng_.uniform(-1.0, 1.0);
    v_ = v_target_ + rng_.uniform(-0.05, 0.05);
    steps_ = 0;
    history_.reset();
    push();
  }

  void fill_inputs(Eigen::Ref<Eigen::VectorXd> obs,
                   Eigen::Ref<Eigen::VectorXd> history,
                   Eigen::Ref<Eigen::VectorXd> priv,
                   Eigen::Ref<Eigen::VectorXd> e_target,
                   Eigen::Ref<Eigen::VectorXd> cmd) override {
    obs = history_.delivered(0);
    history_.window_before_delivered(0, history);
    priv[0] = v_;
    e_target[0] = v_;
    cmd[0] = v_target_;
  }

  StepResult step(const Eigen::VectorXd& action) override {
    const double a = std::clamp(action[0], -1.0, 1.0);
    v_ += 0.4 * a;
    ++steps_;
    StepResult out;
    out.terms.resize(1);
    out.reward = gaussian_kernel(kernel_, std::abs(v_ - v_target_));
    out.terms[0] = out.reward;
    out.done = steps_ >= episode_steps_;
    push();
    return out;
  }

  double episode_time() const override { return steps_ * 0.01; }
  double episode_distance() const override { return 0.0; }

  double velocity() const { return v_; }
  double target() const { return v_target_; }
  double max_step_reward() const { return kernel_.alpha; }

 private:
  void push() {
    Eigen::VectorXd f(1);
    f[0] = v_target_ - v_;
    history_.push(f);
  }

  Rng rng_;
  KernelParams kernel_;
  int episode_steps_;
  ObservationHistory history_;
  double v_ = 0.0, v_target_ = 0.0;
  int steps_ = 0;
};

}  // namespace bip
