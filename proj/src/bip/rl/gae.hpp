#pragma once

#include <Eigen/Dense>

namespace bip {

// Generalized advantage estimation over one trajectory segment by the
// backward recursion A_t = delta_t + gamma lam (1 - done_t) A_{t+1} with
// delta_t = r_t + gamma (1 - done_t) V(s_{t+1}) - V(s_t). values has the
// same length as rewards; bootstrap_value stands in for V at the step after
// the segment. returns = advantages + values.
inline void compute_gae(const Eigen::Ref<const Eigen::VectorXd>& rewards,
                        const Eigen::Ref<const Eigen::VectorXd>& values,
                        const Eigen::Ref<const Eigen::VectorXd>& dones,
                        double bootstrap_value, double gamma, double lam,
                        Eigen::Ref<Eigen::VectorXd> advantages,
                        Eigen::Ref<Eigen::VectorXd> returns) {
  const auto n = rewards.size();
  double next_adv = 0.0;
  double next_value = bootstrap_value;
  for (auto t = n - 1; t >= 0; --t) {
    const double not_done = 1.0 - dones[t];
    const double delta =
        rewards[t] + gamma * not_done * next_value - values[t];
    next_adv = delta + gamma * lam * not_done * next_adv;
    advantages[t] = next_adv;
    next_value = values[t];
  }
  returns = advantages + values;
}

}  // namespace bip
