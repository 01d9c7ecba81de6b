#pragma once

#include <functional>
#include <memory>

#include "bip/env/biped_env.hpp"
#include "bip/harness/template_trajectory.hpp"
#include "bip/policy/actor_critic.hpp"

namespace bip {

// A deterministic policy as a plain function of the policy inputs.
using Controller = std::function<VectorXd(
    const VectorXd& obs, const VectorXd& history, const VectorXd& cmd)>;

// Pools squared errors across steps and trials.
struct RmsAccumulator {
  double sq_sum = 0.0;
  long count = 0;
  void add_squared(double sq) {
    sq_sum += sq;
    ++count;
  }
  double rms() const { return count ? std::sqrt(sq_sum / count) : 0.0; }
};

Controller make_policy_controller(const ActorCritic& ac);

// RMS velocity error over `trials` constant-command episodes on flat
// terrain (Euclidean error against (vx_des, 0), all steps pooled).
double eval_velocity_tracking(const Controller& pi,
                              std::shared_ptr<const BipedContext> ctx,
                              int trials, double duration, uint64_t seed);

// RMS distance between the body-frame gravity direction and its upright
// nominal while tracking the template trajectory on flat ground.
double eval_orientation(const Controller& pi,
                        std::shared_ptr<const BipedContext> ctx,
                        const TemplateTrajectory& traj, uint64_t seed);

// Traversal success rate on randomized max-level instances of one terrain
// kind under a fixed forward command. Success: forward displacement reaches
// the terrain extent within the time cap, without termination.
double eval_traversal(const Controller& pi,
                      std::shared_ptr<const BipedContext> ctx, TerrainKind kind,
                      int trials, uint64_t seed);

}  // namespace bip
