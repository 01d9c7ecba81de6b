#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bip {

struct EnvDims {
  int obs = 0;
  int cmd = 0;
  int priv = 0;
  int e_target = 0;
  int action = 0;
  int history = 0;
};

// A single environment instance. Instances own their RNG and mutable state;
// the trainer steps many of them with batched policy evaluations.
class Env {
 public:
  virtual ~Env() = default;

  virtual EnvDims dims() const = 0;
  virtual int num_reward_terms() const = 0;
  virtual const char* term_name(int i) const = 0;

  // Starts a fresh episode (samples command / randomization / terrain).
  virtual void reset() = 0;

  // Current policy inputs: delivered observation, flattened encoder history
  // (ending one step before the delivered frame), privileged state, the
  // estimation target, and the normalized command.
  virtual void fill_inputs(Eigen::Ref<Eigen::VectorXd> obs,
                           Eigen::Ref<Eigen::VectorXd> history,
                           Eigen::Ref<Eigen::VectorXd> priv,
                           Eigen::Ref<Eigen::VectorXd> e_target,
                           Eigen::Ref<Eigen::VectorXd> cmd) = 0;

  struct StepResult {
    double reward = 0.0;
    Eigen::VectorXd terms;  // per-term breakdown, sized num_reward_terms()
    bool done = false;      // episode ended (failure or time limit)
    bool terminated = false;  // failure
  };
  virtual StepResult step(const Eigen::VectorXd& action) = 0;

  virtual double episode_time() const = 0;
  // Forward displacement since the episode start (curriculum bookkeeping).
  virtual double episode_distance() const = 0;
  virtual int curriculum_level() const { return 0; }
};

}  // namespace bip
