#pragma once

#include <memory>

#include "bip/harness/run_config.hpp"
#include "bip/rewards/rewards.hpp"
#include "bip/rl/env.hpp"
#include "bip/sim/sim.hpp"
#include "bip/world/world.hpp"

namespace bip {

// Immutable data shared read-only by every environment instance.
struct BipedContext {
  RunConfig cfg;
  // terrains[kind][level][variant]
  std::vector<std::vector<std::vector<TerrainMap>>> terrains;

  static std::shared_ptr<const BipedContext> make(const RunConfig& cfg);
};

class BipedEnv : public Env {
 public:
  BipedEnv(std::shared_ptr<const BipedContext> ctx, uint64_t seed,
           int terrain_kind_index);

  EnvDims dims() const override;
  int num_reward_terms() const override { return kNumRewardTerms; }
  const char* term_name(int i) const override { return kRewardTermNames[i]; }

  void reset() override;
  void fill_inputs(Eigen::Ref<Eigen::VectorXd> obs,
                   Eigen::Ref<Eigen::VectorXd> history,
                   Eigen::Ref<Eigen::VectorXd> priv,
                   Eigen::Ref<Eigen::VectorXd> e_target,
                   Eigen::Ref<Eigen::VectorXd> cmd) override;
  StepResult step(const Eigen::VectorXd& action) override;

  double episode_time() const override { return state_.time - episode_t0_; }
  double episode_distance() const override {
    return std::abs(state_.base_x() - episode_x0_);
  }
  int curriculum_level() const override { return curriculum_.level; }

  // Evaluation knobs: nominal dynamics, no observation noise, no latency,
  // frozen curriculum at a fixed level.
  void set_eval_mode(bool on) { eval_mode_ = on; }
  void set_fixed_command(const Command& c) { fixed_command_ = c; }
  void clear_fixed_command() { fixed_command_.reset(); }
  void set_fixed_level(int level) { fixed_level_ = level; }
  void set_command_vx(double vx) { command_.vx_des = vx; }
  void set_episode_cap_steps(int steps) { cap_override_ = steps; }

  const RobotState& state() const { return state_; }
  const Command& command() const { return command_; }
  const TerrainMap& terrain() const { return *terrain_; }
  const RobotModel& effective_model() const { return eff_model_; }
  std::optional<std::string> last_termination() const { return last_term_; }

  // Joint-target normalization used for the previous-action observation
  // channel and for the policy's squash range.
  static VectorXd action_nominal(const RobotModel& m);
  static VectorXd action_scale(const RobotModel& m);

 private:
  void build_initial_state();
  void push_observation();

  std::shared_ptr<const BipedContext> ctx_;
  Rng rng_;
  int kind_index_;
  const TerrainMap* terrain_ = nullptr;

  RobotState state_;
  RobotModel eff_model_;
  ActuatorScales act_scales_;
  double friction_scale_ = 1.0;
  DomainParams domain_;
  Command command_;
  CurriculumState curriculum_;
  ObservationHistory history_;
  std::array<FootState, kNumFeet> feet_;
  StepInfo prev_info_;
  Eigen::Vector4d prev_action_norm_ = Eigen::Vector4d::Zero();

  int episode_steps_ = 0;
  double episode_t0_ = 0.0;
  double episode_x0_ = 0.0;
  bool have_episode_ = false;
  bool eval_mode_ = false;
  std::optional<Command> fixed_command_;
  std::optional<int> fixed_level_;
  std::optional<int> cap_override_;
  std::optional<std::string> last_term_;
};

}  // namespace bip
