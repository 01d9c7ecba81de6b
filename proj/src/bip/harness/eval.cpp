#include "bip/harness/eval.hpp"

#include <cmath>

namespace bip {
namespace {

int kind_index(const RunConfig& cfg, TerrainKind kind) {
  for (size_t i = 0; i < cfg.terrain_kinds.size(); ++i)
    if (cfg.terrain_kinds[i] == kind) return static_cast<int>(i);
  throw std::invalid_argument("terrain kind not in the configured bank: " +
                              terrain_kind_name(kind));
}

struct InputBuffers {
  VectorXd obs, hist, priv, e, cmd;
  explicit InputBuffers(const EnvDims& d)
      : obs(d.obs), hist(d.obs * d.history), priv(d.priv), e(d.e_target),
        cmd(d.cmd) {}
};

}  // namespace

Controller make_policy_controller(const ActorCritic& ac) {
  auto rng = std::make_shared<Rng>(0);
  return [&ac, rng](const VectorXd& obs, const VectorXd& hist,
                    const VectorXd& cmd) {
    return ac.act(hist, obs, cmd, *rng, /*stochastic=*/false).action;
  };
}

double eval_velocity_tracking(const Controller& pi,
                              std::shared_ptr<const BipedContext> ctx,
                              int trials, double duration, uint64_t seed) {
  const RunConfig& cfg = ctx->cfg;
  BipedEnv env(ctx, seed, kind_index(cfg, TerrainKind::kFlat));
  env.set_eval_mode(true);
  env.set_fixed_level(0);
  Rng cmd_rng(seed ^ 0x45564c54ull);
  const int steps = static_cast<int>(duration / cfg.sim.policy_dt());
  InputBuffers b(env.dims());

  RmsAccumulator acc;
  for (int trial = 0; trial < trials; ++trial) {
    Command c = sample_command(cmd_rng, cfg.commands);
    env.set_fixed_command(c);
    env.reset();
    for (int t = 0; t < steps; ++t) {
      env.fill_inputs(b.obs, b.hist, b.priv, b.e, b.cmd);
      const auto res = env.step(pi(b.obs, b.hist, b.cmd));
      const Vector2d dv(env.state().base_vx() - c.vx_des, env.state().base_vz());
      acc.add_squared(dv.squaredNorm());
      if (res.done) env.reset();
    }
  }
  return acc.rms();
}

double eval_orientation(const Controller& pi,
                        std::shared_ptr<const BipedContext> ctx,
                        const TemplateTrajectory& traj, uint64_t seed) {
  const RunConfig& cfg = ctx->cfg;
  BipedEnv env(ctx, seed, kind_index(cfg, TerrainKind::kFlat));
  env.set_eval_mode(true);
  env.set_fixed_level(0);
  Command c;
  c.vx_des = traj.vx_at(0.0);
  env.set_fixed_command(c);
  const double dt = cfg.sim.policy_dt();
  const int steps = static_cast<int>(traj.total_duration() / dt);
  env.set_episode_cap_steps(steps + 1);
  env.reset();
  InputBuffers b(env.dims());
  RmsAccumulator acc;
  for (int t = 0; t < steps; ++t) {
    env.set_command_vx(traj.vx_at(t * dt));
    env.fill_inputs(b.obs, b.hist, b.priv, b.e, b.cmd);
    const auto res = env.step(pi(b.obs, b.hist, b.cmd));
    // Body-frame gravity direction vs the upright nominal (0, -1):
    // the chord 2 sin(pitch / 2) on unit vectors.
    const double th = env.state().pitch();
    const double dx = -std::sin(th);
    const double dz = -std::cos(th) + 1.0;
    acc.add_squared(dx * dx + dz * dz);
    if (res.done) env.reset();
  }
  return acc.rms();
}

double eval_traversal(const Controller& pi,
                      std::shared_ptr<const BipedContext> ctx, TerrainKind kind,
                      int trials, uint64_t seed) {
  const RunConfig& cfg = ctx->cfg;
  BipedEnv env(ctx, seed, kind_index(cfg, kind));
  env.set_eval_mode(true);
  env.set_fixed_level(cfg.terrain.max_level);
  Command c;
  c.vx_des = cfg.traversal_command;
  env.set_fixed_command(c);
  InputBuffers b(env.dims());

  const int steps = static_cast<int>(cfg.traversal_time_cap / cfg.sim.policy_dt());
  env.set_episode_cap_steps(steps + 1);
  int successes = 0;
  for (int trial = 0; trial < trials; ++trial) {
    env.reset();
    const double x0 = env.state().base_x();
    bool ok = false;
    for (int t = 0; t < steps; ++t) {
      env.fill_inputs(b.obs, b.hist, b.priv, b.e, b.cmd);
      const auto res = env.step(pi(b.obs, b.hist, b.cmd));
      if (env.state().base_x() - x0 >= cfg.terrain.extent) {
        ok = true;
        break;
      }
      if (res.terminated) break;
      if (res.done) break;  // time-capped episode without reaching the goal
    }
    if (ok) ++successes;
  }
  return static_cast<double>(successes) / trials;
}

}  // namespace bip
