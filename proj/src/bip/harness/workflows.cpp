#include "bip/harness/workflows.hpp"

#include <filesystem>
#include <fstream>

#ifndef BIP_CODE_VERSION
#define BIP_CODE_VERSION "unknown"
#endif

namespace bip {

namespace fs = std::filesystem;

void write_manifest(const std::string& path, const std::string& command,
                    const Config& cfg, uint64_t seed,
                    const nlohmann::json& extra) {
  nlohmann::json m;
  m["command"] = command;
  m["seed"] = seed;
  m["code_version"] = BIP_CODE_VERSION;
  m["config"] = cfg.resolved();
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  std::ofstream out(path);
  out << m.dump(2) << "\n";
}

ActorCritic make_biped_policy(const RunConfig& cfg, const std::string& group,
                              uint64_t seed) {
  EstimationSpec est = make_comparison_group(group);
  if (est.latent_dim > 0) est.latent_dim = cfg.latent_dim;
  PolicyDims dims;
  dims.obs = kObsDim;
  dims.cmd = kCmdDim;
  dims.priv = kPrivDim;
  dims.e_target = kEstTargetDim;
  dims.action = kNumJoints;
  dims.history = kHistoryLen;
  Rng rng(seed ^ 0x696e6974ull);
  return ActorCritic(dims, est, cfg.widths, BipedEnv::action_nominal(cfg.model),
                     BipedEnv::action_scale(cfg.model), cfg.init_action_std,
                     rng);
}

namespace {

nlohmann::json checkpoint_extra(const RunConfig& cfg, const std::string& group) {
  nlohmann::json extra;
  extra["group"] = group;
  extra["normalization"] = {{"gravity", cfg.obs_scales.gravity},
                            {"pitch_rate", cfg.obs_scales.pitch_rate},
                            {"joint_pos", cfg.obs_scales.joint_pos},
                            {"joint_vel", cfg.obs_scales.joint_vel},
                            {"prev_action", cfg.obs_scales.prev_action},
                            {"cmd_freq", cfg.obs_scales.cmd_freq},
                            {"cmd_vx", cfg.obs_scales.cmd_vx}};
  return extra;
}

}  // namespace

std::string train_policy(const Config& file_cfg, const std::string& group,
                         uint64_t seed, const std::string& out_dir,
                         const std::function<bool(const TrainDiag&)>& cb) {
  RunConfig cfg = RunConfig::load(file_cfg);
  cfg.ppo.seed = seed;

  ActorCritic ac = make_biped_policy(cfg, group, seed);
  auto ctx = BipedContext::make(cfg);
  Rng env_seeder(seed ^ 0x656e7673ull);
  std::vector<std::unique_ptr<Env>> envs;
  envs.reserve(cfg.ppo.num_envs);
  for (int i = 0; i < cfg.ppo.num_envs; ++i)
    envs.push_back(std::make_unique<BipedEnv>(
        ctx, env_seeder.raw(), i % static_cast<int>(cfg.terrain_kinds.size())));

  PpoTrainer trainer(ac, cfg.losses, cfg.ppo, std::move(envs));
  TrainOutputs out;
  out.out_dir = out_dir;
  out.checkpoint_extra = checkpoint_extra(cfg, group);
  out.on_update = cb;
  fs::create_directories(out_dir);
  write_manifest(out_dir + "/manifest.json", "train", file_cfg, seed,
                 {{"group", group}});
  return trainer.train(out);
}

ActorCritic load_policy(const std::string& checkpoint_path) {
  return ActorCritic::from_checkpoint(Checkpoint::load(checkpoint_path));
}

std::vector<std::pair<std::string, std::vector<int>>> backbone_groups(
    const ActorCritic& ac) {
  std::vector<std::pair<std::string, std::vector<int>>> groups;
  auto span = [](int off, int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = off + i;
    return v;
  };
  const PolicyDims& d = ac.dims();
  int off = 0;
  groups.emplace_back("proprioception", span(off, d.obs));
  off += d.obs;
  for (const auto& s : ac.est().slices) {
    groups.emplace_back(s.name + "_estimate", span(off, s.dim));
    off += s.dim;
  }
  if (ac.est().latent_dim > 0) {
    groups.emplace_back("implicit_latent", span(off, ac.est().latent_dim));
    off += ac.est().latent_dim;
  }
  groups.emplace_back("command", span(off, d.cmd));
  return groups;
}

SaliencyReport analyze_policy(const ActorCritic& ac, const RunConfig& cfg,
                              const std::string& out_dir, uint64_t seed) {
  // Collect on-policy backbone inputs from evaluation episodes cycling
  // through the terrain kinds and levels.
  auto ctx = BipedContext::make(cfg);
  const int n_kinds = static_cast<int>(cfg.terrain_kinds.size());
  std::vector<VectorXd> collected;
  Rng ep_rng(seed ^ 0x73616cull);
  const int bb_dim = ac.backbone_input_dim();
  const PolicyDims& d = ac.dims();

  for (int ep = 0; ep < cfg.saliency_episodes; ++ep) {
    BipedEnv env(ctx, ep_rng.raw(), ep % n_kinds);
    env.set_eval_mode(true);
    env.set_fixed_level((ep / n_kinds) % (cfg.terrain.max_level + 1));
    env.reset();
    VectorXd obs(d.obs), hist(d.obs * d.history), priv(d.priv), e(d.e_target),
        cmd(d.cmd);
    ActorCritic::ActorEval ev;
    for (int t = 0; t < cfg.episode_cap_steps; ++t) {
      env.fill_inputs(obs, hist, priv, e, cmd);
      ac.actor_forward(hist, obs, cmd, nullptr, ev);
      VectorXd bb(bb_dim);
      bb.head(d.obs) = obs;
      bb.segment(d.obs, ac.est().est_dim()) = ev.e_hat.col(0);
      bb.segment(d.obs + ac.est().est_dim(), ac.est().latent_dim) = ev.z.col(0);
      bb.tail(d.cmd) = cmd;
      collected.push_back(bb);
      const auto res = env.step(ev.action_mean.col(0));
      if (res.done) break;
    }
  }

  // Evenly subsample N inputs.
  const int total = static_cast<int>(collected.size());
  const int n = std::min(cfg.saliency_samples, total);
  MatrixXd x(bb_dim, n);
  for (int i = 0; i < n; ++i)
    x.col(i) = collected[static_cast<size_t>(
        (static_cast<long>(i) * total) / n)];

  SaliencyConfig scfg;
  scfg.p = cfg.saliency_p;
  scfg.samples = n;
  scfg.groups = backbone_groups(ac);
  MlpDiffFn fn(ac.backbone_spec(), ac.backbone_params(), ac.action_nominal(),
               ac.action_scale());
  SaliencyReport rep = analyze_inputs(fn, x, scfg);
  rep.metadata["group"] = ac.est().group;
  rep.metadata["episodes"] = cfg.saliency_episodes;
  rep.metadata["collected"] = total;

  fs::create_directories(out_dir);
  std::ofstream(out_dir + "/saliency_report.json") << rep.to_json().dump(2)
                                                   << "\n";
  rep.write_group_means_csv(out_dir + "/saliency_pie.csv");
  rep.write_per_sample_csv(out_dir + "/saliency_box.csv");
  return rep;
}

ExperimentPlan ExperimentPlan::load(const Config& c,
                                    const std::string& plan_dir) {
  ExperimentPlan p;
  p.groups = c.get_string_list("plan.groups", comparison_group_names());
  for (const auto& s : c.get_string_list("plan.seeds", {"1", "2", "3"}))
    p.seeds.push_back(std::stoull(s));
  p.train_config = c.get_string("plan.train_config", "");
  if (!p.train_config.empty() && !fs::path(p.train_config).is_absolute())
    p.train_config = (fs::path(plan_dir) / p.train_config).string();
  p.eval_tracking = c.get_bool("plan.eval_tracking", true);
  p.eval_orientation = c.get_bool("plan.eval_orientation", true);
  p.eval_traversal = c.get_bool("plan.eval_traversal", true);
  p.saliency_on_fullest = c.get_bool("plan.saliency_on_fullest", true);
  for (const auto& g : p.groups) make_comparison_group(g);  // validate names
  if (p.groups.empty() || p.seeds.empty())
    throw ConfigError("experiment plan needs at least one group and one seed");
  return p;
}

MetricsRecord evaluate_policy(const ActorCritic& ac, const RunConfig& cfg,
                              const ExperimentPlan& plan, uint64_t seed,
                              double r_final) {
  MetricsRecord rec;
  rec.group = ac.est().group;
  rec.seed = seed;
  rec.r_final = r_final;
  auto ctx = BipedContext::make(cfg);
  const Controller pi = make_policy_controller(ac);
  if (plan.eval_tracking)
    rec.rms_dv = eval_velocity_tracking(pi, ctx, cfg.tracking_trials,
                                        cfg.tracking_duration, seed ^ 0x7472ull);
  if (plan.eval_orientation)
    rec.rms_dg = eval_orientation(pi, ctx, TemplateTrajectory::standard(),
                                  seed ^ 0x6f72ull);
  if (plan.eval_traversal)
    for (TerrainKind k : cfg.terrain_kinds)
      rec.tsr[terrain_kind_name(k)] =
          eval_traversal(pi, ctx, k, cfg.traversal_trials, seed ^ 0x747276ull);
  return rec;
}

std::vector<MetricsRecord> run_comparison(const ExperimentPlan& plan,
                                          const std::string& out_dir) {
  Config train_cfg = plan.train_config.empty()
                         ? Config()
                         : Config::from_file(plan.train_config);
  const RunConfig cfg = RunConfig::load(train_cfg);
  fs::create_directories(out_dir);

  std::vector<MetricsRecord> records;
  for (const auto& group : plan.groups) {
    for (uint64_t seed : plan.seeds) {
      const std::string cell_dir =
          out_dir + "/" + group + "_seed" + std::to_string(seed);
      const std::string ckpt = cell_dir + "/checkpoints/final.bip";
      if (!fs::exists(ckpt)) train_policy(train_cfg, group, seed, cell_dir);
      ActorCritic ac = load_policy(ckpt);
      const double r_final =
          Checkpoint::load(ckpt).header.value("r_final", 0.0);
      MetricsRecord rec = evaluate_policy(ac, cfg, plan, seed, r_final);
      records.push_back(rec);
      if (plan.saliency_on_fullest && group == "FullEst")
        analyze_policy(ac, cfg, cell_dir + "/saliency", seed);
    }
  }
  write_records_csv(records, out_dir + "/records.csv");
  write_table_csv(records, out_dir + "/table.csv");
  return records;
}

void write_records_csv(const std::vector<MetricsRecord>& records,
                       const std::string& path) {
  std::ofstream out(path);
  out << "group,seed,r_final,rms_dv,rms_dg";
  std::vector<std::string> kinds;
  if (!records.empty())
    for (const auto& [k, v] : records.front().tsr) kinds.push_back(k);
  for (const auto& k : kinds) out << ",tsr_" << k;
  out << "\n";
  for (const auto& r : records) {
    out << r.group << "," << r.seed << "," << r.r_final << "," << r.rms_dv
        << "," << r.rms_dg;
    for (const auto& k : kinds) out << "," << r.tsr.at(k);
    out << "\n";
  }
}

void write_table_csv(const std::vector<MetricsRecord>& records,
                     const std::string& path) {
  // Aggregate: groups as columns, metrics as rows, seed-averaged.
  std::vector<std::string> groups;
  for (const auto& r : records)
    if (std::find(groups.begin(), groups.end(), r.group) == groups.end())
      groups.push_back(r.group);
  std::vector<std::string> kinds;
  if (!records.empty())
    for (const auto& [k, v] : records.front().tsr) kinds.push_back(k);

  auto mean_of = [&](const std::string& g, auto getter) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : records)
      if (r.group == g) {
        sum += getter(r);
        ++n;
      }
    return n ? sum / n : 0.0;
  };

  std::ofstream out(path);
  out << "metric";
  for (const auto& g : groups) out << "," << g;
  out << "\n";
  auto row = [&](const std::string& name, auto getter) {
    out << name;
    for (const auto& g : groups) out << "," << mean_of(g, getter);
    out << "\n";
  };
  row("r_final", [](const MetricsRecord& r) { return r.r_final; });
  row("rms_dv", [](const MetricsRecord& r) { return r.rms_dv; });
  row("rms_dg", [](const MetricsRecord& r) { return r.rms_dg; });
  for (const auto& k : kinds)
    row("tsr_" + k, [&](const MetricsRecord& r) { return r.tsr.at(k); });
}

}  // namespace bip
