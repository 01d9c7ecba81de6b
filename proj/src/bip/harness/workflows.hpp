#pragma once

#include <map>
#include <string>

#include "bip/env/biped_env.hpp"
#include "bip/harness/eval.hpp"
#include "bip/rl/ppo.hpp"
#include "bip/saliency/saliency.hpp"

namespace bip {

// Manifest written beside every output: command line, resolved config,
// seed, code version.
void write_manifest(const std::string& path, const std::string& command,
                    const Config& cfg, uint64_t seed,
                    const nlohmann::json& extra = {});

// Builds the policy for a comparison group with the configured widths and
// the biped action parameterization.
ActorCritic make_biped_policy(const RunConfig& cfg, const std::string& group,
                              uint64_t seed);

// Trains one (group, seed) cell; writes metrics stream, checkpoints and a
// manifest under out_dir. Returns the final checkpoint path.
std::string train_policy(const Config& file_cfg, const std::string& group,
                         uint64_t seed, const std::string& out_dir,
                         const std::function<bool(const TrainDiag&)>& cb = {});

ActorCritic load_policy(const std::string& checkpoint_path);

// Saliency input groups for a policy's backbone: proprioception, one group
// per explicit estimation slice, the implicit latent, and the command.
std::vector<std::pair<std::string, std::vector<int>>> backbone_groups(
    const ActorCritic& ac);

// Rolls out the deterministic policy over evaluation episodes across the
// terrain bank, collects on-policy backbone inputs and runs the full
// integrated-gradients analysis. Writes report.json, saliency_pie.csv and
// saliency_box.csv under out_dir.
SaliencyReport analyze_policy(const ActorCritic& ac, const RunConfig& cfg,
                              const std::string& out_dir, uint64_t seed);

struct ExperimentPlan {
  std::vector<std::string> groups;
  std::vector<uint64_t> seeds;
  std::string train_config;  // path to the training config file
  bool eval_tracking = true;
  bool eval_orientation = true;
  bool eval_traversal = true;
  bool saliency_on_fullest = true;

  static ExperimentPlan load(const Config& c, const std::string& plan_dir);
};

struct MetricsRecord {
  std::string group;
  uint64_t seed = 0;
  double r_final = 0.0;
  double rms_dv = 0.0;
  double rms_dg = 0.0;
  std::map<std::string, double> tsr;  // per terrain kind
};

// Trains (or loads) each group x seed cell, runs the evaluation suite and
// writes per-seed records plus the aggregate group table as CSV.
std::vector<MetricsRecord> run_comparison(const ExperimentPlan& plan,
                                          const std::string& out_dir);

MetricsRecord evaluate_policy(const ActorCritic& ac, const RunConfig& cfg,
                              const ExperimentPlan& plan, uint64_t seed,
                              double r_final);

void write_records_csv(const std::vector<MetricsRecord>& records,
                       const std::string& path);
void write_table_csv(const std::vector<MetricsRecord>& records,
                     const std::string& path);

}  // namespace bip
