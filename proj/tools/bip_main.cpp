// Command-line front end: train / eval / saliency / compare / plot-data /
// dump-checkpoint. Exit codes: 0 success, 2 config error, 3 checkpoint
// mismatch, 4 runtime fault.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "bip/harness/workflows.hpp"

namespace fs = std::filesystem;
using namespace bip;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCheckpoint = 3;
constexpr int kExitRuntime = 4;

Config load_config_file(const std::string& path) {
  if (path.empty()) return Config();
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
  return Config::from_file(path);
}

int cmd_train(const std::string& config_path, const std::string& group,
              uint64_t seed, int max_updates, const std::string& out_dir) {
  Config cfg = load_config_file(config_path);
  if (max_updates >= 0)
    cfg.set("ppo.max_updates", std::to_string(max_updates));
  make_comparison_group(group);  // validate the name early
  const std::string final_ckpt = train_policy(cfg, group, seed, out_dir);
  std::cout << "final checkpoint: " << final_ckpt << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& ckpt_path, const std::string& config_path,
             const std::string& suite, uint64_t seed,
             const std::string& out_path) {
  if (!fs::exists(ckpt_path))
    throw CheckpointError("checkpoint not found: " + ckpt_path);
  Config file_cfg = load_config_file(config_path);
  const RunConfig cfg = RunConfig::load(file_cfg);
  ActorCritic ac = load_policy(ckpt_path);
  const double r_final = Checkpoint::load(ckpt_path).header.value("r_final", 0.0);

  ExperimentPlan plan;
  plan.eval_tracking = suite == "tracking" || suite == "all";
  plan.eval_orientation = suite == "orientation" || suite == "all";
  plan.eval_traversal = suite == "traversal" || suite == "all";
  if (!plan.eval_tracking && !plan.eval_orientation && !plan.eval_traversal)
    throw ConfigError("unknown eval suite: " + suite);
  const MetricsRecord rec = evaluate_policy(ac, cfg, plan, seed, r_final);

  nlohmann::json j;
  j["group"] = rec.group;
  j["seed"] = rec.seed;
  j["r_final"] = rec.r_final;
  if (plan.eval_tracking) j["rms_dv"] = rec.rms_dv;
  if (plan.eval_orientation) j["rms_dg"] = rec.rms_dg;
  for (const auto& [k, v] : rec.tsr) j["tsr_" + k] = v;
  std::cout << j.dump(2) << "\n";
  if (!out_path.empty()) {
    fs::create_directories(fs::path(out_path).parent_path().empty()
                               ? "."
                               : fs::path(out_path).parent_path().string());
    std::ofstream(out_path) << j.dump(2) << "\n";
    write_manifest(out_path + ".manifest.json", "eval", file_cfg, seed,
                   {{"checkpoint", ckpt_path}, {"suite", suite}});
  }
  return kExitOk;
}

int cmd_saliency(const std::string& ckpt_path, const std::string& config_path,
                 int samples, const std::string& out_dir, uint64_t seed,
                 bool allow_any_group) {
  if (!fs::exists(ckpt_path))
    throw CheckpointError("checkpoint not found: " + ckpt_path);
  Config file_cfg = load_config_file(config_path);
  RunConfig cfg = RunConfig::load(file_cfg);
  if (samples > 0) cfg.saliency_samples = samples;
  ActorCritic ac = load_policy(ckpt_path);
  if (!allow_any_group && ac.est().group != "FullEst")
    throw CheckpointError(
        "saliency expects a FullEst checkpoint (got " + ac.est().group +
        "); pass --allow-any-group to analyze the available slices");
  const SaliencyReport rep = analyze_policy(ac, cfg, out_dir, seed);
  write_manifest(out_dir + "/manifest.json", "saliency", file_cfg, seed,
                 {{"checkpoint", ckpt_path}});
  for (size_t o = 0; o < rep.imp.group_names.size(); ++o)
    std::cout << rep.imp.group_names[o] << ": iota=" << rep.imp.relative[o]
              << "\n";
  return kExitOk;
}

int cmd_compare(const std::string& plan_path, const std::string& out_dir) {
  if (!fs::exists(plan_path))
    throw ConfigError("plan file not found: " + plan_path);
  Config plan_cfg = Config::from_file(plan_path);
  const ExperimentPlan plan =
      ExperimentPlan::load(plan_cfg, fs::path(plan_path).parent_path().string());
  const auto records = run_comparison(plan, out_dir);
  write_manifest(out_dir + "/manifest.json", "compare", plan_cfg, 0,
                 {{"plan", plan_path}});
  std::cout << "wrote " << records.size() << " records to " << out_dir
            << "/records.csv and table.csv\n";
  return kExitOk;
}

int cmd_plot_data(const std::string& in_path, const std::string& out_path) {
  if (!fs::exists(in_path)) throw ConfigError("input not found: " + in_path);
  std::ifstream in(in_path);
  std::ofstream out(out_path);
  if (in_path.size() > 6 && in_path.substr(in_path.size() - 6) == ".jsonl") {
    // Metrics stream to a wide CSV: union of keys over all records.
    std::vector<nlohmann::json> recs;
    std::string line;
    std::vector<std::string> keys;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      recs.push_back(nlohmann::json::parse(line));
      for (auto it = recs.back().begin(); it != recs.back().end(); ++it)
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
          keys.push_back(it.key());
    }
    std::sort(keys.begin(), keys.end());
    for (size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
    out << "\n";
    for (const auto& r : recs) {
      for (size_t i = 0; i < keys.size(); ++i) {
        if (i) out << ",";
        if (r.contains(keys[i])) out << r[keys[i]].dump();
      }
      out << "\n";
    }
  } else {
    // Saliency report JSON to a per-group CSV.
    nlohmann::json j = nlohmann::json::parse(in);
    if (!j.contains("groups"))
      throw ConfigError("unrecognized report format: " + in_path);
    out << "group,importance,relative_importance,iota_mean,iota_q25,iota_"
           "median,iota_q75\n";
    for (const auto& g : j["groups"])
      out << g["name"].get<std::string>() << "," << g["importance"] << ","
          << g["relative_importance"] << "," << g["iota_mean"] << ","
          << g["iota_q25"] << "," << g["iota_median"] << "," << g["iota_q75"]
          << "\n";
  }
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_dump_checkpoint(const std::string& ckpt_path,
                        const std::string& out_path) {
  if (!fs::exists(ckpt_path))
    throw CheckpointError("checkpoint not found: " + ckpt_path);
  const Checkpoint ck = Checkpoint::load(ckpt_path);
  std::cout << ck.header.dump(2) << "\n";
  std::ofstream out(out_path);
  out << "index,value\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < ck.params.size(); ++i)
    out << i << "," << ck.params[i] << "\n";
  std::cout << "wrote " << ck.params.size() << " parameters to " << out_path
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar biped estimation-policy workbench"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "runs/out", group = "FullEst";
  uint64_t seed = 1;
  int max_updates = -1;

  auto* train = app.add_subcommand("train", "train one policy");
  train->add_option("--config", config_path, "config file");
  train->add_option("--group", group, "comparison group name");
  train->add_option("--seed", seed, "rng seed");
  train->add_option("--max-updates", max_updates, "override ppo.max_updates");
  train->add_option("--out", out_dir, "output directory");

  std::string ckpt_path, suite = "all", eval_out;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  eval->add_option("--config", config_path, "config file");
  eval->add_option("--suite", suite, "tracking|orientation|traversal|all");
  eval->add_option("--seed", seed, "rng seed");
  eval->add_option("--out", eval_out, "result JSON path");

  int samples = -1;
  bool allow_any_group = false;
  auto* sal = app.add_subcommand("saliency", "integrated-gradients analysis");
  sal->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  sal->add_option("--config", config_path, "config file");
  sal->add_option("--samples", samples, "number of sampled inputs");
  sal->add_option("--seed", seed, "rng seed");
  sal->add_option("--out", out_dir, "output directory");
  sal->add_flag("--allow-any-group", allow_any_group,
                "analyze non-FullEst checkpoints");

  std::string plan_path;
  auto* cmp = app.add_subcommand("compare", "run a comparison plan");
  cmp->add_option("--plan", plan_path, "plan config file")->required();
  cmp->add_option("--out", out_dir, "output directory");

  std::string in_path, out_path = "plot.csv";
  auto* plot = app.add_subcommand("plot-data", "re-emit a report as CSV");
  plot->add_option("--in", in_path, "metrics.jsonl or saliency_report.json")
      ->required();
  plot->add_option("--out", out_path, "output CSV path");

  auto* dump = app.add_subcommand("dump-checkpoint", "checkpoint to CSV");
  dump->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  dump->add_option("--out", out_path, "output CSV path");

  try {
    app.parse(argc, argv);
    if (train->parsed())
      return cmd_train(config_path, group, seed, max_updates, out_dir);
    if (eval->parsed())
      return cmd_eval(ckpt_path, config_path, suite, seed, eval_out);
    if (sal->parsed())
      return cmd_saliency(ckpt_path, config_path, samples, out_dir, seed,
                          allow_any_group);
    if (cmp->parsed()) return cmd_compare(plan_path, out_dir);
    if (plot->parsed()) return cmd_plot_data(in_path, out_path);
    if (dump->parsed()) return cmd_dump_checkpoint(ckpt_path, out_path);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitCheckpoint;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
