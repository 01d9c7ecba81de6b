// Acceptance suite: one criterion per numbered check, each printing a
// single [PASS]/[FAIL] line. Run with --criteria N,M,... to select a
// subset; the training matrix (criterion 9) caches checkpoints in the
// workdir so re-runs and criterion 10 reuse them.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bip/env/pointmass_env.hpp"
#include "bip/harness/workflows.hpp"
#include "bip/rl/gae.hpp"
#include "bip/saliency/saliency.hpp"

using namespace bip;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::set<int> criteria;
  std::string workdir = "acceptance_work";
  std::string bip_path = "bip";
  std::string config_dir = "configs";
};

bool g_all_ok = true;

void report(int criterion, bool ok, const std::string& what,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) g_all_ok = false;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- 1
void criterion_kernels() {
  Rng rng(20240901);
  double worst_fixed_point = 0.0;
  bool mono_ok = true, sym_ok = true;
  for (int i = 0; i < 100; ++i) {
    KernelParams p;
    p.alpha = rng.uniform(1e-3, 10.0);
    p.beta = 1 + static_cast<int>(rng.uniform_int(5));
    p.sigma = rng.uniform(1e-3, 50.0);
    worst_fixed_point = std::max(
        {worst_fixed_point, std::abs(cauchy_kernel(p, p.sigma) - p.alpha / 2),
         std::abs(cauchy_kernel(p, -p.sigma) - p.alpha / 2)});
    const double x1 = rng.uniform(0.2 * p.sigma, 6.0 * p.sigma);
    const double x2 = x1 + rng.uniform(0.1 * p.sigma, 3.0 * p.sigma);
    mono_ok = mono_ok && gaussian_kernel(p, x2) < gaussian_kernel(p, x1) &&
              cauchy_kernel(p, x2) < cauchy_kernel(p, x1);
    sym_ok = sym_ok && gaussian_kernel(p, x1) == gaussian_kernel(p, -x1) &&
             cauchy_kernel(p, x1) == cauchy_kernel(p, -x1);
  }
  const bool ok = worst_fixed_point < 1e-12 && mono_ok && sym_ok;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "max |C(+-sigma) - alpha/2| = %.2e, monotone %d, symmetric %d",
                worst_fixed_point, mono_ok, sym_ok);
  report(1, ok, "kernel suite", buf);
}

// ---------------------------------------------------------------- 2
class LinearFn : public DiffFn {
 public:
  explicit LinearFn(MatrixXd w) : w_(std::move(w)) {}
  int input_dim() const override { return static_cast<int>(w_.cols()); }
  int output_dim() const override { return static_cast<int>(w_.rows()); }
  MatrixXd value(const Eigen::Ref<const MatrixXd>& x) const override {
    return w_ * x;
  }
  MatrixXd jacobian(const VectorXd&) const override { return w_; }

 private:
  MatrixXd w_;
};

void criterion_saliency_exact() {
  Rng rng(77);
  // Linear-policy exactness at p = 25.
  MatrixXd w(4, 9);
  for (int i = 0; i < w.size(); ++i) w.data()[i] = rng.normal();
  LinearFn f(w);
  VectorXd x(9);
  for (int i = 0; i < 9; ++i) x[i] = rng.normal();
  SaliencyConfig cfg;
  cfg.p = 25;
  const VectorXd g = integrated_gradient(f, x, cfg);
  double linear_err = 0.0;
  for (int i = 0; i < 9; ++i) {
    double expect = 0.0;
    for (int j = 0; j < 4; ++j) expect += std::abs(w(j, i) * x[i]);
    linear_err = std::max(linear_err, std::abs(g[i] - expect));
  }

  // Hand matrices for the threshold/normalize/importance equations.
  MatrixXd gm(2, 2);
  gm << 1, 3, 2, 6;
  const auto norm = saliency_normalize(gm);
  bool hand_ok = norm.epsilon == 3.0 && norm.s_d(1, 1) == 3.0 &&
                 norm.s(1, 1) == 1.0 && norm.s_d(0, 0) == 0.0 &&
                 norm.s(0, 1) == 0.0;
  MatrixXd s(2, 3);
  s << 2, 1, 3, 2, 1, 1;
  const auto imp = importance(s, {{"a", {0}}, {"b", {1, 2}}});
  hand_ok = hand_ok && std::abs(imp.per_group[0] - 4.0) < 1e-15 &&
            std::abs(imp.per_group[1] - 3.0) < 1e-15 &&
            std::abs(imp.relative[0] - 4.0 / 7.0) < 1e-15 &&
            std::abs(imp.relative[1] - 3.0 / 7.0) < 1e-15;

  // Simplex invariant over 1000 random reports.
  double worst_simplex = 0.0;
  bool nonneg = true;
  for (int rep = 0; rep < 1000; ++rep) {
    MatrixXd gr(5, 7);
    for (int i = 0; i < gr.size(); ++i) gr.data()[i] = std::abs(rng.normal());
    const auto n2 = saliency_normalize(gr);
    const auto i2 =
        importance(n2.s, {{"a", {0, 1}}, {"b", {2, 3, 4}}, {"c", {5, 6}}});
    if (i2.per_group.sum() > 0.0) {
      worst_simplex = std::max(worst_simplex, std::abs(i2.relative.sum() - 1.0));
      for (int o = 0; o < i2.relative.size(); ++o)
        nonneg = nonneg && i2.relative[o] >= 0.0;
    }
  }
  const bool ok =
      linear_err < 1e-10 && hand_ok && worst_simplex < 1e-9 && nonneg;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "linear err %.2e, hand cases %d, simplex dev %.2e",
                linear_err, hand_ok, worst_simplex);
  report(2, ok, "saliency exactness", buf);
}

// ---------------------------------------------------------------- 3
void criterion_completeness() {
  Rng rng(31);
  const MlpSpec spec({48, 256, 128, 64, 4});
  std::vector<double> params(spec.param_count());
  bool mono_ok = true;
  double worst = 0.0;
  for (int net = 0; net < 10; ++net) {
    Rng init(5000 + net);
    mlp_init_orthogonal(spec, params.data(), init, std::sqrt(2.0), 0.5);
    MlpDiffFn f(spec, params.data());
    VectorXd x(48);
    for (int i = 0; i < 48; ++i) x[i] = rng.normal();
    const VectorXd baseline = VectorXd::Zero(48);
    const VectorXd target = f.value(x) - f.value(baseline);
    double prev = 1e300;
    for (int p : {25, 100, 1024}) {
      const MatrixXd ig = integrated_gradient_signed(f, x, p, baseline);
      const double res = (ig.rowwise().sum() - target).norm() / target.norm();
      mono_ok = mono_ok && res < prev;
      if (p == 1024) worst = std::max(worst, res);
      prev = res;
    }
  }
  const bool ok = worst < 0.005 && mono_ok;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "max residual at p=1024: %.4f%%, monotone in p: %d",
                100.0 * worst, mono_ok);
  report(3, ok, "completeness convergence", buf);
}

// ---------------------------------------------------------------- 4
double check_shape(const MlpSpec& spec, Rng& rng, int n_param_samples) {
  std::vector<double> params(spec.param_count());
  Rng init(rng.raw());
  mlp_init_orthogonal(spec, params.data(), init, std::sqrt(2.0), 0.5);
  const int B = 2;
  MatrixXd x(spec.input_dim(), B);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  MatrixXd cot(spec.output_dim(), B);
  for (int i = 0; i < cot.size(); ++i) cot.data()[i] = rng.normal();

  MlpCache cache;
  MatrixXd y;
  mlp_forward(spec, params.data(), x, y, &cache);
  std::vector<double> grad(spec.param_count(), 0.0);
  MatrixXd dx;
  mlp_backward(spec, params.data(), cache, cot, grad.data(), &dx);

  auto loss = [&](const std::vector<double>& pp, const MatrixXd& xx) {
    MatrixXd yy;
    mlp_forward(spec, pp.data(), xx, yy);
    return (yy.array() * cot.array()).sum();
  };
  const double h = 1e-5;
  double max_rel = 0.0;
  for (int s = 0; s < n_param_samples; ++s) {
    const int k = static_cast<int>(rng.uniform_int(spec.param_count()));
    auto pp = params;
    pp[k] += h;
    const double up = loss(pp, x);
    pp[k] -= 2 * h;
    const double dn = loss(pp, x);
    const double fd = (up - dn) / (2 * h);
    max_rel = std::max(max_rel, std::abs(fd - grad[k]) /
                                    std::max({1.0, std::abs(fd),
                                              std::abs(grad[k])}));
  }
  for (int c = 0; c < B; ++c)
    for (int r = 0; r < spec.input_dim(); ++r) {
      MatrixXd xx = x;
      xx(r, c) += h;
      const double up = loss(params, xx);
      xx(r, c) -= 2 * h;
      const double dn = loss(params, xx);
      const double fd = (up - dn) / (2 * h);
      max_rel = std::max(max_rel, std::abs(fd - dx(r, c)) /
                                      std::max({1.0, std::abs(fd),
                                                std::abs(dx(r, c))}));
    }
  return max_rel;
}

void criterion_gradient_checks() {
  const RunConfig cfg = RunConfig::defaults();
  std::set<std::vector<int>> shapes;
  for (const auto& name : comparison_group_names()) {
    ActorCritic ac = make_biped_policy(cfg, name, 1);
    shapes.insert(ac.encoder_spec().widths);
    shapes.insert(ac.backbone_spec().widths);
    shapes.insert(ac.critic_spec().widths);
    if (ac.decoder_spec()) shapes.insert(ac.decoder_spec()->widths);
  }
  Rng rng(1234);
  double worst = 0.0;
  for (const auto& widths : shapes)
    worst = std::max(worst, check_shape(MlpSpec(widths), rng, 200));
  const bool ok = worst < 1e-4;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu shapes, max relative error %.2e",
                shapes.size(), worst);
  report(4, ok, "gradient checks", buf);
}

// ---------------------------------------------------------------- 5
void criterion_gae() {
  Rng rng(42);
  double worst = 0.0;
  bool identities = true;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform_int(100));
    VectorXd r(n), v(n), d(n);
    for (int i = 0; i < n; ++i) {
      r[i] = rng.normal();
      v[i] = rng.normal();
      d[i] = rng.uniform01() < 0.12 ? 1.0 : 0.0;
    }
    const double bootstrap = rng.normal();
    const double gamma = rng.uniform(0.9, 1.0);
    const double lam = rng.uniform(0.0, 1.0);
    VectorXd adv(n), ret(n);
    compute_gae(r, v, d, bootstrap, gamma, lam, adv, ret);
    for (int t = 0; t < n; ++t) {
      double acc = 0.0, wgt = 1.0;
      for (int l = t; l < n; ++l) {
        const double nv = (l + 1 < n) ? v[l + 1] : bootstrap;
        acc += wgt * (r[l] + gamma * (1.0 - d[l]) * nv - v[l]);
        if (d[l] > 0.5) break;
        wgt *= gamma * lam;
      }
      worst = std::max(worst, std::abs(adv[t] - acc));
    }
    // lambda = 0 identity: advantages equal one-step TD residuals.
    VectorXd adv0(n), ret0(n);
    compute_gae(r, v, d, bootstrap, gamma, 0.0, adv0, ret0);
    for (int t = 0; t < n; ++t) {
      const double nv = (t + 1 < n) ? v[t + 1] : bootstrap;
      identities = identities &&
                   adv0[t] == r[t] + gamma * (1.0 - d[t]) * nv - v[t];
    }
    // lambda = 1 telescoping: A_t + V_t equals the discounted reward sum.
    VectorXd adv1(n), ret1(n);
    VectorXd nod = VectorXd::Zero(n);
    compute_gae(r, v, nod, bootstrap, gamma, 1.0, adv1, ret1);
    double disc = bootstrap;
    for (int t = n - 1; t >= 0; --t) {
      disc = r[t] + gamma * disc;
      identities = identities && std::abs(ret1[t] - disc) < 1e-10;
    }
  }
  const bool ok = worst < 1e-10 && identities;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "max |recursive - double sum| = %.2e, identities %d", worst,
                identities);
  report(5, ok, "GAE oracle", buf);
}

// ---------------------------------------------------------------- 6
void criterion_physics() {
  bool ok = true;
  std::string detail;

  {  // Momentum conservation per integration step.
    RobotModel m;
    m.kp.setZero();
    m.kd.setZero();
    SimConfig cfg;
    cfg.gravity = 0.0;
    cfg.physics_dt = 1e-4;
    cfg.control_decimation = 1;
    RobotState s;
    s.q.tail<4>() = m.nominal_joint_q();
    s.q[1] = m.nominal_base_height;
    s.qd << 1.0, 0.5, 0.4, -0.5, 0.3, 0.5, -0.2;
    Vector2d p_prev = linear_momentum(s, m);
    double l_prev = angular_momentum(s, m);
    const double ps = std::max(1.0, p_prev.norm());
    const double ls = std::max(1.0, std::abs(l_prev));
    double worst = 0.0;
    const Eigen::Vector4d hold = s.q.tail<4>();
    for (int i = 0; i < 2000; ++i) {
      s = step(s, hold, m, nullptr, cfg).state;
      const Vector2d p = linear_momentum(s, m);
      const double l = angular_momentum(s, m);
      worst = std::max({worst, (p - p_prev).norm() / ps,
                        std::abs(l - l_prev) / ls});
      p_prev = p;
      l_prev = l;
    }
    ok = ok && worst < 1e-9;
    detail += "momentum drift " + std::to_string(worst);
  }
  {  // Ballistic energy drift over 1 s.
    RobotModel m;
    m.kp.setZero();
    m.kd.setZero();
    SimConfig cfg;
    RobotState s;
    s.q.tail<4>() = m.nominal_joint_q();
    s.q[1] = 50.0;
    s.qd << 1.0, 3.0, 0.8, -0.6, 0.4, 0.6, -0.3;
    const double e0 = total_energy(s, m, cfg.gravity);
    const Eigen::Vector4d hold = s.q.tail<4>();
    double drift = 0.0;
    for (int i = 0; i < 100; ++i) {
      s = step(s, hold, m, nullptr, cfg).state;
      drift = std::max(drift, std::abs(total_energy(s, m, cfg.gravity) - e0) /
                                  std::abs(e0));
    }
    ok = ok && drift < 0.01;
    detail += ", energy drift " + std::to_string(drift);
  }
  {  // Locked-joint pendulum against the analytic equation.
    RobotModel m;
    RobotState s;
    s.q.setZero();
    s.q[3] = 0.4;
    std::array<bool, kNumDof> locked = {true, true, true, false,
                                        true, true, true};
    const double l = m.thigh_length;
    const double I_hip = 2.0 * m.link_inertia(l) +
                         m.link_mass * 0.25 * l * l +
                         m.link_mass * 2.25 * l * l;
    const double mgd = m.link_mass * 9.81 * 2.0 * l;
    double phi = 0.4, w = 0.0, max_err = 0.0;
    const double dt = 1e-3;
    for (int i = 0; i < 2000; ++i) {
      const DofVector acc = forward_dynamics(
          s, Eigen::Vector4d::Zero(), {Vector2d::Zero(), Vector2d::Zero()}, m,
          9.81, &locked);
      s.qd += dt * acc;
      s.q += dt * s.qd;
      w += dt * (-mgd * std::sin(phi) / I_hip);
      phi += dt * w;
      max_err = std::max(max_err, std::abs(s.q[3] - phi));
    }
    ok = ok && max_err < 1e-9;
    detail += ", pendulum err " + std::to_string(max_err);
  }
  report(6, ok, "simulator physics", detail);
}

// ---------------------------------------------------------------- 7
void criterion_determinism(const Options& opt) {
  const std::string d1 = opt.workdir + "/det_run1";
  const std::string d2 = opt.workdir + "/det_run2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  bool ok = true;
  for (const auto& dir : {d1, d2}) {
    const std::string cmd = opt.bip_path + " train --config " +
                            opt.config_dir + "/reference.cfg" +
                            " --group FullEst --seed 7 --max-updates 20 --out " +
                            dir + " > " + dir + ".log 2>&1";
    ok = ok && std::system(cmd.c_str()) == 0;
  }
  std::string detail = "train exit ok";
  if (ok) {
    const std::string m1 = read_file(d1 + "/metrics.jsonl");
    const std::string m2 = read_file(d2 + "/metrics.jsonl");
    const std::string c1 = read_file(d1 + "/checkpoints/final.bip");
    const std::string c2 = read_file(d2 + "/checkpoints/final.bip");
    const bool metrics_same = !m1.empty() && m1 == m2;
    const bool ckpt_same = !c1.empty() && c1 == c2;
    ok = metrics_same && ckpt_same;
    detail = "metrics streams byte-identical: " +
             std::to_string(metrics_same) +
             ", checkpoints byte-identical: " + std::to_string(ckpt_same);
  }
  report(7, ok, "train determinism (seed 7, 20 updates, two runs)", detail);
}

// ---------------------------------------------------------------- 8
EstimationSpec pointmass_spec() {
  EstimationSpec est;
  est.group = "EstNet";
  est.slices = {{"velocity", 0, 1}};
  est.latent_dim = 0;
  est.has_decoder = false;
  est.e_target_dim = 1;
  return est;
}

double pointmass_eval(const ActorCritic& ac) {
  double total = 0.0;
  long count = 0;
  Rng dummy(0);
  for (int ep = 0; ep < 8; ++ep) {
    PointMassEnv env(9000 + ep);
    env.reset();
    const EnvDims d = env.dims();
    VectorXd obs(d.obs), hist(d.obs * d.history), priv(d.priv), e(d.e_target),
        cmd(d.cmd);
    for (int t = 0; t < 100; ++t) {
      env.fill_inputs(obs, hist, priv, e, cmd);
      const auto act = ac.act(hist, obs, cmd, dummy, false);
      const auto res = env.step(act.action);
      total += res.reward;
      ++count;
      if (res.done) break;
    }
  }
  return total / count;
}

void criterion_training_smoke() {
  PolicyDims dims;
  dims.obs = 1;
  dims.cmd = 1;
  dims.priv = 1;
  dims.e_target = 1;
  dims.action = 1;
  dims.history = kHistoryLen;
  NetWidths w;
  w.encoder_hidden = {16, 8};
  w.backbone_hidden = {16, 8};
  w.critic_hidden = {16, 8};
  Rng rng(20240902);
  ActorCritic ac(dims, pointmass_spec(), w, VectorXd::Zero(1),
                 VectorXd::Ones(1), 0.1, rng);

  PpoConfig cfg;
  cfg.num_envs = 256;
  cfg.horizon = 50;
  cfg.seed = 11;
  Rng seeder(11);
  std::vector<std::unique_ptr<Env>> envs;
  for (int i = 0; i < cfg.num_envs; ++i)
    envs.push_back(std::make_unique<PointMassEnv>(seeder.raw()));
  PpoTrainer trainer(ac, LossWeights{}, cfg, std::move(envs));

  const double max_r = PointMassEnv(0).max_step_reward();
  double best = 0.0;
  int reached_at = -1;
  RolloutBuffer buf;
  for (int upd = 1; upd <= 300; ++upd) {
    trainer.collect_rollouts(buf);
    trainer.update(buf);
    if (upd % 5 == 0 || upd == 1) {
      const double score = pointmass_eval(ac);
      best = std::max(best, score);
      if (score >= 0.9 * max_r) {
        reached_at = upd;
        break;
      }
    }
  }
  const bool ok = reached_at > 0;
  char buf2[160];
  std::snprintf(buf2, sizeof(buf2),
                "deterministic eval mean r_v %.4f of max %.2f%s", best, max_r,
                ok ? (", reached 90% at update " + std::to_string(reached_at))
                         .c_str()
                   : ", never reached 90% within 300 updates");
  report(8, ok, "point-mass training smoke", buf2);
}

// ------------------------------------------------------------- 9 / 10
struct Cell {
  std::string group;
  uint64_t seed;
  std::string dir;
};

std::vector<Cell> matrix_cells(const Options& opt) {
  std::vector<Cell> cells;
  for (const auto& g : comparison_group_names())
    for (uint64_t seed : {1ull, 2ull, 3ull})
      cells.push_back(
          {g, seed,
           opt.workdir + "/matrix/" + g + "_seed" + std::to_string(seed)});
  return cells;
}

void ensure_cell(const Options& opt, const Cell& cell) {
  const std::string final_ckpt = cell.dir + "/checkpoints/final.bip";
  if (fs::exists(final_ckpt)) return;
  std::printf("  training %s seed %llu ...\n", cell.group.c_str(),
              static_cast<unsigned long long>(cell.seed));
  std::fflush(stdout);
  const Config cfg = Config::from_file(opt.config_dir + "/acceptance.cfg");
  train_policy(cfg, cell.group, cell.seed, cell.dir);
}

void criterion_directional(const Options& opt) {
  const Config file_cfg = Config::from_file(opt.config_dir + "/acceptance.cfg");
  const RunConfig cfg = RunConfig::load(file_cfg);
  auto ctx = BipedContext::make(cfg);

  std::map<std::string, std::vector<double>> rms, rfinal;
  for (const auto& cell : matrix_cells(opt)) {
    ensure_cell(opt, cell);
    const std::string ckpt = cell.dir + "/checkpoints/final.bip";
    ActorCritic ac = load_policy(ckpt);
    rfinal[cell.group].push_back(
        Checkpoint::load(ckpt).header.value("r_final", 0.0));
    const std::string cache = cell.dir + "/rms_dv.txt";
    double v;
    if (fs::exists(cache)) {
      std::ifstream(cache) >> v;
    } else {
      v = eval_velocity_tracking(make_policy_controller(ac), ctx,
                                 cfg.tracking_trials, cfg.tracking_duration,
                                 cell.seed ^ 0x7472ull);
      std::ofstream out(cache);
      out.precision(17);
      out << v << "\n";
    }
    rms[cell.group].push_back(v);
    std::printf("  %s seed %llu: rms_dv %.4f, r_final %.1f\n",
                cell.group.c_str(),
                static_cast<unsigned long long>(cell.seed), v,
                rfinal[cell.group].back());
    std::fflush(stdout);
  }

  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
  };
  const double rms_with_velocity =
      (mean(rms["EstNet"]) + mean(rms["Key1"]) + mean(rms["Key2"]) +
       mean(rms["FullEst"])) /
      4.0;
  const double rms_without_velocity =
      (mean(rms["IrrEst"]) + mean(rms["Implicit"])) / 2.0;
  const bool gap_ok = rms_with_velocity < rms_without_velocity;

  double rf_min = 1e300, rf_max = -1e300;
  for (const auto& g : comparison_group_names()) {
    const double m = mean(rfinal[g]);
    rf_min = std::min(rf_min, m);
    rf_max = std::max(rf_max, m);
  }
  const double spread = (rf_max - rf_min) / rf_max;
  const bool reward_ok = spread <= 0.05;

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "mean RMS dv with velocity estimation %.4f vs without %.4f; "
                "final-reward spread %.2f%%",
                rms_with_velocity, rms_without_velocity, 100.0 * spread);
  report(9, gap_ok && reward_ok, "directional reproduction (6 groups x 3 seeds)",
         buf);
}

void criterion_saliency_rank(const Options& opt) {
  const Config file_cfg = Config::from_file(opt.config_dir + "/acceptance.cfg");
  const RunConfig cfg = RunConfig::load(file_cfg);
  int first = 0, total = 0;
  std::string detail;
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    Cell cell{"FullEst", seed,
              opt.workdir + "/matrix/FullEst_seed" + std::to_string(seed)};
    ensure_cell(opt, cell);
    ActorCritic ac = load_policy(cell.dir + "/checkpoints/final.bip");
    const SaliencyReport rep =
        analyze_policy(ac, cfg, cell.dir + "/saliency", seed);
    // Rank the four estimation-input groups by mean per-sample iota.
    std::map<std::string, double> iota;
    for (size_t o = 0; o < rep.imp.group_names.size(); ++o)
      iota[rep.imp.group_names[o]] = rep.per_sample_iota.col(o).mean();
    const double vel = iota.at("velocity_estimate");
    const bool is_first = vel > iota.at("height_estimate") &&
                          vel > iota.at("foot_heightmap_estimate") &&
                          vel > iota.at("implicit_latent");
    first += is_first;
    ++total;
    detail += "seed " + std::to_string(seed) + (is_first ? ": vel first; " : ": vel not first; ");
  }
  const bool ok = first >= 2;
  report(10, ok,
         "saliency ranking (velocity first among estimation groups)",
         detail + std::to_string(first) + "/" + std::to_string(total));
}

// ---------------------------------------------------------------- 11
void criterion_integration(const Options& opt) {
  const std::string out = opt.workdir + "/smoke_compare";
  fs::remove_all(out);
  const std::string cmd = opt.bip_path + " compare --plan " + opt.config_dir +
                          "/smoke_plan.cfg --out " + out + " > " + out +
                          ".log 2>&1";
  const int rc = std::system(cmd.c_str());
  const bool table = fs::exists(out + "/table.csv");
  const bool records = fs::exists(out + "/records.csv");
  const bool saliency = fs::exists(out + "/FullEst_seed1/saliency/saliency_pie.csv");
  const bool ok = rc == 0 && table && records && saliency;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "exit %d, table.csv %d, records.csv %d, saliency csv %d", rc,
                table, records, saliency);
  report(11, ok, "end-to-end compare smoke plan", buf);
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "missing value for %s\n", arg.c_str());
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--criteria") {
      std::stringstream ss(next());
      std::string item;
      while (std::getline(ss, item, ',')) opt.criteria.insert(std::stoi(item));
    } else if (arg == "--workdir") {
      opt.workdir = next();
    } else if (arg == "--bip") {
      opt.bip_path = next();
    } else if (arg == "--config-dir") {
      opt.config_dir = next();
    } else {
      std::fprintf(stderr, "unknown argument: %s\n", arg.c_str());
      return 2;
    }
  }
  if (opt.criteria.empty())
    opt.criteria = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  fs::create_directories(opt.workdir);

  auto want = [&](int c) { return opt.criteria.count(c) > 0; };
  try {
    if (want(1)) criterion_kernels();
    if (want(2)) criterion_saliency_exact();
    if (want(3)) criterion_completeness();
    if (want(4)) criterion_gradient_checks();
    if (want(5)) criterion_gae();
    if (want(6)) criterion_physics();
    if (want(7)) criterion_determinism(opt);
    if (want(8)) criterion_training_smoke();
    if (want(9)) criterion_directional(opt);
    if (want(10)) criterion_saliency_rank(opt);
    if (want(11)) criterion_integration(opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
    return 1;
  }
  return g_all_ok ? 0 : 1;
}
