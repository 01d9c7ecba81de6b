#include "bip/saliency/saliency.hpp"

#include <fstream>
#include <stdexcept>

namespace bip {

void DiffFn::jacobians(const Eigen::Ref<const MatrixXd>& x,
                       std::vector<MatrixXd>& jac) const {
  jac.resize(x.cols());
  for (int k = 0; k < x.cols(); ++k) jac[k] = jacobian(x.col(k));
}

MatrixXd DiffFn::jacobian(const VectorXd& x) const {
  std::vector<MatrixXd> jac;
  jacobians(x, jac);
  return jac[0];
}

MatrixXd MlpDiffFn::value(const Eigen::Ref<const MatrixXd>& x) const {
  MatrixXd y;
  mlp_forward(spec_, params_, x, y);
  if (squash_)
    y = (y.array().tanh().colwise() * scale_.array()).colwise() +
        nominal_.array();
  return y;
}

void MlpDiffFn::jacobians(const Eigen::Ref<const MatrixXd>& x,
                          std::vector<MatrixXd>& jac) const {
  const int B = static_cast<int>(x.cols());
  const int m = output_dim();
  const int n = input_dim();
  MlpCache cache;
  MatrixXd y;
  mlp_forward(spec_, params_, x, y, &cache);
  jac.assign(B, MatrixXd(m, n));
  // One batched backward pass per output row.
  MatrixXd dy = MatrixXd::Zero(m, B);
  MatrixXd dx;
  std::vector<double> scratch(spec_.param_count());
  for (int j = 0; j < m; ++j) {
    dy.setZero();
    // With the squash, the cotangent row carries d/dz of
    // nominal + scale * tanh(z) at the pre-squash output z.
    for (int k = 0; k < B; ++k)
      dy(j, k) = squash_ ? scale_[j] * (1.0 - std::pow(std::tanh(y(j, k)), 2))
                         : 1.0;
    std::fill(scratch.begin(), scratch.end(), 0.0);
    mlp_backward(spec_, params_, cache, dy, scratch.data(), &dx);
    for (int k = 0; k < B; ++k) jac[k].row(j) = dx.col(k).transpose();
  }
}

VectorXd integrated_gradient(const DiffFn& f, const VectorXd& x,
                             const SaliencyConfig& cfg) {
  const int n = f.input_dim();
  if (x.size() != n)
    throw std::invalid_argument("integrated_gradient: input width mismatch");
  VectorXd baseline = cfg.baseline.size() ? cfg.baseline : VectorXd::Zero(n);
  if (baseline.size() != n)
    throw std::invalid_argument("integrated_gradient: baseline width mismatch");
  const MatrixXd ig = integrated_gradient_signed(f, x, cfg.p, baseline);
  VectorXd g = ig.cwiseAbs().colwise().sum().transpose();
  if (!g.allFinite())
    throw std::runtime_error("integrated_gradient: non-finite gradient");
  return g;
}

MatrixXd integrated_gradient_signed(const DiffFn& f, const VectorXd& x, int p,
                                    const VectorXd& baseline) {
  const int n = f.input_dim();
  const int m = f.output_dim();
  MatrixXd path(n, p);
  for (int k = 1; k <= p; ++k) {
    const double a = static_cast<double>(k) / p;
    path.col(k - 1) = (1.0 - a) * baseline + a * x;
  }
  std::vector<MatrixXd> jac;
  f.jacobians(path, jac);
  MatrixXd sum = MatrixXd::Zero(m, n);
  for (const auto& j : jac) sum += j;
  const VectorXd scale = (x - baseline) / static_cast<double>(p);
  return sum.array().rowwise() * scale.transpose().array();
}

SaliencyNormalized saliency_normalize(const Eigen::Ref<const MatrixXd>& g) {
  SaliencyNormalized out;
  out.epsilon = g.mean();
  out.s_d = (g.array() - out.epsilon).max(0.0);
  const double smax = out.s_d.maxCoeff();
  if (smax > 0.0) {
    out.s = out.s_d / smax;
  } else {
    out.s = MatrixXd::Zero(g.rows(), g.cols());
    out.degenerate = true;
  }
  return out;
}

ImportanceResult importance(
    const Eigen::Ref<const MatrixXd>& s,
    const std::vector<std::pair<std::string, std::vector<int>>>& groups) {
  const int n = static_cast<int>(s.cols());
  std::vector<bool> seen(n, false);
  int covered = 0;
  for (const auto& [name, idx] : groups)
    for (int i : idx) {
      if (i < 0 || i >= n || seen[i])
        throw std::invalid_argument("saliency groups do not partition inputs");
      seen[i] = true;
      ++covered;
    }
  if (covered != n)
    throw std::invalid_argument("saliency groups do not partition inputs");

  ImportanceResult r;
  r.per_element = s.colwise().sum().transpose();
  r.per_group.resize(groups.size());
  for (size_t o = 0; o < groups.size(); ++o) {
    double acc = 0.0;
    for (int i : groups[o].second) acc += r.per_element[i];
    r.per_group[o] = acc / groups[o].second.size();
    r.group_names.push_back(groups[o].first);
  }
  const double total = r.per_group.sum();
  r.relative = total > 0.0 ? VectorXd(r.per_group / total)
                           : VectorXd(VectorXd::Zero(groups.size()));
  return r;
}

SaliencyReport analyze_inputs(const DiffFn& f,
                              const Eigen::Ref<const MatrixXd>& x,
                              const SaliencyConfig& cfg) {
  const int N = static_cast<int>(x.cols());
  SaliencyReport rep;
  rep.g.resize(N, f.input_dim());
  for (int t = 0; t < N; ++t)
    rep.g.row(t) = integrated_gradient(f, x.col(t), cfg).transpose();
  rep.norm = saliency_normalize(rep.g);
  rep.imp = importance(rep.norm.s, cfg.groups);

  // Per-sample relative importance for distribution plots: Eqs. restricted
  // to a single timestep, sharing the global threshold and normalization.
  rep.per_sample_iota.resize(N, static_cast<Eigen::Index>(cfg.groups.size()));
  for (int t = 0; t < N; ++t) {
    VectorXd io(cfg.groups.size());
    for (size_t o = 0; o < cfg.groups.size(); ++o) {
      double acc = 0.0;
      for (int i : cfg.groups[o].second) acc += rep.norm.s(t, i);
      io[o] = acc / cfg.groups[o].second.size();
    }
    const double tot = io.sum();
    rep.per_sample_iota.row(t) =
        tot > 0.0 ? VectorXd(io / tot).transpose()
                  : VectorXd(VectorXd::Zero(io.size())).transpose();
  }

  rep.metadata["p"] = cfg.p;
  rep.metadata["samples"] = N;
  rep.metadata["degenerate"] = rep.norm.degenerate;
  return rep;
}

nlohmann::json SaliencyReport::to_json() const {
  nlohmann::json j;
  j["metadata"] = metadata;
  j["epsilon"] = norm.epsilon;
  j["degenerate"] = norm.degenerate;
  j["groups"] = nlohmann::json::array();
  for (size_t o = 0; o < imp.group_names.size(); ++o) {
    nlohmann::json g;
    g["name"] = imp.group_names[o];
    g["importance"] = imp.per_group[o];
    g["relative_importance"] = imp.relative[o];
    // Distribution stats of the per-sample relative importance.
    VectorXd col = per_sample_iota.col(o);
    std::vector<double> v(col.data(), col.data() + col.size());
    std::sort(v.begin(), v.end());
    auto q = [&](double f) {
      return v[static_cast<size_t>(f * (v.size() - 1))];
    };
    g["iota_mean"] = col.mean();
    g["iota_q25"] = q(0.25);
    g["iota_median"] = q(0.5);
    g["iota_q75"] = q(0.75);
    j["groups"].push_back(g);
  }
  j["per_element_importance"] =
      std::vector<double>(imp.per_element.data(),
                          imp.per_element.data() + imp.per_element.size());
  return j;
}

void SaliencyReport::write_group_means_csv(const std::string& path) const {
  std::ofstream out(path);
  out << "group,importance,relative_importance,iota_mean\n";
  for (size_t o = 0; o < imp.group_names.size(); ++o)
    out << imp.group_names[o] << "," << imp.per_group[o] << ","
        << imp.relative[o] << "," << per_sample_iota.col(o).mean() << "\n";
}

void SaliencyReport::write_per_sample_csv(const std::string& path) const {
  std::ofstream out(path);
  out << "sample";
  for (const auto& n : imp.group_names) out << "," << n;
  out << "\n";
  for (int t = 0; t < per_sample_iota.rows(); ++t) {
    out << t;
    for (int o = 0; o < per_sample_iota.cols(); ++o)
      out << "," << per_sample_iota(t, o);
    out << "\n";
  }
}

}  // namespace bip
