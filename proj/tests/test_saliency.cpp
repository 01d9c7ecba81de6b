#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bip/saliency/saliency.hpp"

using namespace bip;

namespace {

// Arbitrary differentiable map defined by a dense matrix (plus optional
// constant): F(x) = W x + c.
class LinearFn : public DiffFn {
 public:
  LinearFn(MatrixXd w, VectorXd c) : w_(std::move(w)), c_(std::move(c)) {}
  int input_dim() const override { return static_cast<int>(w_.cols()); }
  int output_dim() const override { return static_cast<int>(w_.rows()); }
  MatrixXd value(const Eigen::Ref<const MatrixXd>& x) const override {
    return (w_ * x).colwise() + c_;
  }
  MatrixXd jacobian(const VectorXd&) const override { return w_; }

 private:
  MatrixXd w_;
  VectorXd c_;
};

MlpSpec deployed_backbone() { return MlpSpec({48, 256, 128, 64, 4}); }

}  // namespace

TEST_CASE("constant policy has zero integrated gradients") {
  LinearFn f(MatrixXd::Zero(3, 5), VectorXd::Constant(3, 2.0));
  SaliencyConfig cfg;
  cfg.p = 25;
  const VectorXd g = integrated_gradient(f, VectorXd::Random(5), cfg);
  CHECK(g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear policy: exact attribution sum_j |W_ji x_i| at p = 25") {
  Rng rng(3);
  MatrixXd w(4, 6);
  for (int i = 0; i < w.size(); ++i) w.data()[i] = rng.normal();
  LinearFn f(w, VectorXd::Zero(4));
  VectorXd x(6);
  for (int i = 0; i < 6; ++i) x[i] = rng.normal();
  SaliencyConfig cfg;
  cfg.p = 25;
  const VectorXd g = integrated_gradient(f, x, cfg);
  for (int i = 0; i < 6; ++i) {
    double expect = 0.0;
    for (int j = 0; j < 4; ++j) expect += std::abs(w(j, i) * x[i]);
    CHECK(std::abs(g[i] - expect) < 1e-10);
  }
  // Exact for any p >= 1 on linear maps.
  cfg.p = 1;
  const VectorXd g1 = integrated_gradient(f, x, cfg);
  CHECK((g1 - g).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("completeness: signed path integral converges to F(x) - F(0)") {
  Rng rng(11);
  const MlpSpec spec = deployed_backbone();
  std::vector<double> params(spec.param_count());

  for (int net = 0; net < 10; ++net) {
    for (auto& v : params) v = 0.05 * rng.normal();
    // Give hidden layers orthogonal-style structure for realistic scale.
    Rng init(100 + net);
    mlp_init_orthogonal(spec, params.data(), init, std::sqrt(2.0), 0.5);
    MlpDiffFn f(spec, params.data());
    VectorXd x(48);
    for (int i = 0; i < 48; ++i) x[i] = rng.normal();
    const VectorXd baseline = VectorXd::Zero(48);
    const VectorXd target =
        f.value(x) - f.value(baseline);

    double prev_residual = 1e300;
    for (int p : {25, 100, 1024}) {
      const MatrixXd ig = integrated_gradient_signed(f, x, p, baseline);
      const VectorXd sum = ig.rowwise().sum();
      const double residual = (sum - target).norm() / target.norm();
      CHECK(residual < prev_residual);  // monotone in p
      if (p == 1024) CHECK(residual < 0.005);
      prev_residual = residual;
    }
  }
}

TEST_CASE("normalization: hand matrix from the threshold equations") {
  MatrixXd g(2, 2);
  g << 1.0, 3.0, 2.0, 6.0;
  const SaliencyNormalized n = saliency_normalize(g);
  CHECK(n.epsilon == doctest::Approx(3.0));
  MatrixXd sd_expect(2, 2);
  sd_expect << 0.0, 0.0, 0.0, 3.0;
  CHECK((n.s_d - sd_expect).cwiseAbs().maxCoeff() == 0.0);
  MatrixXd s_expect(2, 2);
  s_expect << 0.0, 0.0, 0.0, 1.0;
  CHECK((n.s - s_expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(n.degenerate);
}

TEST_CASE("normalization edge cases: all equal, single spike, degenerate") {
  const SaliencyNormalized flat = saliency_normalize(MatrixXd::Constant(3, 4, 2.5));
  CHECK(flat.s_d.cwiseAbs().maxCoeff() == 0.0);
  CHECK(flat.degenerate);
  CHECK(flat.s.cwiseAbs().maxCoeff() == 0.0);

  MatrixXd g = MatrixXd::Zero(3, 3);
  g(1, 2) = 7.0;
  const SaliencyNormalized spike = saliency_normalize(g);
  CHECK(spike.s(1, 2) == doctest::Approx(1.0));
  CHECK(spike.s.sum() == doctest::Approx(1.0));
}

TEST_CASE("importance: hand cases and relabeling equivariance") {
  // chi = 1: iota = 1.
  {
    MatrixXd s = MatrixXd::Random(5, 3).cwiseAbs();
    const auto r = importance(s, {{"all", {0, 1, 2}}});
    CHECK(r.relative.size() == 1);
    CHECK(r.relative[0] == doctest::Approx(1.0));
  }
  // Sizes (1, 2) with element importances (4) and (2, 4):
  // I_group = (4, 3), iota = (4/7, 3/7).
  {
    MatrixXd s(2, 3);
    s << 2.0, 1.0, 3.0, 2.0, 1.0, 1.0;  // column sums: 4, 2, 4
    const auto r = importance(s, {{"a", {0}}, {"b", {1, 2}}});
    CHECK(r.per_element[0] == doctest::Approx(4.0));
    CHECK(r.per_group[0] == doctest::Approx(4.0));
    CHECK(r.per_group[1] == doctest::Approx(3.0));
    CHECK(r.relative[0] == doctest::Approx(4.0 / 7.0));
    CHECK(r.relative[1] == doctest::Approx(3.0 / 7.0));

    // Swapping group labels permutes iota identically.
    const auto rr = importance(s, {{"b", {1, 2}}, {"a", {0}}});
    CHECK(rr.relative[0] == doctest::Approx(r.relative[1]));
    CHECK(rr.relative[1] == doctest::Approx(r.relative[0]));
  }
  // Two equal groups split importance evenly.
  {
    MatrixXd s(1, 4);
    s << 1.0, 2.0, 2.0, 1.0;
    const auto r = importance(s, {{"l", {0, 1}}, {"r", {2, 3}}});
    CHECK(r.relative[0] == doctest::Approx(0.5));
    CHECK(r.relative[1] == doctest::Approx(0.5));
  }
  // Groups must partition the inputs.
  MatrixXd s = MatrixXd::Ones(2, 3);
  CHECK_THROWS(importance(s, {{"a", {0, 1}}}));              // missing index
  CHECK_THROWS(importance(s, {{"a", {0, 1, 1}}, {"b", {2}}}));  // duplicate
}

TEST_CASE("iota stays on the simplex; scaling G leaves S, I, iota fixed") {
  Rng rng(19);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 6;
    const int N = 4;
    MatrixXd g(N, n);
    for (int i = 0; i < g.size(); ++i)
      g.data()[i] = std::abs(rng.normal()) + 0.01;
    const auto norm = saliency_normalize(g);
    const auto imp =
        importance(norm.s, {{"a", {0, 1}}, {"b", {2, 3, 4}}, {"c", {5}}});
    if (imp.per_group.sum() > 0.0) {
      CHECK(std::abs(imp.relative.sum() - 1.0) < 1e-9);
      for (int o = 0; o < 3; ++o) CHECK(imp.relative[o] >= 0.0);
    }

    const double c = rng.uniform(0.1, 10.0);
    const auto norm2 = saliency_normalize((c * g).eval());
    CHECK((norm2.s - norm.s).cwiseAbs().maxCoeff() < 1e-12);
    const auto imp2 =
        importance(norm2.s, {{"a", {0, 1}}, {"b", {2, 3, 4}}, {"c", {5}}});
    CHECK((imp2.relative - imp.relative).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("zero inputs with a zero baseline get zero attribution") {
  Rng rng(23);
  const MlpSpec spec({6, 16, 8, 2});
  std::vector<double> params(spec.param_count());
  Rng init(5);
  mlp_init_orthogonal(spec, params.data(), init);
  MlpDiffFn f(spec, params.data());
  SaliencyConfig cfg;
  cfg.p = 25;
  VectorXd x = VectorXd::Zero(6);
  x[2] = 1.3;  // only one active input
  const VectorXd g = integrated_gradient(f, x, cfg);
  for (int i = 0; i < 6; ++i)
    if (i != 2) CHECK(g[i] == 0.0);  // the (x - baseline) factor vanishes
  CHECK(g[2] > 0.0);
}

TEST_CASE("full report: per-sample iota rows are simplex or zero") {
  Rng rng(29);
  const MlpSpec spec({8, 16, 8, 3});
  std::vector<double> params(spec.param_count());
  Rng init(7);
  mlp_init_orthogonal(spec, params.data(), init, std::sqrt(2.0), 0.5);
  MlpDiffFn f(spec, params.data());
  MatrixXd x(8, 40);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  SaliencyConfig cfg;
  cfg.p = 25;
  cfg.groups = {{"a", {0, 1, 2}}, {"b", {3, 4}}, {"c", {5, 6, 7}}};
  const SaliencyReport rep = analyze_inputs(f, x, cfg);
  CHECK(rep.g.rows() == 40);
  CHECK(rep.g.cols() == 8);
  for (int t = 0; t < 40; ++t) {
    const double sum = rep.per_sample_iota.row(t).sum();
    CHECK((std::abs(sum - 1.0) < 1e-9 || sum == 0.0));
  }
  // N = 1 degenerate run: quantiles collapse to the single sample.
  const SaliencyReport one = analyze_inputs(f, x.leftCols(1), cfg);
  const auto j = one.to_json();
  for (const auto& grp : j.at("groups")) {
    CHECK(grp.at("iota_q25") == grp.at("iota_median"));
    CHECK(grp.at("iota_median") == grp.at("iota_q75"));
  }
}
