#include "doctest.h"
#include "localgraph/error.hpp"
#include "localgraph/simgen.hpp"

using namespace localgraph;

namespace {

PrecisionSpec small_spec(std::uint64_t seed) {
  PrecisionSpec s;
  s.p = 10;
  s.block_sizes = {1, 3, 6};
  s.avg_degree_23 = 2.0;
  s.avg_degree_33 = 1.5;
  s.eig_min = 0.5;
  s.eig_max = 5.0;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("precision spec validation") {
  PrecisionSpec s = small_spec(1);
  CHECK_NOTHROW(s.validate());
  s.block_sizes = {1, 3, 5};
  CHECK_THROWS_AS(s.validate(), ArgumentError);
  s = small_spec(1);
  s.block_sizes = {0, 4, 6};
  CHECK_THROWS_AS(s.validate(), ArgumentError);
  s = small_spec(1);
  s.eig_min = 6.0;
  CHECK_THROWS_AS(s.validate(), ArgumentError);
  s = small_spec(1);
  s.avg_degree_33 = -1.0;
  CHECK_THROWS_AS(s.validate(), ArgumentError);
  s = small_spec(1);
  s.avg_degree_23 = 7.0;
  CHECK_THROWS_AS(s.validate(), ArgumentError);
}

TEST_CASE("precision spectrum hits the requested extremes") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd theta = make_precision(small_spec(seed));
    CHECK(theta.isApprox(theta.transpose(), 0.0));
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(theta).eigenvalues();
    CHECK(std::abs(ev.minCoeff() - 0.5) <= 1e-8);
    CHECK(std::abs(ev.maxCoeff() - 5.0) <= 1e-8);
  }
}

TEST_CASE("block structure of the precision graph") {
  const PrecisionSpec s = design_preset(Design::kLinear).precision;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    PrecisionSpec spec = s;
    spec.seed = seed;
    const TrueGraph g = graph_from_precision(make_precision(spec));
    CHECK(g.neighbors(0).size() == 4);
    for (Node j = 1; j <= 4; ++j) {
      CHECK(g.has_edge(0, j));
      for (Node k = 1; k <= 4; ++k) {
        if (j != k) CHECK_FALSE(g.has_edge(j, k));
      }
    }
  }
}

TEST_CASE("design presets") {
  const DesignPreset lin = design_preset(Design::kLinear);
  CHECK(lin.precision.p == 200);
  CHECK(lin.n == 100);
  CHECK_FALSE(lin.nonlinear);
  const DesignPreset fig = design_preset(Design::kFig1);
  CHECK(fig.precision.p == 100);
  CHECK(fig.precision.eig_max == 100.0);
  CHECK(design_preset(Design::kNonlinear).nonlinear);
  CHECK(parse_design("fig1") == Design::kFig1);
  CHECK(std::string(to_string(Design::kNonlinear)) == "nonlinear");
  CHECK_THROWS_AS(parse_design("cubic"), ArgumentError);
}

TEST_CASE("gaussian samples reproduce the covariance") {
  const Eigen::MatrixXd theta = make_precision(small_spec(3));
  const DataMatrix x = sample_gaussian(theta, 20000, 7);
  const Eigen::MatrixXd centered = x.values().rowwise() - x.values().colwise().mean();
  const Eigen::MatrixXd s = centered.transpose() * centered / static_cast<double>(x.n() - 1);
  const Eigen::MatrixXd sigma = theta.inverse();
  CHECK((s - sigma).norm() / sigma.norm() < 0.05);
  CHECK(sample_gaussian(theta, 50, 7) == sample_gaussian(theta, 50, 7));
  CHECK_FALSE(sample_gaussian(theta, 50, 7) == sample_gaussian(theta, 50, 8));
  Eigen::MatrixXd indefinite = theta;
  indefinite(0, 0) = -1.0;
  CHECK_THROWS_AS(sample_gaussian(indefinite, 50, 1), ArgumentError);
}

TEST_CASE("nonlinear response") {
  const Eigen::MatrixXd theta = make_precision(small_spec(4));
  const DataMatrix x = sample_gaussian(theta, 2000, 1);
  const DataMatrix clean = apply_nonlinear_response(x, 0, {1, 2}, std::numeric_limits<double>::infinity(), 2);
  for (Eigen::Index i = 0; i < 5; ++i) {
    const double expected = std::exp(-0.5 * x.values()(i, 1) * x.values()(i, 1)) +
                            std::exp(-0.5 * x.values()(i, 2) * x.values()(i, 2));
    CHECK(clean.values()(i, 0) == doctest::Approx(expected));
  }
  CHECK(clean.values().rightCols(9) == x.values().rightCols(9));

  const DataMatrix noisy = apply_nonlinear_response(x, 0, {1, 2}, 4.0, 2);
  const Eigen::VectorXd noise = noisy.values().col(0) - clean.values().col(0);
  const Eigen::VectorXd signal = clean.values().col(0);
  const double snr = (signal.array() - signal.mean()).square().sum() / (noise.array() - noise.mean()).square().sum();
  CHECK(snr > 3.2);
  CHECK(snr < 4.8);

  CHECK_THROWS_AS(apply_nonlinear_response(x, 0, {}, 4.0, 1), ArgumentError);
  CHECK_THROWS_AS(apply_nonlinear_response(x, 0, {0}, 4.0, 1), ArgumentError);
  CHECK_THROWS_AS(apply_nonlinear_response(x, 0, {1}, 0.0, 1), ArgumentError);
}

TEST_CASE("simulated instances are deterministic per seed") {
  const SimulatedInstance a = simulate(Design::kFig1, 9);
  const SimulatedInstance b = simulate(Design::kFig1, 9);
  const SimulatedInstance c = simulate(Design::kFig1, 10);
  CHECK(a.samples == b.samples);
  CHECK(a.truth.edges() == b.truth.edges());
  CHECK_FALSE(a.samples == c.samples);
  CHECK(a.samples.n() == 200);
  CHECK(a.samples.p() == 100);
  CHECK(a.truth.edges() == graph_from_precision(a.theta).edges());

  const SimulatedInstance nl = simulate(Design::kNonlinear, 1);
  CHECK(nl.truth.neighbors(0) == std::vector<Node>{1, 2, 3, 4});
}
