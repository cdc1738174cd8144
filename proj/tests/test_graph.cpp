#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "localgraph/error.hpp"
#include "localgraph/graph.hpp"
#include "localgraph/serialize.hpp"
#include "oracles.hpp"

using namespace localgraph;

namespace {

TrueGraph path_graph(std::size_t p) {
  TrueGraph g(p);
  for (Node j = 0; j + 1 < p; ++j) g.add_edge(j, j + 1);
  return g;
}

QMatrix random_qmatrix(std::size_t p, double density, std::mt19937_64& rng) {
  QMatrix q(p);
  std::uniform_real_distribution<double> weight(0.0, 0.5);
  for (const Edge& e : oracle::random_edges(p, density, rng)) q.set(e.a, e.b, weight(rng));
  return q;
}

oracle::Weights dense(const QMatrix& q) {
  oracle::Weights w(q.p(), std::vector<double>(q.p(), 1.0));
  for (Node j = 0; j < q.p(); ++j) {
    for (Node k = 0; k < q.p(); ++k) w[j][k] = j == k ? 1.0 : q(j, k);
  }
  return w;
}

EdgeSet edges_from_pairs(const nlohmann::json& pairs) {
  EdgeSet out;
  for (const auto& pr : pairs) out.insert(Edge::make(pr[0].get<Node>() - 1, pr[1].get<Node>() - 1));
  return out;
}

}  // namespace

TEST_CASE("edges are normalized and self-loops rejected") {
  CHECK(Edge::make(5, 2) == Edge{2, 5});
  CHECK_THROWS_AS(Edge::make(3, 3), ArgumentError);
  TrueGraph g(4);
  g.add_edge(2, 1);
  CHECK(g.has_edge(1, 2));
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(0, 1));
  CHECK_THROWS_AS(g.add_edge(0, 4), ArgumentError);
}

TEST_CASE("ball and local edge set on a path graph") {
  const TrueGraph g = path_graph(6);
  CHECK(ball(g, {0}, 0) == NodeSet{0});
  CHECK(ball(g, {0}, 2) == NodeSet{0, 1, 2});
  CHECK(ball(g, {2}, 1) == NodeSet{1, 2, 3});
  CHECK(local_edge_set(g, {0}, 1) == EdgeSet{{0, 1}});
  CHECK(local_edge_set(g, {0}, 2) == EdgeSet{{0, 1}, {1, 2}});
  CHECK_THROWS_AS(local_edge_set(g, {0}, 0), ArgumentError);
  CHECK_THROWS_AS(ball(g, {0}, -1), ArgumentError);
  CHECK_THROWS_AS(ball(g, {9}, 1), ArgumentError);
}

TEST_CASE("local edge sets grow with the radius") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const TrueGraph g(25, oracle::random_edges(25, 0.1, rng));
    const NodeSet targets = oracle::random_targets(25, rng);
    for (int r = 1; r < 5; ++r) {
      const EdgeSet a = local_edge_set(g, targets, r);
      const EdgeSet b = local_edge_set(g, targets, r + 1);
      CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    }
  }
}

TEST_CASE("ball and local edge set agree with the definition oracle") {
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t p = 5 + trial;
    const EdgeSet edges = oracle::random_edges(p, 0.12, rng);
    const TrueGraph g(p, edges);
    const NodeSet targets = oracle::random_targets(p, rng);
    for (int r = 1; r <= 4; ++r) {
      if (ball(g, targets, r) != oracle::ball(p, edges, targets, r)) ++mismatches;
      if (local_edge_set(g, targets, r) != oracle::local_edges(p, edges, targets, r)) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("local FDP and TPR") {
  const EdgeSet truth{{0, 1}, {1, 2}};
  CHECK(local_fdp({}, truth) == 0.0);
  CHECK(local_fdp({{0, 1}, {0, 2}}, truth) == doctest::Approx(0.5));
  CHECK(local_tpr({{0, 1}}, truth) == doctest::Approx(0.5));
  CHECK(local_tpr({}, {}) == 1.0);
  CHECK(local_tpr({{0, 1}}, {}) == 1.0);
}

TEST_CASE("FDP arithmetic of the two hypothetical graphs") {
  std::ifstream in(std::string(LOCALGRAPH_FIXTURES) + "/fdp_panels.json");
  REQUIRE(in);
  const auto doc = nlohmann::json::parse(in);
  REQUIRE(doc["panels"].size() == 2);
  for (const auto& panel : doc["panels"]) {
    CAPTURE(panel["name"].get<std::string>());
    const auto p = panel["p"].get<std::size_t>();
    const EdgeSet est = edges_from_pairs(panel["estimated"]);
    const EdgeSet truth = edges_from_pairs(panel["truth"]);
    CHECK(local_fdp(est, truth) == doctest::Approx(panel["expected"]["full"].get<double>()));
    const TrueGraph est_graph(p, est);
    const TrueGraph truth_graph(p, truth);
    for (const auto& [label, value] : panel["expected"]["radius1"].items()) {
      const NodeSet v0{static_cast<Node>(std::stoul(label) - 1)};
      const double fdp = local_fdp(local_edge_set(est_graph, v0, 1), local_edge_set(truth_graph, v0, 1));
      CHECK(fdp == value.get<double>());
    }
  }
}

TEST_CASE("QMatrix stores symmetric q-values") {
  QMatrix q(4);
  CHECK(q(0, 1) == QMatrix::kUnrecorded);
  q.set(1, 3, 0.25);
  CHECK(q(3, 1) == 0.25);
  CHECK(q.recorded(1, 3));
  CHECK(q.edges() == EdgeSet{{1, 3}});
  CHECK(q.is_symmetric());
  CHECK_THROWS_AS(q.set(2, 2, 0.1), ArgumentError);
  CHECK_THROWS_AS(q.set(0, 2, 1.5), ArgumentError);
  q.clear(1, 3);
  CHECK(q.edges().empty());
}

TEST_CASE("lightest path uses the cheapest route within the hop limit") {
  QMatrix q(4);
  q.set(0, 1, 0.1);
  q.set(1, 2, 0.1);
  q.set(0, 2, 0.5);
  q.set(2, 3, 0.05);
  CHECK(lightest_path_distance(q, {0}, 2, 1) == doctest::Approx(0.5));
  CHECK(lightest_path_distance(q, {0}, 2, 2) == doctest::Approx(0.2));
  CHECK(lightest_path_distance(q, {0}, 3, 2) == doctest::Approx(0.55));
  CHECK(lightest_path_distance(q, {0}, 3, 3) == doctest::Approx(0.25));
  CHECK(lightest_path_distance(q, {0}, 3, 1) == kInfinity);
  CHECK_THROWS_AS(lightest_path_distance(q, {0}, 3, 0), ArgumentError);
  CHECK_THROWS_AS(lightest_path_distance(q, {0}, 0, 2), ArgumentError);
}

TEST_CASE("path q-sum") {
  QMatrix q(4);
  q.set(0, 1, 0.1);
  q.set(1, 2, 0.2);
  CHECK(path_qsum(q, Path({0, 1, 2})) == doctest::Approx(0.3));
  CHECK_THROWS_AS(path_qsum(q, Path({0, 2})), ArgumentError);
  CHECK_THROWS_AS(Path({1}), ArgumentError);
  CHECK_THROWS_AS(Path({1, 2, 1}), ArgumentError);
}

TEST_CASE("lightest path and prune agree with exhaustive path enumeration") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> size(3, 12);
  std::uniform_int_distribution<int> radius(1, 4);
  std::uniform_real_distribution<double> thresh(0.0, 0.8);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = size(rng);
    const QMatrix q = random_qmatrix(p, 0.35, rng);
    const NodeSet targets = oracle::random_targets(p, rng);
    const int r = radius(rng);
    const std::vector<double> got = lightest_path_distances(q, targets, r);
    const std::vector<double> want = oracle::lightest(dense(q), targets, r);
    for (Node j = 0; j < p; ++j) {
      if (std::isinf(want[j]) ? !std::isinf(got[j]) : std::abs(got[j] - want[j]) > 1e-12) ++mismatches;
    }
    LocalGraphEstimate est;
    est.targets = targets;
    est.radius = r;
    est.qmatrix = q;
    const double t = thresh(rng);
    const LocalGraphEstimate pruned = prune(est, t);
    const oracle::Weights want_pruned = oracle::prune(dense(q), targets, r, t);
    if (dense(pruned.qmatrix) != want_pruned) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("prune is idempotent and keeps targets") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    LocalGraphEstimate est;
    est.qmatrix = random_qmatrix(10, 0.3, rng);
    est.targets = oracle::random_targets(10, rng);
    est.radius = 3;
    const LocalGraphEstimate once = prune(est, 0.3);
    const LocalGraphEstimate twice = prune(once, 0.3);
    CHECK(once.qmatrix == twice.qmatrix);
    for (Node t : est.targets) CHECK(once.layer.at(t) == 0);
  }
  LocalGraphEstimate est;
  est.qmatrix = QMatrix(3);
  est.targets = {0};
  est.radius = 1;
  CHECK_THROWS_AS(prune(est, 1.5), ArgumentError);
}

TEST_CASE("layers are hop distances over recorded edges") {
  QMatrix q(5);
  q.set(0, 1, 0.1);
  q.set(1, 2, 0.1);
  q.set(2, 3, 0.1);
  const auto layers = compute_layers(q, {0}, 2);
  CHECK(layers.at(0) == 0);
  CHECK(layers.at(1) == 1);
  CHECK(layers.at(2) == 2);
  CHECK(layers.count(3) == 0);
  CHECK(layers.count(4) == 0);
}

TEST_CASE("local graph fixture around X1") {
  const LocalGraphEstimate est = read_estimate(std::string(LOCALGRAPH_FIXTURES) + "/local_graph_x1.json");
  const TrueGraph truth = parse_truth_json(read_text(std::string(LOCALGRAPH_FIXTURES) + "/local_graph_x1_truth.json"));
  const auto id = [](int label) { return static_cast<Node>(label - 1); };

  CHECK(path_qsum(est.qmatrix, Path({id(1), id(2), id(78), id(90)})) == doctest::Approx(0.27));
  CHECK(est.qmatrix(id(1), id(36)) == 0.33);
  CHECK(est.qmatrix(id(1), id(86)) == 0.37);
  CHECK(est.qmatrix(id(1), id(2)) < est.qmatrix(id(1), id(36)));

  // Every node beyond X36 and X86 lies past the 0.4 path budget.
  const LocalGraphEstimate pruned = prune(est, 0.4);
  const EdgeSet kept = pruned.edges();
  CHECK(kept.size() == est.edges().size() - 2);
  CHECK(kept.count(Edge::make(id(36), id(5))) == 0);
  CHECK(kept.count(Edge::make(id(86), id(7))) == 0);
  CHECK(kept.count(Edge::make(id(1), id(36))) == 1);

  const TrueGraph g = est.graph();
  const NodeSet v0{id(1)};
  CHECK(local_fdp(local_edge_set(g, v0, 1), local_edge_set(truth, v0, 1)) == doctest::Approx(0.5));
  CHECK(local_tpr(local_edge_set(g, v0, 1), local_edge_set(truth, v0, 1)) == 1.0);
  CHECK(local_fdp(pruned.edges(), truth.edges()) == doctest::Approx(2.0 / 9.0));
}
