#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "localgraph/boosting.hpp"
#include "localgraph/data_matrix.hpp"
#include "localgraph/graph.hpp"
#include "localgraph/lasso.hpp"

namespace localgraph {

enum class Selector { kL1, kTree };

const char* to_string(Selector selector);
Selector parse_selector(const std::string& text);

std::vector<double> default_tau_grid();

// Settings of the neighborhood q-value estimator.
struct EstimatorConfig {
  Selector selector = Selector::kL1;
  int B = 100;               // complementary half-sample pairs
  int grid_size = 25;        // regularization levels / importance cutoffs
  double grid_ratio = 100.0; // first level / last level
  std::vector<double> tau_grid = default_tau_grid();
  std::uint64_t seed = 0;
  int boost_rounds = 100;
  int max_depth = 2;
  double learning_rate = 0.1;
  double lasso_tol = 1e-7;
  int threads = 1;

  void validate() const;
  BoostingOptions boosting() const { return {boost_rounds, max_depth, learning_rate}; }
  LassoOptions lasso() const { return {lasso_tol, 100000}; }
};

// Selection frequencies of every non-response variable along a grid of
// decreasing stringency, averaged over 2B half-sample fits.
struct SelectionProfile {
  std::vector<double> grid;
  Eigen::MatrixXd freq;               // grid.size() x features.size()
  std::vector<double> avg_selected;   // per grid level
  Node response = 0;
  int subsample_pairs = 0;
  std::vector<Node> features;         // column index of each profile column
};

struct EfpQVector {
  Node response = 0;
  std::vector<Node> features;
  Eigen::VectorXd efp;
  Eigen::VectorXd q;

  bool operator==(const EfpQVector& other) const {
    return response == other.response && features == other.features && efp == other.efp && q == other.q;
  }
};

// Response column as fitted: binary columns are coded -1/+1 (smaller value -1).
Eigen::VectorXd response_vector(const DataMatrix& x, Node response);

// B random splits of 0..n-1 into two disjoint halves of size floor(n/2).
std::vector<std::pair<std::vector<int>, std::vector<int>>> complementary_splits(std::size_t n, int B,
                                                                                 std::uint64_t seed);

// Importance-share cutoffs used as the tree selector's grid: geometric from
// 0.5 down to 0.5 / ratio.
std::vector<double> importance_thresholds(int m, double ratio);

SelectionProfile selection_profile(const DataMatrix& x, Node response, const std::vector<double>& grid, int B,
                                   std::uint64_t seed, const LassoOptions& lasso = {1e-7, 100000},
                                   int threads = 1);

SelectionProfile tree_importance_profile(const DataMatrix& x, Node response, const std::vector<double>& thresholds,
                                         int B, std::uint64_t seed, const BoostingOptions& boosting = {},
                                         int threads = 1);

// efp_k = min over levels l and tau with freq[l,k] >= tau of
// avg_selected[l]^2 / ((p-1)(2 tau - 1)); p-1 when nothing qualifies.
Eigen::VectorXd efp_scores(const SelectionProfile& profile, std::size_t p, const std::vector<double>& tau_grid);

// Step-up map: q_(i) = min_{j>=i} efp_(j) / j, clipped to [0,1]. Tied scores
// share the value computed at the last rank of their block.
Eigen::VectorXd qvalues_from_efp(const Eigen::VectorXd& efp);

EfpQVector estimate_neighbor_qvalues(const DataMatrix& x, Node response, const EstimatorConfig& config);

}  // namespace localgraph
