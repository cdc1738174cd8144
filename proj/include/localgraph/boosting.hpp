#pragma once

#include <Eigen/Dense>
#include <vector>

namespace localgraph {

struct BoostingOptions {
  int rounds = 100;
  int max_depth = 2;
  double learning_rate = 0.1;
};

// Least-squares gradient boosting of regression trees (depth <= max_depth,
// full sample each round). Returns the mean-decrease-impurity importance of
// every column: total squared-error reduction over all splits on that column.
// Excluded columns are never split on.
Eigen::VectorXd boosted_importance(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   const BoostingOptions& options = {}, const std::vector<bool>& excluded = {});

// Importances normalized to sum to 1; all zeros when no split occurred.
Eigen::VectorXd importance_shares(const Eigen::VectorXd& importance);

}  // namespace localgraph
