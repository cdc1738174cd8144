#pragma once

#include <Eigen/Dense>
#include <vector>

namespace localgraph {

struct LassoOptions {
  // Stop when every coordinate's squared change in a sweep is below
  // tol * mean(y^2).
  double tol = 1e-16;
  int max_sweeps = 100000;  // counts active-set sweeps too
};

// Minimizes (1/2n)||y - X b||^2 + lambda ||b||_1 by cyclic coordinate descent.
// X must be column-standardized (mean 0, x'x/n = 1) and y centered; otherwise
// ArgumentError. Throws ConvergenceError (carrying the KKT residual) when
// max_sweeps is exhausted.
Eigen::VectorXd soft_threshold_solve(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& y, double lambda,
                                     const LassoOptions& options = {});

double lasso_objective(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                       const Eigen::Ref<const Eigen::VectorXd>& beta, double lambda);

// Largest violation of the subgradient optimality conditions.
double kkt_residual(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::VectorXd>& beta, double lambda);

// max_k |x_k' y| / n
double lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

// Geometric sequence of m levels from lambda_max down to lambda_max / ratio.
// Constant y raises DegenerateError.
std::vector<double> regularization_grid(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                        const Eigen::Ref<const Eigen::VectorXd>& y, int m, double ratio = 100.0);

// Warm-started solver for a sequence of levels on one standardized design.
// Excluded columns stay at zero (used for columns that are constant within a
// subsample).
class LassoPath {
 public:
  // x and y are referenced, not copied.
  LassoPath(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<bool> excluded = {});

  // Returns the number of sweeps used; throws ConvergenceError on exhaustion.
  int solve(double lambda, const LassoOptions& options = {});
  const Eigen::VectorXd& coefficients() const { return beta_; }

 private:
  double sweep(double lambda, bool active_only);

  const Eigen::MatrixXd* x_;
  const Eigen::VectorXd* y_;
  std::vector<bool> excluded_;
  Eigen::VectorXd beta_;
  Eigen::VectorXd residual_;
  double inv_n_;
};

}  // namespace localgraph
