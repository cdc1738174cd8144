#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "localgraph/data_matrix.hpp"
#include "localgraph/graph.hpp"

namespace localgraph {

// Three-block precision design: block 1 is the target, block 2 its
// neighbors, block 3 everything else.
struct PrecisionSpec {
  std::size_t p = 200;
  std::vector<std::size_t> block_sizes{1, 4, 195};
  double avg_degree_23 = 6.0;  // mean number of block-3 neighbors per block-2 node
  double avg_degree_33 = 2.0;  // mean number of block-3 neighbors per block-3 node
  double eig_min = 0.01;
  double eig_max = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Design { kLinear, kNonlinear, kFig1 };

const char* to_string(Design design);
Design parse_design(const std::string& text);

struct DesignPreset {
  PrecisionSpec precision;
  std::size_t n = 100;
  bool nonlinear = false;
  double snr = 4.0;
};

DesignPreset design_preset(Design design);

struct SimulatedInstance {
  Eigen::MatrixXd theta;
  TrueGraph truth;
  DataMatrix samples;
  Design design = Design::kLinear;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

Eigen::MatrixXd make_precision(const PrecisionSpec& spec);

// n draws from N(0, theta^{-1}) through the Cholesky factor of the covariance.
DataMatrix sample_gaussian(const Eigen::MatrixXd& theta, std::size_t n, std::uint64_t seed);

// Replaces the target column by sum_j exp(-x_j^2 / 2) over the neighbors plus
// Gaussian noise with variance var(signal) / snr. snr may be +inf.
DataMatrix apply_nonlinear_response(const DataMatrix& samples, Node target, const NodeSet& neighbors, double snr,
                                    std::uint64_t seed);

TrueGraph graph_from_precision(const Eigen::MatrixXd& theta, double tol = 1e-12);

// Full instance of a named design; `seed` drives structure, samples and noise.
SimulatedInstance simulate(Design design, std::uint64_t seed);
SimulatedInstance simulate(const DesignPreset& preset, Design design, std::uint64_t seed);

}  // namespace localgraph
