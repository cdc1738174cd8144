#include "localgraph/simgen.hpp"

#include <cmath>
#include <numeric>

#include "localgraph/error.hpp"
#include "localgraph/random.hpp"

namespace localgraph {

void PrecisionSpec::validate() const {
  if (block_sizes.size() != 3) throw ArgumentError("precision spec: expected three blocks");
  if (std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0}) != p) {
    throw ArgumentError("precision spec: block sizes do not sum to p");
  }
  if (block_sizes[0] == 0) throw ArgumentError("precision spec: empty target block");
  if (!(eig_min > 0.0) || !(eig_max > eig_min)) {
    throw ArgumentError("precision spec: need 0 < eig_min < eig_max");
  }
  if (avg_degree_23 < 0.0 || avg_degree_33 < 0.0) throw ArgumentError("precision spec: negative degree");
  if (block_sizes[2] > 0 && (avg_degree_23 > static_cast<double>(block_sizes[2]) ||
                             avg_degree_33 > static_cast<double>(block_sizes[2]))) {
    throw ArgumentError("precision spec: average degree exceeds block size");
  }
}

const char* to_string(Design design) {
  switch (design) {
    case Design::kLinear:
      return "linear";
    case Design::kNonlinear:
      return "nonlinear";
    case Design::kFig1:
      return "fig1";
  }
  return "linear";
}

Design parse_design(const std::string& text) {
  if (text == "linear") return Design::kLinear;
  if (text == "nonlinear") return Design::kNonlinear;
  if (text == "fig1") return Design::kFig1;
  throw ArgumentError("unknown design '" + text + "' (expected linear, nonlinear or fig1)");
}

DesignPreset design_preset(Design design) {
  DesignPreset preset;
  switch (design) {
    case Design::kLinear:
      break;
    case Design::kNonlinear:
      preset.precision.avg_degree_23 = 2.0;
      preset.nonlinear = true;
      break;
    case Design::kFig1:
      preset.precision.p = 100;
      preset.precision.block_sizes = {1, 2, 97};
      preset.precision.avg_degree_23 = 3.0;
      preset.precision.avg_degree_33 = 2.0;
      preset.precision.eig_min = 0.1;
      preset.precision.eig_max = 100.0;
      preset.n = 200;
      break;
  }
  return preset;
}

Eigen::MatrixXd make_precision(const PrecisionSpec& spec) {
  spec.validate();
  const std::size_t p = spec.p;
  const std::size_t b1 = spec.block_sizes[0];
  const std::size_t b2 = b1 + spec.block_sizes[1];
  const double size3 = static_cast<double>(spec.block_sizes[2]);

  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_sign = [&]() { return unit(rng) < 0.5 ? -1.0 : 1.0; };

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  auto place = [&](std::size_t i, std::size_t j) {
    const double v = random_sign();
    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
  };

  // Target(s) to every block-2 node; block 2 stays internally empty.
  for (std::size_t i = 0; i < b1; ++i) {
    for (std::size_t j = b1; j < b2; ++j) place(i, j);
  }
  const double prob23 = size3 > 0 ? spec.avg_degree_23 / size3 : 0.0;
  const double prob33 = size3 > 0 ? spec.avg_degree_33 / size3 : 0.0;
  for (std::size_t i = b1; i < b2; ++i) {
    for (std::size_t j = b2; j < p; ++j) {
      if (unit(rng) < prob23) place(i, j);
    }
  }
  for (std::size_t i = b2; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (unit(rng) < prob33) place(i, j);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw GenerationError("make_precision: eigendecomposition failed");
  const double lowest = solver.eigenvalues().minCoeff();
  const double highest = solver.eigenvalues().maxCoeff();
  const double shift = std::abs(lowest) + 0.1;
  const double lo = lowest + shift;
  const double hi = highest + shift;
  if (!(hi - lo > 1e-12)) throw GenerationError("make_precision: constant spectrum cannot be rescaled");

  // theta = scale * (A + shift I) + offset I maps the spectrum [lo, hi] onto
  // [eig_min, eig_max] and keeps the eigenvectors.
  const double scale = (spec.eig_max - spec.eig_min) / (hi - lo);
  const double offset = spec.eig_min - scale * lo;
  Eigen::MatrixXd theta = scale * a;
  theta.diagonal().array() += scale * shift + offset;
  return theta;
}

DataMatrix sample_gaussian(const Eigen::MatrixXd& theta, std::size_t n, std::uint64_t seed) {
  if (theta.rows() != theta.cols() || theta.rows() < 2) throw ArgumentError("sample_gaussian: theta must be square");
  Eigen::LLT<Eigen::MatrixXd> theta_factor(theta);
  if (theta_factor.info() != Eigen::Success) throw ArgumentError("sample_gaussian: theta is not positive definite");
  const Eigen::MatrixXd sigma = theta_factor.solve(Eigen::MatrixXd::Identity(theta.rows(), theta.cols()));
  Eigen::LLT<Eigen::MatrixXd> sigma_factor(0.5 * (sigma + sigma.transpose()));
  if (sigma_factor.info() != Eigen::Success) throw ArgumentError("sample_gaussian: covariance factorization failed");
  const Eigen::MatrixXd lower = sigma_factor.matrixL();

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), theta.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = normal(rng);
  }
  return DataMatrix(z * lower.transpose());
}

DataMatrix apply_nonlinear_response(const DataMatrix& samples, Node target, const NodeSet& neighbors, double snr,
                                    std::uint64_t seed) {
  if (target >= samples.p()) throw ArgumentError("apply_nonlinear_response: target out of range");
  if (neighbors.empty()) throw ArgumentError("apply_nonlinear_response: no neighbors");
  if (!(snr > 0.0)) throw ArgumentError("apply_nonlinear_response: snr must be positive");
  const Eigen::MatrixXd& x = samples.values();
  Eigen::VectorXd signal = Eigen::VectorXd::Zero(x.rows());
  for (Node j : neighbors) {
    if (j >= samples.p() || j == target) throw ArgumentError("apply_nonlinear_response: invalid neighbor");
    signal.array() += (-0.5 * x.col(static_cast<Eigen::Index>(j)).array().square()).exp();
  }
  const double n = static_cast<double>(x.rows());
  const double mean = signal.mean();
  const double variance = (signal.array() - mean).square().sum() / (n - 1.0);
  if (!(variance > 1e-14 * std::max(1.0, mean * mean))) {
    throw DegenerateError("apply_nonlinear_response: signal has zero variance");
  }
  Eigen::MatrixXd values = x;
  values.col(static_cast<Eigen::Index>(target)) = signal;
  if (std::isfinite(snr)) {
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(variance / snr));
    for (Eigen::Index i = 0; i < values.rows(); ++i) values(i, static_cast<Eigen::Index>(target)) += noise(rng);
  }
  return DataMatrix(std::move(values), samples.names(), samples.kinds());
}

TrueGraph graph_from_precision(const Eigen::MatrixXd& theta, double tol) {
  if (theta.rows() != theta.cols()) throw ArgumentError("graph_from_precision: theta must be square");
  const auto p = static_cast<std::size_t>(theta.rows());
  TrueGraph g(p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = j + 1; k < p; ++k) {
      if (std::abs(theta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))) > tol) g.add_edge(j, k);
    }
  }
  return g;
}

SimulatedInstance simulate(const DesignPreset& preset, Design design, std::uint64_t seed) {
  PrecisionSpec spec = preset.precision;
  spec.seed = derive_seed(seed, 1);
  Eigen::MatrixXd theta = make_precision(spec);
  DataMatrix samples = sample_gaussian(theta, preset.n, derive_seed(seed, 2));
  if (preset.nonlinear) {
    NodeSet neighbors;
    for (Node j = spec.block_sizes[0]; j < spec.block_sizes[0] + spec.block_sizes[1]; ++j) neighbors.insert(j);
    samples = apply_nonlinear_response(samples, 0, neighbors, preset.snr, derive_seed(seed, 3));
  }
  TrueGraph truth = graph_from_precision(theta);
  return SimulatedInstance{std::move(theta), std::move(truth), std::move(samples), design, preset.n, seed};
}

SimulatedInstance simulate(Design design, std::uint64_t seed) { return simulate(design_preset(design), design, seed); }

}  // namespace localgraph
