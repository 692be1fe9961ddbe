#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ascs/sample.hpp"

namespace ascs {

struct SyntheticSpec {
  uint32_t d = 200;
  uint64_t T = 1000;
  double alpha = 0.005;
  double signal_low = 0.5;
  double signal_high = 1.0;
  uint64_t seed = 1;

  uint64_t pairs() const noexcept { return static_cast<uint64_t>(d) * (d - 1) / 2; }
  // round(alpha * p)
  uint64_t signal_count() const;
  void validate() const;
};

inline constexpr double kMinEigenvalue = 1e-6;
inline constexpr int kMaxRepairIterations = 5;

struct RepairInfo {
  int iterations = 0;
  double min_eigenvalue_before = 0.0;
  double min_eigenvalue_after = 0.0;
  // Product of the per-iteration rescaling factors 1 / (1 + shift); every
  // off-diagonal entry was multiplied by this.
  double shrink = 1.0;
};

// Unit-diagonal sparse correlation matrix with selected pairs drawn
// uniformly from [signal_low, signal_high].
struct CovarianceModel {
  Eigen::MatrixXd matrix;              // post-repair ground truth
  std::vector<uint64_t> signal_pairs;  // sorted pair items, row-major a < b
  RepairInfo repair;
};

CovarianceModel make_covariance(const SyntheticSpec& spec);

// Lifts the minimum eigenvalue above kMinEigenvalue by inflating the diagonal
// and rescaling back to unit diagonal. Throws DataError after
// kMaxRepairIterations unsuccessful rounds.
RepairInfo repair_to_pd(Eigen::MatrixXd& m);

// Draws N(0, Sigma) rows through a Cholesky factor.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Eigen::MatrixXd& covariance);

  void draw(std::mt19937_64& rng, Eigen::VectorXd& out) const;
  SparseSample draw(std::mt19937_64& rng) const;

  uint32_t dim() const noexcept { return static_cast<uint32_t>(factor_.rows()); }

 private:
  Eigen::MatrixXd factor_;
};

struct SyntheticData {
  CovarianceModel model;
  Dataset data;
};

// Matrix and stream come from independent sub-seeds of spec.seed.
SyntheticData generate(const SyntheticSpec& spec);

// T rows from an existing model, e.g. per-replicate streams on a shared matrix.
Dataset sample_stream(const CovarianceModel& model, uint64_t T, uint64_t seed);

// n rows drawn uniformly with replacement.
Dataset bootstrap(const Dataset& dataset, uint64_t n, uint64_t seed);

}  // namespace ascs
