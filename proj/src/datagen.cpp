#include "ascs/datagen.hpp"

#include <cmath>
#include <string>

#include "ascs/covstream.hpp"
#include "ascs/error.hpp"
#include "ascs/hashing.hpp"
#include "ascs/hyperparams.hpp"

namespace ascs {

namespace {

uint64_t sub_seed(uint64_t seed, uint64_t stream) { return mix64(seed + stream * kGoldenGamma); }

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DataError("eigenvalue decomposition failed");
  return solver.eigenvalues().minCoeff();
}

}  // namespace

uint64_t SyntheticSpec::signal_count() const {
  return static_cast<uint64_t>(std::llround(alpha * static_cast<double>(pairs())));
}

void SyntheticSpec::validate() const {
  if (d < 2) throw ArgumentError("synthetic generator needs d >= 2");
  if (T == 0) throw ArgumentError("synthetic generator needs T >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
  if (signal_count() < 1) throw ArgumentError("alpha * p rounds to zero signal pairs");
  if (!(signal_low <= signal_high) || !std::isfinite(signal_low) || !std::isfinite(signal_high)) {
    throw ArgumentError("signal range must be finite with low <= high");
  }
}

RepairInfo repair_to_pd(Eigen::MatrixXd& m) {
  RepairInfo info;
  double lambda = min_eigenvalue(m);
  info.min_eigenvalue_before = lambda;
  // Aim at twice the floor so the rescaled minimum clears it strictly.
  const double target = 2.0 * kMinEigenvalue;
  while (lambda <= kMinEigenvalue) {
    if (info.iterations == kMaxRepairIterations) {
      throw DataError("covariance repair failed: minimum eigenvalue " + std::to_string(lambda) + " after " +
                      std::to_string(kMaxRepairIterations) + " diagonal inflations");
    }
    const double shift = (target - lambda) / (1.0 - target);
    const double scale = 1.0 / (1.0 + shift);
    m.diagonal().array() += shift;
    m *= scale;
    m.diagonal().setOnes();
    info.shrink *= scale;
    ++info.iterations;
    lambda = min_eigenvalue(m);
  }
  info.min_eigenvalue_after = lambda;
  return info;
}

CovarianceModel make_covariance(const SyntheticSpec& spec) {
  spec.validate();
  const uint64_t matrix_seed = sub_seed(spec.seed, 1);
  CovarianceModel model;
  model.signal_pairs = sample_item_subset(spec.pairs(), matrix_seed, spec.signal_count());

  model.matrix = Eigen::MatrixXd::Identity(spec.d, spec.d);
  std::mt19937_64 rng(sub_seed(spec.seed, 2));
  std::uniform_real_distribution<double> magnitude(spec.signal_low, spec.signal_high);
  const PairIndex index(spec.d);
  for (uint64_t item : model.signal_pairs) {
    const auto [a, b] = index.pair(item);
    const double v = spec.signal_low == spec.signal_high ? spec.signal_low : magnitude(rng);
    model.matrix(a, b) = v;
    model.matrix(b, a) = v;
  }
  model.repair = repair_to_pd(model.matrix);
  return model;
}

GaussianSampler::GaussianSampler(const Eigen::MatrixXd& covariance) {
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) throw DataError("covariance is not positive definite");
  factor_ = llt.matrixL();
}

void GaussianSampler::draw(std::mt19937_64& rng, Eigen::VectorXd& out) const {
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(factor_.rows());
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(rng);
  out.noalias() = factor_.triangularView<Eigen::Lower>() * z;
}

SparseSample GaussianSampler::draw(std::mt19937_64& rng) const {
  Eigen::VectorXd y;
  draw(rng, y);
  return to_sparse(std::vector<double>(y.data(), y.data() + y.size()));
}

Dataset sample_stream(const CovarianceModel& model, uint64_t T, uint64_t seed) {
  const GaussianSampler sampler(model.matrix);
  std::mt19937_64 rng(seed);
  Dataset out;
  out.dim = sampler.dim();
  out.rows.reserve(T);
  for (uint64_t t = 0; t < T; ++t) out.rows.push_back(sampler.draw(rng));
  return out;
}

SyntheticData generate(const SyntheticSpec& spec) {
  SyntheticData out;
  out.model = make_covariance(spec);
  out.data = sample_stream(out.model, spec.T, sub_seed(spec.seed, 3));
  return out;
}

Dataset bootstrap(const Dataset& dataset, uint64_t n, uint64_t seed) {
  Dataset out;
  out.dim = dataset.dim;
  if (n == 0) return out;
  if (dataset.rows.empty()) throw ArgumentError("cannot bootstrap an empty dataset");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, dataset.rows.size() - 1);
  out.rows.reserve(n);
  for (uint64_t k = 0; k < n; ++k) out.rows.push_back(dataset.rows[pick(rng)]);
  return out;
}

}  // namespace ascs
