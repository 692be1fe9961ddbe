#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ascs/active_sampler.hpp"
#include "ascs/countsketch.hpp"
#include "ascs/sample.hpp"

namespace ascs {

// Row-major bijection between feature pairs (a, b), a < b < d, and item
// indices [0, d(d-1)/2): (0,1), (0,2), ..., (0,d-1), (1,2), ...
class PairIndex {
 public:
  explicit PairIndex(uint32_t dim);

  uint32_t dim() const noexcept { return dim_; }
  uint64_t size() const noexcept { return size_; }

  uint64_t index(uint32_t a, uint32_t b) const;
  std::pair<uint32_t, uint32_t> pair(uint64_t item) const;

  // Index of (a, a+1), the first pair of row a.
  uint64_t row_start(uint32_t a) const noexcept {
    const uint64_t aa = a;
    return aa * dim_ - aa * (aa + 1) / 2;
  }

 private:
  uint32_t dim_;
  uint64_t size_;
};

// Per-feature running mean and sum of squared deviations (Welford), plus the
// mean before the most recent update for the mean-drift correction.
class StreamMoments {
 public:
  explicit StreamMoments(uint32_t dim);

  void update(const SparseSample& y);

  uint32_t dim() const noexcept { return static_cast<uint32_t>(mean_.size()); }
  uint64_t count() const noexcept { return count_; }
  std::span<const double> mean() const noexcept { return mean_; }
  std::span<const double> previous_mean() const noexcept { return previous_mean_; }

  // Population variance m2 / t.
  double variance(uint32_t a) const;
  double stddev(uint32_t a) const;

 private:
  uint64_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> previous_mean_;
  std::vector<double> m2_;
};

// Frozen per-feature moments taken from the pilot prefix.
struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  static FeatureStats from(const StreamMoments& moments);
};

struct StreamConfig {
  StatMode mode = StatMode::covariance;
  bool adjustment = false;
  double sparse_eps = 0.01;  // |mean / std| below this counts as a zero-mean feature
  bool fast_path = false;

  void validate() const;
};

// Mean-drift correction that makes the streamed products sum to the exact
// empirical co-moment: t * (Ybar_a^(t) - Ybar_a^(t+1)) * (Ybar_b^(t) - Ybar_b^(t+1)),
// where t + 1 = moments.count().
double mean_drift_adjustment(const StreamMoments& moments, uint32_t a, uint32_t b);

// Turns samples Y^(t) into per-pair increments X^(t).
//
// Covariance mode centres with the running mean, which must already include
// the sample. Correlation mode standardizes with the pilot moments. On the
// fast path a pair with at least one zero-mean feature is approximated by the
// raw product Y_a Y_b (standardized by the pilot std in correlation mode) and
// is skipped entirely when either value is zero; only pairs of two non-zero-mean
// features get the centred product.
class IncrementBuilder {
 public:
  IncrementBuilder(uint32_t dim, StreamConfig config, std::optional<FeatureStats> pilot = std::nullopt);

  void build(const StreamMoments& moments, const SparseSample& y, std::vector<Increment>& out) const;

  std::vector<Increment> build(const StreamMoments& moments, const SparseSample& y) const {
    std::vector<Increment> out;
    build(moments, y, out);
    return out;
  }

  const PairIndex& pairs() const noexcept { return pairs_; }
  const StreamConfig& config() const noexcept { return config_; }

  // Correlation mode drops zero-variance features; their pairs emit nothing.
  std::span<const uint32_t> dropped_features() const noexcept { return dropped_; }

  // Features whose means are not negligible (n_u). Empty off the fast path.
  std::span<const uint32_t> high_mean_features() const noexcept { return high_mean_; }

  bool zero_mean(uint32_t a) const noexcept { return zero_mean_[a] != 0; }

 private:
  void build_full(const StreamMoments& moments, const SparseSample& y, std::vector<Increment>& out) const;
  void build_fast(const StreamMoments& moments, const SparseSample& y, std::vector<Increment>& out) const;

  PairIndex pairs_;
  StreamConfig config_;
  std::optional<FeatureStats> pilot_;
  std::vector<uint8_t> zero_mean_;
  std::vector<uint8_t> dropped_mask_;
  std::vector<uint32_t> dropped_;
  std::vector<uint32_t> high_mean_;
};

}  // namespace ascs
