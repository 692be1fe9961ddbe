#include "ascs/covstream.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ascs/error.hpp"

namespace ascs {

PairIndex::PairIndex(uint32_t dim) : dim_(dim), size_(static_cast<uint64_t>(dim) * (dim > 0 ? dim - 1 : 0) / 2) {
  if (dim < 2) throw ArgumentError("pair index needs at least two features, got d = " + std::to_string(dim));
}

uint64_t PairIndex::index(uint32_t a, uint32_t b) const {
  if (a >= b || b >= dim_) {
    throw ArgumentError("pair (" + std::to_string(a) + ", " + std::to_string(b) + ") is not a < b < d = " +
                        std::to_string(dim_));
  }
  return row_start(a) + (b - a - 1);
}

std::pair<uint32_t, uint32_t> PairIndex::pair(uint64_t item) const {
  if (item >= size_) throw ArgumentError("item " + std::to_string(item) + " outside [0, p)");
  // Largest row a with row_start(a) <= item.
  uint32_t lo = 0;
  uint32_t hi = dim_ - 1;
  while (hi - lo > 1) {
    const uint32_t mid = lo + (hi - lo) / 2;
    if (row_start(mid) <= item) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const uint32_t a = row_start(hi) <= item ? hi : lo;
  return {a, static_cast<uint32_t>(a + 1 + (item - row_start(a)))};
}

StreamMoments::StreamMoments(uint32_t dim) : mean_(dim, 0.0), previous_mean_(dim, 0.0), m2_(dim, 0.0) {}

void StreamMoments::update(const SparseSample& y) {
  ++count_;
  previous_mean_ = mean_;
  const double n = static_cast<double>(count_);
  size_t next = 0;
  for (uint32_t a = 0; a < mean_.size(); ++a) {
    double value = 0.0;
    if (next < y.index.size() && y.index[next] == a) value = y.value[next++];
    const double delta = value - mean_[a];
    mean_[a] += delta / n;
    m2_[a] += delta * (value - mean_[a]);
  }
  if (next != y.index.size()) throw DataError("sample has feature indices outside [0, d) or out of order");
}

double StreamMoments::variance(uint32_t a) const {
  if (count_ == 0) return 0.0;
  return m2_[a] / static_cast<double>(count_);
}

double StreamMoments::stddev(uint32_t a) const { return std::sqrt(variance(a)); }

FeatureStats FeatureStats::from(const StreamMoments& moments) {
  FeatureStats stats;
  stats.mean.assign(moments.mean().begin(), moments.mean().end());
  stats.stddev.resize(moments.dim());
  for (uint32_t a = 0; a < moments.dim(); ++a) stats.stddev[a] = moments.stddev(a);
  return stats;
}

void StreamConfig::validate() const {
  if (!(sparse_eps >= 0.0)) throw ArgumentError("sparse_eps must be >= 0");
  if (adjustment && mode == StatMode::correlation) {
    throw ArgumentError("the mean-drift adjustment applies to covariance mode only");
  }
}

double mean_drift_adjustment(const StreamMoments& moments, uint32_t a, uint32_t b) {
  if (moments.count() == 0) return 0.0;
  const double before = static_cast<double>(moments.count() - 1);
  const double da = moments.previous_mean()[a] - moments.mean()[a];
  const double db = moments.previous_mean()[b] - moments.mean()[b];
  return before * da * db;
}

IncrementBuilder::IncrementBuilder(uint32_t dim, StreamConfig config, std::optional<FeatureStats> pilot)
    : pairs_(dim), config_(config), pilot_(std::move(pilot)), zero_mean_(dim, 0), dropped_mask_(dim, 0) {
  config_.validate();
  const bool needs_pilot = config_.mode == StatMode::correlation || config_.fast_path;
  if (needs_pilot && !pilot_) {
    throw ArgumentError("correlation mode and the sparse fast path need pilot feature moments");
  }
  if (pilot_ && (pilot_->mean.size() != dim || pilot_->stddev.size() != dim)) {
    throw ArgumentError("pilot moments have the wrong dimension");
  }
  if (config_.mode == StatMode::correlation) {
    for (uint32_t a = 0; a < dim; ++a) {
      if (!(pilot_->stddev[a] > 0.0)) {
        dropped_mask_[a] = 1;
        dropped_.push_back(a);
      }
    }
  }
  if (config_.fast_path) {
    for (uint32_t a = 0; a < dim; ++a) {
      const double m = pilot_->mean[a];
      const double s = pilot_->stddev[a];
      const bool negligible = s > 0.0 ? std::abs(m / s) < config_.sparse_eps : m == 0.0;
      zero_mean_[a] = negligible ? 1 : 0;
      if (!negligible && !dropped_mask_[a]) high_mean_.push_back(a);
    }
  }
}

void IncrementBuilder::build(const StreamMoments& moments, const SparseSample& y, std::vector<Increment>& out) const {
  out.clear();
  if (moments.dim() != pairs_.dim()) throw ArgumentError("moments dimension does not match the builder");
  if (config_.mode == StatMode::covariance && moments.count() == 0) {
    throw ArgumentError("update the stream moments with the sample before building its increments");
  }
  if (!y.index.empty() && y.index.back() >= pairs_.dim()) {
    throw DataError("feature index " + std::to_string(y.index.back()) + " outside [0, d)");
  }
  if (config_.fast_path) {
    build_fast(moments, y, out);
  } else {
    build_full(moments, y, out);
  }
}

void IncrementBuilder::build_full(const StreamMoments& moments, const SparseSample& y,
                                  std::vector<Increment>& out) const {
  const uint32_t d = pairs_.dim();
  std::vector<double> centred(d, 0.0);
  for (size_t k = 0; k < y.index.size(); ++k) centred[y.index[k]] = y.value[k];

  if (config_.mode == StatMode::correlation) {
    for (uint32_t a = 0; a < d; ++a) {
      centred[a] = dropped_mask_[a] ? 0.0 : (centred[a] - pilot_->mean[a]) / pilot_->stddev[a];
    }
    out.reserve(pairs_.size());
    for (uint32_t a = 0; a + 1 < d; ++a) {
      if (dropped_mask_[a]) continue;
      const uint64_t base = pairs_.row_start(a) - (a + 1);
      for (uint32_t b = a + 1; b < d; ++b) {
        if (dropped_mask_[b]) continue;
        out.push_back({base + b, centred[a] * centred[b]});
      }
    }
    return;
  }

  const auto mean = moments.mean();
  for (uint32_t a = 0; a < d; ++a) centred[a] -= mean[a];

  out.resize(pairs_.size());
  uint64_t item = 0;
  if (!config_.adjustment) {
    for (uint32_t a = 0; a + 1 < d; ++a) {
      const double ca = centred[a];
      for (uint32_t b = a + 1; b < d; ++b, ++item) out[item] = {item, ca * centred[b]};
    }
    return;
  }
  const auto previous = moments.previous_mean();
  const double before = static_cast<double>(moments.count() - 1);
  std::vector<double> drift(d);
  for (uint32_t a = 0; a < d; ++a) drift[a] = previous[a] - mean[a];
  for (uint32_t a = 0; a + 1 < d; ++a) {
    const double ca = centred[a];
    const double da = before * drift[a];
    for (uint32_t b = a + 1; b < d; ++b, ++item) out[item] = {item, ca * centred[b] + da * drift[b]};
  }
}

void IncrementBuilder::build_fast(const StreamMoments& moments, const SparseSample& y,
                                  std::vector<Increment>& out) const {
  const bool correlation = config_.mode == StatMode::correlation;

  struct Entry {
    uint32_t feature;
    double value;
  };
  // Sorted union of the sample's non-zeros and the non-zero-mean features.
  std::vector<Entry> candidates;
  candidates.reserve(y.index.size() + high_mean_.size());
  size_t i = 0;
  size_t h = 0;
  while (i < y.index.size() || h < high_mean_.size()) {
    const uint32_t fy = i < y.index.size() ? y.index[i] : UINT32_MAX;
    const uint32_t fh = h < high_mean_.size() ? high_mean_[h] : UINT32_MAX;
    if (fy <= fh) {
      if (!dropped_mask_[fy]) candidates.push_back({fy, y.value[i]});
      ++i;
      if (fy == fh) ++h;
    } else {
      candidates.push_back({fh, 0.0});
      ++h;
    }
  }

  const size_t n = candidates.size();
  std::vector<double> raw(n);
  std::vector<double> centred(n);
  std::vector<double> drift(n, 0.0);
  for (size_t k = 0; k < n; ++k) {
    const uint32_t a = candidates[k].feature;
    const double v = candidates[k].value;
    if (correlation) {
      raw[k] = v / pilot_->stddev[a];
      centred[k] = (v - pilot_->mean[a]) / pilot_->stddev[a];
    } else {
      raw[k] = v;
      centred[k] = v - moments.mean()[a];
      if (config_.adjustment) drift[k] = moments.previous_mean()[a] - moments.mean()[a];
    }
  }
  const double before = correlation ? 0.0 : static_cast<double>(moments.count() - 1);

  for (size_t p = 0; p + 1 < n; ++p) {
    const uint32_t a = candidates[p].feature;
    const bool a_high = !zero_mean_[a];
    const bool a_nonzero = candidates[p].value != 0.0;
    const uint64_t base = pairs_.row_start(a) - (a + 1);
    for (size_t q = p + 1; q < n; ++q) {
      const uint32_t b = candidates[q].feature;
      if (a_high && !zero_mean_[b]) {
        double x = centred[p] * centred[q];
        if (config_.adjustment) x += before * drift[p] * drift[q];
        out.push_back({base + b, x});
      } else if (a_nonzero && candidates[q].value != 0.0) {
        out.push_back({base + b, raw[p] * raw[q]});
      }
    }
  }
}

}  // namespace ascs
