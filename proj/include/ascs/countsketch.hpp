#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ascs/hashing.hpp"

namespace ascs {

// What the sketched increments represent. Stored in snapshots so a reader
// knows how to interpret the estimates.
enum class StatMode : uint8_t {
  covariance = 0,
  correlation = 1,
};

struct ScoredItem {
  uint64_t item;
  double estimate;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

// Signed count sketch over real-valued increments.
//
// W is a K x R array of doubles. insert(i, x) adds (x / T) * s_e(i) to
// W[e][h_e(i)] for every table e, so after a full stream of T samples the
// estimate of item i approximates its mean. The estimate is the median over
// tables of the signed bucket values; for even K the two middle order
// statistics are averaged.
class CountSketch {
 public:
  CountSketch(uint32_t tables, uint32_t buckets, uint64_t seed, uint64_t total_samples,
              StatMode mode = StatMode::covariance);

  // Raw increment X_i for the current sample; scaling by 1/T happens here.
  void insert(uint64_t item, double x);

  double estimate(uint64_t item) const;

  // The k candidates with the largest estimates, descending; ties go to the
  // smaller item index.
  std::vector<ScoredItem> top_k(size_t k, std::span<const uint64_t> candidates) const;

  // Marks the end of one stream sample. Throws DataError past T.
  void end_sample();

  // Precomputes bucket/sign placements for items [0, universe). Lookups for
  // cached items then skip hashing; results are identical either way.
  void cache_placements(uint64_t universe);

  uint32_t tables() const noexcept { return family_.tables(); }
  uint32_t buckets() const noexcept { return family_.buckets(); }
  uint64_t seed() const noexcept { return family_.master_seed(); }
  uint64_t total_samples() const noexcept { return total_samples_; }
  uint64_t samples_seen() const noexcept { return samples_seen_; }
  StatMode mode() const noexcept { return mode_; }
  const HashFamily& family() const noexcept { return family_; }

  // Row-major view of W: entry (e, b) lives at e * R + b.
  std::span<const double> table() const noexcept { return table_; }

  // Little-endian snapshot: "ASCS", u32 version, u32 K, u32 R, u64 seed,
  // u64 T, u64 samples seen, u8 mode, then K*R f64 row-major.
  void save(std::ostream& out) const;
  static CountSketch load(std::istream& in);
  void save_file(const std::string& path) const;
  static CountSketch load_file(const std::string& path);

 private:
  static constexpr uint32_t kNegative = 1U;

  bool cached(uint64_t item) const noexcept { return item < cached_items_; }

  HashFamily family_;
  uint64_t total_samples_;
  uint64_t samples_seen_ = 0;
  StatMode mode_;
  std::vector<double> table_;
  // Packed (flat slot << 1 | negative) for each (item, table), item-major.
  std::vector<uint32_t> placements_;
  uint64_t cached_items_ = 0;
};

// Median with the even-count convention used by CountSketch::estimate.
// Reorders its argument.
double median_inplace(std::span<double> values);

}  // namespace ascs
