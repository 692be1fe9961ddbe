#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace ascs {

// SplitMix64 finalizer. Bijective on 64-bit words with full avalanche.
constexpr uint64_t mix64(uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Seeded bucket and sign hash functions for a K x R count sketch.
//
// Each table e owns two sub-seeds drawn from a SplitMix64 stream started at
// master_seed; the bucket of item i is the SplitMix64 output at position i of
// the stream keyed by the table's bucket seed, reduced mod R. The sign uses the
// low bit of the independent sign stream. Modulo bias for non power of two R is
// at most R / 2^64.
class HashFamily {
 public:
  HashFamily(uint64_t master_seed, uint32_t tables, uint32_t buckets);

  uint32_t bucket_of(uint32_t table, uint64_t item) const noexcept {
    assert(table < tables_);
    return static_cast<uint32_t>(mix64(bucket_seeds_[table] + (item + 1) * kGoldenGamma) % buckets_);
  }

  int sign_of(uint32_t table, uint64_t item) const noexcept {
    assert(table < tables_);
    return (mix64(sign_seeds_[table] + (item + 1) * kGoldenGamma) & 1U) ? 1 : -1;
  }

  uint64_t master_seed() const noexcept { return master_seed_; }
  uint32_t tables() const noexcept { return tables_; }
  uint32_t buckets() const noexcept { return buckets_; }

 private:
  uint64_t master_seed_;
  uint32_t tables_;
  uint32_t buckets_;
  std::vector<uint64_t> bucket_seeds_;
  std::vector<uint64_t> sign_seeds_;
};

}  // namespace ascs
