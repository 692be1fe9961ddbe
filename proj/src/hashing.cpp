#include "ascs/hashing.hpp"

#include "ascs/error.hpp"

namespace ascs {

HashFamily::HashFamily(uint64_t master_seed, uint32_t tables, uint32_t buckets)
    : master_seed_(master_seed), tables_(tables), buckets_(buckets) {
  if (tables == 0) throw ArgumentError("hash family needs at least one table");
  if (buckets == 0) throw ArgumentError("hash family needs at least one bucket per table");

  bucket_seeds_.reserve(tables);
  sign_seeds_.reserve(tables);
  uint64_t state = master_seed;
  for (uint32_t e = 0; e < tables; ++e) {
    state += kGoldenGamma;
    bucket_seeds_.push_back(mix64(state));
    state += kGoldenGamma;
    sign_seeds_.push_back(mix64(state));
  }
}

}  // namespace ascs
