#pragma once

#include <cstdint>
#include <vector>

namespace ascs {

// One observation Y^(t) in sparse form: strictly increasing 0-based feature
// indices with their values. Omitted features are zero.
struct SparseSample {
  std::vector<uint32_t> index;
  std::vector<double> value;

  size_t nonzeros() const noexcept { return index.size(); }
  void push(uint32_t feature, double v) {
    index.push_back(feature);
    value.push_back(v);
  }

  friend bool operator==(const SparseSample&, const SparseSample&) = default;
};

// A finite dataset held in memory: rows over features [0, dim).
struct Dataset {
  uint32_t dim = 0;
  std::vector<SparseSample> rows;
};

// Dense row -> sparse sample, dropping exact zeros.
inline SparseSample to_sparse(const std::vector<double>& dense) {
  SparseSample out;
  for (uint32_t a = 0; a < dense.size(); ++a) {
    if (dense[a] != 0.0) out.push(a, dense[a]);
  }
  return out;
}

}  // namespace ascs
