#include "ascs/countsketch.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "ascs/error.hpp"

namespace ascs {

namespace {

// Negates v when negative is 1 by toggling the IEEE sign bit; no branch.
inline double flip_sign(double v, uint32_t negative) {
  return std::bit_cast<double>(std::bit_cast<uint64_t>(v) ^ (static_cast<uint64_t>(negative) << 63));
}

inline double median3(double x, double y, double z) {
  return std::max(std::min(x, y), std::min(std::max(x, y), z));
}

constexpr std::array<char, 4> kMagic = {'A', 'S', 'C', 'S'};
constexpr uint32_t kFormatVersion = 1;
constexpr uint32_t kStackTables = 32;

template <typename T>
void write_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, uint64_t,
                               std::conditional_t<sizeof(T) == 4, uint32_t, uint8_t>>;
  U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(U)> bytes{};
  for (size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFU);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T read_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, uint64_t,
                               std::conditional_t<sizeof(T) == 4, uint32_t, uint8_t>>;
  std::array<char, sizeof(U)> bytes{};
  in.read(bytes.data(), bytes.size());
  if (!in) throw IoError("truncated sketch snapshot");
  U bits = 0;
  for (size_t i = 0; i < sizeof(U); ++i) {
    bits |= static_cast<U>(static_cast<U>(static_cast<unsigned char>(bytes[i])) << (8 * i));
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

double median_inplace(std::span<double> values) {
  const size_t n = values.size();
  if (n == 0) return 0.0;
  if (n == 1) return values[0];
  if (n == 3) return median3(values[0], values[1], values[2]);
  if (n == 5) {
    const double lo = std::max(std::min(values[0], values[1]), std::min(values[2], values[3]));
    const double hi = std::min(std::max(values[0], values[1]), std::max(values[2], values[3]));
    return median3(values[4], lo, hi);
  }
  if (n <= 16) {
    // Odd-even transposition network: branch-free min/max, faster than
    // nth_element at typical table counts.
    for (size_t round = 0; round < n; ++round) {
      for (size_t i = round & 1; i + 1 < n; i += 2) {
        const double lo = std::min(values[i], values[i + 1]);
        values[i + 1] = std::max(values[i], values[i + 1]);
        values[i] = lo;
      }
    }
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  }
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

CountSketch::CountSketch(uint32_t tables, uint32_t buckets, uint64_t seed, uint64_t total_samples,
                         StatMode mode)
    : family_(seed, tables, buckets), total_samples_(total_samples), mode_(mode) {
  if (total_samples == 0) throw ArgumentError("sketch needs a positive total sample count T");
  table_.assign(static_cast<size_t>(tables) * buckets, 0.0);
}

void CountSketch::cache_placements(uint64_t universe) {
  const uint64_t slots = static_cast<uint64_t>(tables()) * buckets();
  if (slots >= (uint64_t{1} << 31)) return;  // packed slot would not fit
  const uint32_t k = tables();
  const uint32_t r = buckets();
  placements_.resize(static_cast<size_t>(universe) * k);
  for (uint64_t i = 0; i < universe; ++i) {
    for (uint32_t e = 0; e < k; ++e) {
      const uint32_t slot = e * r + family_.bucket_of(e, i);
      const uint32_t neg = family_.sign_of(e, i) < 0 ? kNegative : 0U;
      placements_[static_cast<size_t>(i) * k + e] = (slot << 1) | neg;
    }
  }
  cached_items_ = universe;
}

void CountSketch::insert(uint64_t item, double x) {
  if (!std::isfinite(x)) throw DataError("non-finite increment for item " + std::to_string(item));
  const double scaled = x / static_cast<double>(total_samples_);
  const uint32_t k = tables();
  if (cached(item)) {
    const uint32_t* packed = placements_.data() + static_cast<size_t>(item) * k;
    for (uint32_t e = 0; e < k; ++e) {
      const uint32_t p = packed[e];
      table_[p >> 1] += flip_sign(scaled, p & kNegative);
    }
    return;
  }
  const uint32_t r = buckets();
  for (uint32_t e = 0; e < k; ++e) {
    const size_t slot = static_cast<size_t>(e) * r + family_.bucket_of(e, item);
    table_[slot] += family_.sign_of(e, item) < 0 ? -scaled : scaled;
  }
}

double CountSketch::estimate(uint64_t item) const {
  const uint32_t k = tables();
  std::array<double, kStackTables> stack{};
  std::vector<double> heap;
  double* values = stack.data();
  if (k > kStackTables) {
    heap.resize(k);
    values = heap.data();
  }
  if (cached(item)) {
    const uint32_t* packed = placements_.data() + static_cast<size_t>(item) * k;
    for (uint32_t e = 0; e < k; ++e) {
      const uint32_t p = packed[e];
      values[e] = flip_sign(table_[p >> 1], p & kNegative);
    }
  } else {
    const uint32_t r = buckets();
    for (uint32_t e = 0; e < k; ++e) {
      const double w = table_[static_cast<size_t>(e) * r + family_.bucket_of(e, item)];
      values[e] = family_.sign_of(e, item) < 0 ? -w : w;
    }
  }
  return median_inplace(std::span<double>(values, k));
}

std::vector<ScoredItem> CountSketch::top_k(size_t k, std::span<const uint64_t> candidates) const {
  if (k > candidates.size()) {
    throw ArgumentError("top_k: k = " + std::to_string(k) + " exceeds " +
                        std::to_string(candidates.size()) + " candidates");
  }
  std::vector<ScoredItem> scored;
  scored.reserve(candidates.size());
  for (uint64_t item : candidates) scored.push_back({item, estimate(item)});
  auto better = [](const ScoredItem& a, const ScoredItem& b) {
    if (a.estimate != b.estimate) return a.estimate > b.estimate;
    return a.item < b.item;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    better);
  scored.resize(k);
  return scored;
}

void CountSketch::end_sample() {
  if (samples_seen_ >= total_samples_) {
    throw DataError("stream longer than the declared T = " + std::to_string(total_samples_));
  }
  ++samples_seen_;
}

void CountSketch::save(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  write_le<uint32_t>(out, kFormatVersion);
  write_le<uint32_t>(out, tables());
  write_le<uint32_t>(out, buckets());
  write_le<uint64_t>(out, seed());
  write_le<uint64_t>(out, total_samples_);
  write_le<uint64_t>(out, samples_seen_);
  write_le<uint8_t>(out, static_cast<uint8_t>(mode_));
  for (double w : table_) write_le<double>(out, w);
  if (!out) throw IoError("failed writing sketch snapshot");
}

CountSketch CountSketch::load(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("not a sketch snapshot (bad magic)");
  const auto version = read_le<uint32_t>(in);
  if (version != kFormatVersion) {
    throw IoError("unsupported snapshot version " + std::to_string(version));
  }
  const auto k = read_le<uint32_t>(in);
  const auto r = read_le<uint32_t>(in);
  const auto seed = read_le<uint64_t>(in);
  const auto total = read_le<uint64_t>(in);
  const auto seen = read_le<uint64_t>(in);
  const auto mode = read_le<uint8_t>(in);
  if (mode > 1) throw IoError("snapshot has unknown mode byte " + std::to_string(mode));
  if (k == 0 || r == 0 || total == 0 || seen > total) throw IoError("snapshot header is inconsistent");

  CountSketch sketch(k, r, seed, total, static_cast<StatMode>(mode));
  sketch.samples_seen_ = seen;
  for (double& w : sketch.table_) w = read_le<double>(in);
  return sketch;
}

void CountSketch::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  save(out);
}

CountSketch CountSketch::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return load(in);
}

}  // namespace ascs
