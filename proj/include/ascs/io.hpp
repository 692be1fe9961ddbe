#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ascs/sample.hpp"

namespace ascs {

// "label idx:val idx:val ..." with 1-based strictly increasing indices. The
// label is discarded. When dim is given, indices above it are rejected.
// Errors are DataError naming line_no.
SparseSample parse_libsvm(std::string_view line, uint64_t line_no = 0, std::optional<uint32_t> dim = std::nullopt);

// Inverse of parse_libsvm with values printed to round-trip exactly.
std::string format_libsvm(const SparseSample& sample, std::string_view label = "0");

// Calls `sink` once per non-blank line of the stream, in order.
void read_libsvm(std::istream& in, std::optional<uint32_t> dim, const std::function<void(SparseSample&&)>& sink);

// Largest 1-based index in the file, which is the inferred dimension.
uint32_t scan_libsvm_dimension(const std::string& path);

// Reads a whole file. Without dim the file is pre-scanned for it.
Dataset load_libsvm(const std::string& path, std::optional<uint32_t> dim = std::nullopt);

void write_libsvm(const std::string& path, const Dataset& data);

// Fill the buffer, then for every new sample emit a uniformly chosen buffered
// one and put the new sample in its slot. finish() drains the rest in random
// order.
class ShuffleBuffer {
 public:
  ShuffleBuffer(size_t capacity, uint64_t seed);

  // Emitted sample, if the buffer was already full.
  std::optional<SparseSample> push(SparseSample sample);
  std::vector<SparseSample> finish();

  size_t capacity() const noexcept { return capacity_; }
  size_t size() const noexcept { return buffer_.size(); }

 private:
  size_t capacity_;
  std::mt19937_64 rng_;
  std::vector<SparseSample> buffer_;
};

std::vector<SparseSample> shuffled_stream(std::vector<SparseSample> source, size_t capacity, uint64_t seed);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Writes a comma-separated header row on construction and one row per call.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double v);
  CsvWriter& cell(uint64_t v);
  CsvWriter& cell(int64_t v);
  CsvWriter& cell(uint32_t v) { return cell(static_cast<uint64_t>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<int64_t>(v)); }
  void end_row();

 private:
  std::ostream& out_;
  size_t columns_;
  size_t filled_ = 0;
};

// Opens for writing or throws IoError.
std::ofstream open_output(const std::string& path, bool binary = false);

}  // namespace ascs
