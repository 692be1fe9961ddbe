#include "ascs/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "ascs/error.hpp"

namespace ascs {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

std::string_view next_token(std::string_view& rest) {
  size_t start = 0;
  while (start < rest.size() && is_space(rest[start])) ++start;
  size_t end = start;
  while (end < rest.size() && !is_space(rest[end])) ++end;
  std::string_view token = rest.substr(start, end - start);
  rest.remove_prefix(end);
  return token;
}

[[noreturn]] void fail(uint64_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

std::string_view strip_comment(std::string_view line) {
  const size_t hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), is_space);
}

}  // namespace

SparseSample parse_libsvm(std::string_view line, uint64_t line_no, std::optional<uint32_t> dim) {
  std::string_view rest = strip_comment(line);
  if (next_token(rest).empty()) fail(line_no, "missing label");

  SparseSample out;
  uint64_t previous = 0;
  for (std::string_view token = next_token(rest); !token.empty(); token = next_token(rest)) {
    const size_t colon = token.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == token.size()) {
      fail(line_no, "malformed token '" + std::string(token) + "', expected index:value");
    }
    uint64_t index = 0;
    const char* key_end = token.data() + colon;
    auto [kp, kec] = std::from_chars(token.data(), key_end, index);
    if (kec != std::errc() || kp != key_end) fail(line_no, "bad feature index in '" + std::string(token) + "'");
    if (index == 0) fail(line_no, "feature indices are 1-based, got 0");
    if (index <= previous) fail(line_no, "feature index " + std::to_string(index) + " is not increasing");
    if (index > UINT32_MAX || (dim && index > *dim)) {
      fail(line_no, "feature index " + std::to_string(index) + " exceeds the dimension");
    }

    double value = 0.0;
    const char* value_begin = key_end + 1;
    const char* value_end = token.data() + token.size();
    auto [vp, vec] = std::from_chars(value_begin, value_end, value);
    if (vec != std::errc() || vp != value_end) fail(line_no, "bad value in '" + std::string(token) + "'");
    if (!std::isfinite(value)) fail(line_no, "non-finite value in '" + std::string(token) + "'");

    previous = index;
    if (value != 0.0) out.push(static_cast<uint32_t>(index - 1), value);
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string format_libsvm(const SparseSample& sample, std::string_view label) {
  std::string out(label);
  for (size_t k = 0; k < sample.index.size(); ++k) {
    out += ' ';
    out += std::to_string(static_cast<uint64_t>(sample.index[k]) + 1);
    out += ':';
    out += format_double(sample.value[k]);
  }
  return out;
}

void read_libsvm(std::istream& in, std::optional<uint32_t> dim, const std::function<void(SparseSample&&)>& sink) {
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(strip_comment(line))) continue;
    sink(parse_libsvm(line, line_no, dim));
  }
  if (in.bad()) throw IoError("read error after line " + std::to_string(line_no));
}

uint32_t scan_libsvm_dimension(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  uint32_t dim = 0;
  read_libsvm(in, std::nullopt, [&](SparseSample&& s) {
    if (!s.index.empty()) dim = std::max(dim, s.index.back() + 1);
  });
  return dim;
}

Dataset load_libsvm(const std::string& path, std::optional<uint32_t> dim) {
  Dataset out;
  out.dim = dim ? *dim : scan_libsvm_dimension(path);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  read_libsvm(in, out.dim, [&](SparseSample&& s) { out.rows.push_back(std::move(s)); });
  return out;
}

void write_libsvm(const std::string& path, const Dataset& data) {
  std::ofstream out = open_output(path);
  for (const auto& row : data.rows) out << format_libsvm(row) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

ShuffleBuffer::ShuffleBuffer(size_t capacity, uint64_t seed) : capacity_(capacity), rng_(seed) {
  if (capacity == 0) throw ArgumentError("shuffle capacity must be >= 1");
  buffer_.reserve(capacity);
}

std::optional<SparseSample> ShuffleBuffer::push(SparseSample sample) {
  if (buffer_.size() < capacity_) {
    buffer_.push_back(std::move(sample));
    return std::nullopt;
  }
  const size_t j = std::uniform_int_distribution<size_t>(0, capacity_ - 1)(rng_);
  std::optional<SparseSample> out(std::move(buffer_[j]));
  buffer_[j] = std::move(sample);
  return out;
}

std::vector<SparseSample> ShuffleBuffer::finish() {
  std::vector<SparseSample> out;
  out.reserve(buffer_.size());
  while (!buffer_.empty()) {
    const size_t j = std::uniform_int_distribution<size_t>(0, buffer_.size() - 1)(rng_);
    out.push_back(std::move(buffer_[j]));
    buffer_[j] = std::move(buffer_.back());
    buffer_.pop_back();
  }
  return out;
}

std::vector<SparseSample> shuffled_stream(std::vector<SparseSample> source, size_t capacity, uint64_t seed) {
  ShuffleBuffer buffer(capacity, seed);
  std::vector<SparseSample> out;
  out.reserve(source.size());
  for (auto& s : source) {
    if (auto emitted = buffer.push(std::move(s))) out.push_back(std::move(*emitted));
  }
  for (auto& s : buffer.finish()) out.push_back(std::move(s));
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
  for (size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  if (filled_ == columns_) throw ArgumentError("csv row has more cells than header columns");
  if (filled_++) out_ << ',';
  out_ << text;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_double(v))); }
CsvWriter& CsvWriter::cell(uint64_t v) { return cell(std::string_view(std::to_string(v))); }
CsvWriter& CsvWriter::cell(int64_t v) { return cell(std::string_view(std::to_string(v))); }

void CsvWriter::end_row() {
  if (filled_ != columns_) throw ArgumentError("csv row has fewer cells than header columns");
  out_ << '\n';
  filled_ = 0;
}

std::ofstream open_output(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

}  // namespace ascs
