#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ascs/active_sampler.hpp"
#include "ascs/countsketch.hpp"
#include "ascs/datagen.hpp"
#include "ascs/sample.hpp"

namespace ascs {

inline constexpr uint64_t kMaxExactPairs = 100'000'000;

// Exact empirical covariances (divided by T) or correlations of every pair,
// in row-major pair order. Pairs touching a zero-variance feature get 0 in
// correlation mode.
struct ExactMatrix {
  uint32_t dim = 0;
  StatMode mode = StatMode::covariance;
  std::vector<double> values;

  double at(uint32_t a, uint32_t b) const;
};

// Two-pass oracle. Throws ArgumentError when p exceeds kMaxExactPairs.
ExactMatrix exact_matrix(const Dataset& data, StatMode mode);

// Estimates of items [0, p).
std::vector<double> all_estimates(const CountSketch& sketch, uint64_t p);

// Items sorted by descending value, ties to the smaller index.
std::vector<uint64_t> rank_descending(std::span<const double> values);

// Mean true |value| of the round(fraction * alpha * p) items with the largest
// estimates. Throws ArgumentError when that count is below one.
double mean_top_correlation(std::span<const double> estimates, std::span<const double> exact, double fraction,
                            double alpha);

// Ground truth is the top_n items by true |value|. Predictions are the top m
// items by estimate for m = 1 .. min(10 top_n, p); returns the best F1.
double max_f1(std::span<const double> estimates, std::span<const double> exact, uint64_t top_n);

// Same sweep with ground truth {i : |exact_i| >= threshold}. Returns 0 when
// nothing reaches the threshold.
double max_f1_threshold(std::span<const double> estimates, std::span<const double> exact, double threshold);

// Per-step squared mass of inserted signal and noise increments, summed over
// however many runs were recorded into it. Index t is sample t (1-based).
struct SnrTrace {
  std::vector<double> signal_sq;
  std::vector<double> noise_sq;
  uint64_t runs = 0;

  explicit SnrTrace(uint64_t T = 0) : signal_sq(T + 1, 0.0), noise_sq(T + 1, 0.0) {}

  void merge(const SnrTrace& other);
};

// Ratio of inserted signal to inserted noise mass at step t; +infinity when
// no noise was inserted.
double measure_snr(const SnrTrace& trace, uint64_t t);

// Observer that feeds an SnrTrace. Set `step` before each sample.
struct SnrRecorder {
  SnrTrace* trace;
  const std::vector<uint8_t>* is_signal;
  uint64_t step = 0;

  void operator()(const Increment& inc, double, bool inserted) const {
    if (!inserted) return;
    const double sq = inc.value * inc.value;
    if ((*is_signal)[inc.item]) {
      trace->signal_sq[step] += sq;
    } else {
      trace->noise_sq[step] += sq;
    }
  }
};

std::vector<uint8_t> signal_mask(uint64_t p, std::span<const uint64_t> signals);

// Worker count for replicate loops: ASCS_THREADS if set, else the hardware
// concurrency, never more than `jobs`.
unsigned worker_threads(uint64_t jobs);

struct ValidationSetup {
  uint32_t tables = 5;
  uint32_t buckets = 1;
  ThresholdSchedule schedule;
  GateMode gate = GateMode::absolute;
  uint64_t replicates = 300;
  uint64_t seed = 1;  // per-replicate stream and hash seeds derive from this
};

struct ValidationResult {
  uint64_t replicates = 0;
  uint64_t signals = 0;        // signal pairs per replicate
  uint64_t missed_at_T0 = 0;   // |mu_hat(T0)| below tau(T0), gate sense
  uint64_t kept_at_T0 = 0;
  uint64_t dropped_after = 0;  // kept at T0, then failed the gate at a later step
  SnrTrace snr;

  double miss_at_T0() const;
  // Conditional on having been kept at T0.
  double miss_after() const;
};

// Monte-Carlo run of the active sampler on covariance increments of streams
// drawn from one fixed model. Replicates run in parallel and are merged in
// replicate order, so results do not depend on the thread count.
ValidationResult validate_miss_probability(const CovarianceModel& model, const ValidationSetup& setup);

// Seeds used by replicate r of a validation run.
uint64_t replicate_stream_seed(uint64_t seed, uint64_t r);
uint64_t replicate_hash_seed(uint64_t seed, uint64_t r);

inline constexpr double kReportFractions[] = {0.01, 0.05, 0.1, 0.25, 0.5, 1.0};

struct SnrPoint {
  uint64_t t;
  double empirical;
  double bound;
};

struct EvalReport {
  std::map<double, double> mean_top_corr;
  std::map<uint64_t, double> max_f1;
  std::vector<SnrPoint> snr_curve;
  double miss_at_T0 = -1.0;  // negative when not measured
  double delta = -1.0;
  double miss_after = -1.0;
  double delta_after = -1.0;
};

class CsvWriter;

// Columns of the report CSV: metric, engine, key, value, target, seed.
std::vector<std::string> report_csv_header();
void write_report_rows(CsvWriter& csv, std::string_view engine, const EvalReport& report, uint64_t seed);

}  // namespace ascs
