#include "ascs/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include "ascs/covstream.hpp"
#include "ascs/error.hpp"
#include "ascs/hashing.hpp"
#include "ascs/io.hpp"
#include "ascs/pipeline.hpp"

namespace ascs {

double ExactMatrix::at(uint32_t a, uint32_t b) const { return values[PairIndex(dim).index(a, b)]; }

ExactMatrix exact_matrix(const Dataset& data, StatMode mode) {
  const PairIndex pairs(data.dim);
  if (pairs.size() > kMaxExactPairs) {
    throw ArgumentError("exact oracle unavailable: " + std::to_string(pairs.size()) + " pairs exceed the limit of " +
                        std::to_string(kMaxExactPairs));
  }
  if (data.rows.empty()) throw DataError("exact oracle needs at least one sample");
  const uint32_t d = data.dim;
  const double n = static_cast<double>(data.rows.size());

  std::vector<double> mean(d, 0.0);
  for (const auto& row : data.rows) {
    for (size_t k = 0; k < row.index.size(); ++k) mean[row.index[k]] += row.value[k];
  }
  for (double& m : mean) m /= n;

  ExactMatrix out;
  out.dim = d;
  out.mode = mode;
  out.values.assign(pairs.size(), 0.0);
  std::vector<double> var(d, 0.0);
  std::vector<double> c(d);
  for (const auto& row : data.rows) {
    for (uint32_t a = 0; a < d; ++a) c[a] = -mean[a];
    for (size_t k = 0; k < row.index.size(); ++k) c[row.index[k]] += row.value[k];
    uint64_t item = 0;
    for (uint32_t a = 0; a < d; ++a) {
      var[a] += c[a] * c[a];
      const double ca = c[a];
      for (uint32_t b = a + 1; b < d; ++b, ++item) out.values[item] += ca * c[b];
    }
  }
  uint64_t item = 0;
  for (uint32_t a = 0; a + 1 < d; ++a) {
    for (uint32_t b = a + 1; b < d; ++b, ++item) {
      double& v = out.values[item];
      if (mode == StatMode::covariance) {
        v /= n;
      } else {
        const double denom = std::sqrt(var[a] * var[b]);
        v = denom > 0.0 ? v / denom : 0.0;
      }
    }
  }
  return out;
}

std::vector<double> all_estimates(const CountSketch& sketch, uint64_t p) {
  std::vector<double> out(p);
  for (uint64_t i = 0; i < p; ++i) out[i] = sketch.estimate(i);
  return out;
}

std::vector<uint64_t> rank_descending(std::span<const double> values) {
  std::vector<uint64_t> order(values.size());
  std::iota(order.begin(), order.end(), uint64_t{0});
  std::stable_sort(order.begin(), order.end(), [&](uint64_t x, uint64_t y) { return values[x] > values[y]; });
  return order;
}

namespace {

void check_sizes(std::span<const double> estimates, std::span<const double> exact) {
  if (estimates.size() != exact.size()) throw ArgumentError("estimates and exact values differ in length");
  if (exact.empty()) throw ArgumentError("no items to evaluate");
}

// Best F1 of the estimate-order prefixes against a truth mask with n_true members.
double sweep_f1(std::span<const double> estimates, const std::vector<uint8_t>& truth, uint64_t n_true) {
  if (n_true == 0) return 0.0;
  const uint64_t cap = std::min<uint64_t>(10 * n_true, estimates.size());
  std::vector<uint64_t> order(estimates.size());
  std::iota(order.begin(), order.end(), uint64_t{0});
  const auto by_estimate = [&](uint64_t x, uint64_t y) {
    return estimates[x] > estimates[y] || (estimates[x] == estimates[y] && x < y);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<ptrdiff_t>(cap), order.end(), by_estimate);
  uint64_t hits = 0;
  double best = 0.0;
  for (uint64_t m = 1; m <= cap; ++m) {
    hits += truth[order[m - 1]];
    best = std::max(best, 2.0 * static_cast<double>(hits) / static_cast<double>(m + n_true));
  }
  return best;
}

}  // namespace

double mean_top_correlation(std::span<const double> estimates, std::span<const double> exact, double fraction,
                            double alpha) {
  check_sizes(estimates, exact);
  const double target = fraction * alpha * static_cast<double>(exact.size());
  const auto n = static_cast<uint64_t>(std::llround(target));
  if (n < 1) throw ArgumentError("fraction * alpha * p rounds to zero items");
  if (n > exact.size()) throw ArgumentError("fraction * alpha * p exceeds p");
  std::vector<uint64_t> order(estimates.size());
  std::iota(order.begin(), order.end(), uint64_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<ptrdiff_t>(n), order.end(), [&](uint64_t x, uint64_t y) {
    return estimates[x] > estimates[y] || (estimates[x] == estimates[y] && x < y);
  });
  double sum = 0.0;
  for (uint64_t k = 0; k < n; ++k) sum += std::abs(exact[order[k]]);
  return sum / static_cast<double>(n);
}

double max_f1(std::span<const double> estimates, std::span<const double> exact, uint64_t top_n) {
  check_sizes(estimates, exact);
  if (top_n < 1) throw ArgumentError("top_n must be >= 1");
  top_n = std::min<uint64_t>(top_n, exact.size());
  std::vector<double> magnitude(exact.size());
  for (size_t i = 0; i < exact.size(); ++i) magnitude[i] = std::abs(exact[i]);
  std::vector<uint64_t> order(exact.size());
  std::iota(order.begin(), order.end(), uint64_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<ptrdiff_t>(top_n), order.end(),
                    [&](uint64_t x, uint64_t y) {
                      return magnitude[x] > magnitude[y] || (magnitude[x] == magnitude[y] && x < y);
                    });
  std::vector<uint8_t> truth(exact.size(), 0);
  for (uint64_t k = 0; k < top_n; ++k) truth[order[k]] = 1;
  return sweep_f1(estimates, truth, top_n);
}

double max_f1_threshold(std::span<const double> estimates, std::span<const double> exact, double threshold) {
  check_sizes(estimates, exact);
  std::vector<uint8_t> truth(exact.size(), 0);
  uint64_t n_true = 0;
  for (size_t i = 0; i < exact.size(); ++i) {
    if (std::abs(exact[i]) >= threshold) {
      truth[i] = 1;
      ++n_true;
    }
  }
  return sweep_f1(estimates, truth, n_true);
}

void SnrTrace::merge(const SnrTrace& other) {
  if (other.signal_sq.size() != signal_sq.size()) throw ArgumentError("cannot merge traces of different lengths");
  for (size_t t = 0; t < signal_sq.size(); ++t) {
    signal_sq[t] += other.signal_sq[t];
    noise_sq[t] += other.noise_sq[t];
  }
  runs += other.runs;
}

double measure_snr(const SnrTrace& trace, uint64_t t) {
  if (t == 0 || t >= trace.signal_sq.size()) throw ArgumentError("step " + std::to_string(t) + " not in the trace");
  if (trace.noise_sq[t] == 0.0) return std::numeric_limits<double>::infinity();
  return trace.signal_sq[t] / trace.noise_sq[t];
}

std::vector<uint8_t> signal_mask(uint64_t p, std::span<const uint64_t> signals) {
  std::vector<uint8_t> mask(p, 0);
  for (uint64_t s : signals) {
    if (s >= p) throw ArgumentError("signal item outside [0, p)");
    mask[s] = 1;
  }
  return mask;
}

unsigned worker_threads(uint64_t jobs) {
  unsigned n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ASCS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::max<uint64_t>(1, std::min<uint64_t>(n, jobs)));
}

uint64_t replicate_stream_seed(uint64_t seed, uint64_t r) { return mix64(mix64(seed) + (2 * r + 1) * kGoldenGamma); }
uint64_t replicate_hash_seed(uint64_t seed, uint64_t r) { return mix64(mix64(seed) + (2 * r + 2) * kGoldenGamma); }

double ValidationResult::miss_at_T0() const {
  const uint64_t total = replicates * signals;
  return total ? static_cast<double>(missed_at_T0) / static_cast<double>(total) : 0.0;
}

double ValidationResult::miss_after() const {
  return kept_at_T0 ? static_cast<double>(dropped_after) / static_cast<double>(kept_at_T0) : 0.0;
}

namespace {

struct ReplicateOutcome {
  uint64_t missed = 0;
  uint64_t kept = 0;
  uint64_t dropped = 0;
  SnrTrace snr;
};

ReplicateOutcome run_replicate(const CovarianceModel& model, const GaussianSampler& sampler,
                               const ValidationSetup& setup, const std::vector<uint8_t>& is_signal, uint64_t r) {
  const ThresholdSchedule& schedule = setup.schedule;
  const uint64_t T = schedule.total;
  const uint64_t T0 = schedule.explore;

  EngineConfig engine;
  engine.engine = Engine::ascs;
  engine.tables = setup.tables;
  engine.buckets = setup.buckets;
  engine.seed = replicate_hash_seed(setup.seed, r);
  engine.total = T;
  engine.schedule = schedule;
  engine.gate = setup.gate;
  StreamSketcher sketcher(sampler.dim(), StreamConfig{}, std::nullopt, engine);

  ReplicateOutcome out;
  out.snr = SnrTrace(T);
  out.snr.runs = 1;
  enum : uint8_t { kUnseen, kKept, kDropped };
  std::vector<uint8_t> state(is_signal.size(), kUnseen);

  SnrRecorder recorder{&out.snr, &is_signal, 0};
  std::mt19937_64 rng(replicate_stream_seed(setup.seed, r));
  Eigen::VectorXd y;
  SparseSample sample;
  for (uint64_t t = 1; t <= T; ++t) {
    sampler.draw(rng, y);
    sample.index.clear();
    sample.value.clear();
    for (Eigen::Index a = 0; a < y.size(); ++a) {
      if (y[a] != 0.0) sample.push(static_cast<uint32_t>(a), y[a]);
    }
    recorder.step = t;
    const bool watch = t >= T0 + 2;
    sketcher.push(sample, [&](const Increment& inc, double estimate, bool inserted) {
      recorder(inc, estimate, inserted);
      if (watch && !inserted && state[inc.item] == kKept) state[inc.item] = kDropped;
    });
    if (t == T0) {
      for (uint64_t s : model.signal_pairs) {
        if (gate_passes(setup.gate, sketcher.sketch().estimate(s), schedule.tau0)) {
          state[s] = kKept;
        } else {
          ++out.missed;
        }
      }
    }
  }
  if (T > T0) {
    const double tau_end = tau_at(schedule, T);
    for (uint64_t s : model.signal_pairs) {
      if (state[s] == kKept && !gate_passes(setup.gate, sketcher.sketch().estimate(s), tau_end)) state[s] = kDropped;
    }
  }
  for (uint64_t s : model.signal_pairs) {
    if (state[s] != kUnseen) ++out.kept;
    if (state[s] == kDropped) ++out.dropped;
  }
  return out;
}

}  // namespace

ValidationResult validate_miss_probability(const CovarianceModel& model, const ValidationSetup& setup) {
  setup.schedule.validate();
  if (setup.replicates == 0) throw ArgumentError("validation needs at least one replicate");
  const uint32_t d = static_cast<uint32_t>(model.matrix.rows());
  const PairIndex pairs(d);
  const std::vector<uint8_t> is_signal = signal_mask(pairs.size(), model.signal_pairs);
  const GaussianSampler sampler(model.matrix);

  std::vector<ReplicateOutcome> outcomes(setup.replicates);
  std::atomic<uint64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto work = [&] {
    for (uint64_t r = next++; r < setup.replicates && !failed; r = next++) {
      try {
        outcomes[r] = run_replicate(model, sampler, setup, is_signal, r);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = worker_threads(setup.replicates);
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  ValidationResult result;
  result.replicates = setup.replicates;
  result.signals = model.signal_pairs.size();
  result.snr = SnrTrace(setup.schedule.total);
  for (const auto& o : outcomes) {
    result.missed_at_T0 += o.missed;
    result.kept_at_T0 += o.kept;
    result.dropped_after += o.dropped;
    result.snr.merge(o.snr);
  }
  return result;
}

std::vector<std::string> report_csv_header() { return {"metric", "engine", "key", "value", "target", "seed"}; }

void write_report_rows(CsvWriter& csv, std::string_view engine, const EvalReport& report, uint64_t seed) {
  for (const auto& [fraction, value] : report.mean_top_corr) {
    csv.cell("mean_top_corr").cell(engine).cell(fraction).cell(value).cell("").cell(seed).end_row();
  }
  for (const auto& [top_n, value] : report.max_f1) {
    csv.cell("max_f1").cell(engine).cell(top_n).cell(value).cell("").cell(seed).end_row();
  }
  for (const auto& point : report.snr_curve) {
    csv.cell("snr").cell(engine).cell(point.t).cell(point.empirical).cell(point.bound).cell(seed).end_row();
  }
  if (report.miss_at_T0 >= 0.0) {
    csv.cell("miss_at_T0").cell(engine).cell("").cell(report.miss_at_T0).cell(report.delta).cell(seed).end_row();
  }
  if (report.miss_after >= 0.0) {
    csv.cell("miss_after_T0").cell(engine).cell("").cell(report.miss_after).cell(report.delta_after).cell(seed).end_row();
  }
}

}  // namespace ascs
