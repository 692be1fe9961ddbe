#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

#include "ascs/countsketch.hpp"

namespace ascs {

// Linear sampling threshold tau(t) = tau0 + (theta / T) * (t - T0) for
// T0 <= t <= T.
struct ThresholdSchedule {
  double tau0 = 0.0;
  double theta = 0.0;
  uint64_t explore = 1;  // T0
  uint64_t total = 1;    // T

  void validate() const;
};

// Throws ArgumentError for t < T0.
double tau_at(const ThresholdSchedule& schedule, uint64_t t);

enum class GateMode {
  absolute,  // insert iff |estimate| >= tau
  signed_value,  // insert iff estimate >= tau
};

inline bool gate_passes(GateMode gate, double estimate, double tau) noexcept {
  return gate == GateMode::absolute ? std::abs(estimate) >= tau : estimate >= tau;
}

struct Increment {
  uint64_t item;
  double value;

  friend bool operator==(const Increment&, const Increment&) = default;
};

// Per-increment callback signature used by ActiveSampler::process:
//   void(const Increment& inc, double estimate, bool inserted)
// `estimate` is NaN during exploration, where no query is made.
struct NoObserver {
  void operator()(const Increment&, double, bool) const noexcept {}
};

// Exploration then gated insertion on top of a CountSketch.
//
// Samples 1..T0 insert every presented increment. For a later sample t, an
// increment of item i is inserted only when the sketch's current estimate of
// i (which reflects samples up to t-1) clears tau(t-1). Items absent from a
// sample are neither queried nor inserted.
class ActiveSampler {
 public:
  ActiveSampler(CountSketch sketch, ThresholdSchedule schedule, GateMode gate = GateMode::absolute);

  // Feeds the increments of the next sample. Returns the number inserted.
  template <typename Observer>
  size_t process(std::span<const Increment> increments, Observer&& observe);

  size_t process(std::span<const Increment> increments) { return process(increments, NoObserver{}); }

  bool passes(double estimate, double tau) const noexcept { return gate_passes(gate_, estimate, tau); }

  uint64_t samples_seen() const noexcept { return sketch_.samples_seen(); }
  const CountSketch& sketch() const noexcept { return sketch_; }
  CountSketch& sketch() noexcept { return sketch_; }
  const ThresholdSchedule& schedule() const noexcept { return schedule_; }
  GateMode gate() const noexcept { return gate_; }

  CountSketch release() && { return std::move(sketch_); }

 private:
  CountSketch sketch_;
  ThresholdSchedule schedule_;
  GateMode gate_;
};

template <typename Observer>
size_t ActiveSampler::process(std::span<const Increment> increments, Observer&& observe) {
  // Validates the stream length before touching W.
  sketch_.end_sample();
  const uint64_t t = sketch_.samples_seen();

  if (t <= schedule_.explore) {
    constexpr double kNotQueried = std::numeric_limits<double>::quiet_NaN();
    for (const Increment& inc : increments) {
      sketch_.insert(inc.item, inc.value);
      observe(inc, kNotQueried, true);
    }
    return increments.size();
  }

  const double tau = tau_at(schedule_, t - 1);
  size_t inserted = 0;
  for (const Increment& inc : increments) {
    const double estimate = sketch_.estimate(inc.item);
    const bool pass = passes(estimate, tau);
    if (pass) {
      sketch_.insert(inc.item, inc.value);
      ++inserted;
    }
    observe(inc, estimate, pass);
  }
  return inserted;
}

// Vanilla count sketch ingestion of one sample, for pipelines that run either
// engine through the same code path.
inline void insert_all(CountSketch& sketch, std::span<const Increment> increments) {
  sketch.end_sample();
  for (const Increment& inc : increments) sketch.insert(inc.item, inc.value);
}

}  // namespace ascs
