#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ascs/active_sampler.hpp"
#include "ascs/countsketch.hpp"
#include "ascs/covstream.hpp"

namespace ascs {

enum class Engine {
  cs,
  ascs,
};

struct EngineConfig {
  Engine engine = Engine::ascs;
  uint32_t tables = 5;
  uint32_t buckets = 1;
  uint64_t seed = 0;
  uint64_t total = 1;            // T
  ThresholdSchedule schedule;    // ignored by the cs engine
  GateMode gate = GateMode::absolute;
};

// Placement caches above this many item-table entries are not built.
inline constexpr uint64_t kMaxCachedPlacements = 50'000'000;

// Samples in, sketch out: running moments, pair increments, then either a
// plain count sketch or the active sampler. Both engines share hashing and
// increment construction, so for the same seeds they differ only in gating.
class StreamSketcher {
 public:
  StreamSketcher(uint32_t dim, StreamConfig stream, std::optional<FeatureStats> pilot, const EngineConfig& engine);

  // Observer as in ActiveSampler::process; the cs engine reports every
  // increment as inserted with a NaN estimate.
  template <typename Observer>
  void push(const SparseSample& y, Observer&& observe);

  void push(const SparseSample& y) { push(y, NoObserver{}); }

  const CountSketch& sketch() const noexcept { return sampler_ ? sampler_->sketch() : *vanilla_; }
  CountSketch release() && { return sampler_ ? std::move(*sampler_).release() : std::move(*vanilla_); }

  const IncrementBuilder& builder() const noexcept { return builder_; }
  const StreamMoments& moments() const noexcept { return moments_; }
  uint64_t samples_seen() const noexcept { return sketch().samples_seen(); }

 private:
  StreamMoments moments_;
  IncrementBuilder builder_;
  bool track_moments_;
  std::optional<ActiveSampler> sampler_;
  std::optional<CountSketch> vanilla_;
  std::vector<Increment> buffer_;
};

template <typename Observer>
void StreamSketcher::push(const SparseSample& y, Observer&& observe) {
  if (track_moments_) moments_.update(y);
  builder_.build(moments_, y, buffer_);
  if (sampler_) {
    sampler_->process(buffer_, observe);
    return;
  }
  insert_all(*vanilla_, buffer_);
  constexpr double kNotQueried = std::numeric_limits<double>::quiet_NaN();
  for (const Increment& inc : buffer_) observe(inc, kNotQueried, true);
}

}  // namespace ascs
