#include "ascs/pipeline.hpp"

namespace ascs {

StreamSketcher::StreamSketcher(uint32_t dim, StreamConfig stream, std::optional<FeatureStats> pilot,
                               const EngineConfig& engine)
    : moments_(dim),
      builder_(dim, stream, std::move(pilot)),
      track_moments_(stream.mode == StatMode::covariance) {
  CountSketch sketch(engine.tables, engine.buckets, engine.seed, engine.total, stream.mode);
  const uint64_t items = builder_.pairs().size();
  if (items * engine.tables <= kMaxCachedPlacements) sketch.cache_placements(items);
  if (engine.engine == Engine::ascs) {
    sampler_.emplace(std::move(sketch), engine.schedule, engine.gate);
  } else {
    vanilla_.emplace(std::move(sketch));
  }
}

}  // namespace ascs
