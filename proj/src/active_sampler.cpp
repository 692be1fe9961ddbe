#include "ascs/active_sampler.hpp"

#include <string>

#include "ascs/error.hpp"

namespace ascs {

void ThresholdSchedule::validate() const {
  if (!(tau0 >= 0.0) || !std::isfinite(tau0)) throw ArgumentError("tau0 must be a finite value >= 0");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw ArgumentError("theta must be a finite value >= 0");
  if (total == 0) throw ArgumentError("schedule needs T > 0");
  if (explore == 0 || explore > total) {
    throw ArgumentError("exploration length T0 = " + std::to_string(explore) + " must lie in [1, T = " +
                        std::to_string(total) + "]");
  }
}

double tau_at(const ThresholdSchedule& schedule, uint64_t t) {
  if (t < schedule.explore) {
    throw ArgumentError("threshold requested at t = " + std::to_string(t) + " before T0 = " +
                        std::to_string(schedule.explore));
  }
  const double elapsed = static_cast<double>(t - schedule.explore);
  return schedule.tau0 + (schedule.theta / static_cast<double>(schedule.total)) * elapsed;
}

ActiveSampler::ActiveSampler(CountSketch sketch, ThresholdSchedule schedule, GateMode gate)
    : sketch_(std::move(sketch)), schedule_(schedule), gate_(gate) {
  schedule_.validate();
  if (schedule_.total != sketch_.total_samples()) {
    throw ArgumentError("schedule T = " + std::to_string(schedule_.total) +
                        " does not match sketch T = " + std::to_string(sketch_.total_samples()));
  }
}

}  // namespace ascs
