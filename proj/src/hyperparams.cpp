#include "ascs/hyperparams.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>

#include "ascs/error.hpp"

namespace ascs {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Collision term (p-1)(1-alpha)/(R-alpha), with the pi/(2K) median factor in
// the multi-table approximation.
double collision_ratio(const ProblemParams& params, TableModel model) {
  const double ratio = (static_cast<double>(params.p) - 1.0) * (1.0 - params.alpha) /
                       (static_cast<double>(params.R) - params.alpha);
  if (model == TableModel::single) return ratio;
  return std::numbers::pi * ratio / (2.0 * params.K);
}

double clean_probability(const ProblemParams& params, TableModel model) {
  const double base = p0(params);
  return model == TableModel::single ? base : std::pow(base, static_cast<double>(params.K));
}

double exploration_miss_value(const ProblemParams& params, double explore, double tau0, TableModel model) {
  const double root = std::sqrt(explore);
  const double T = static_cast<double>(params.T);
  const double arg = -(root * params.u - T * tau0 / root) / (kappa(params, model) * params.sigma);
  const double clean = clean_probability(params, model);
  return normal_cdf(arg) * clean + (1.0 - clean);
}

double sampling_miss_value(const ProblemParams& params, double tau0, double explore, double theta, double omega_value) {
  const double T = static_cast<double>(params.T);
  const double w2 = omega_value * omega_value;
  const double growth = std::exp((params.u - theta) * (tau0 - (explore / T) * theta) / w2);
  const double arg = (explore * (2.0 * theta - params.u) - tau0 * T) / (std::sqrt(explore) * omega_value);
  return growth * normal_cdf(arg);
}

}  // namespace

void ProblemParams::validate() const {
  if (p < 1) throw ArgumentError("p must be >= 1");
  if (T < 1) throw ArgumentError("T must be >= 1");
  if (K < 1) throw ArgumentError("K must be >= 1");
  if (R < 1) throw ArgumentError("R must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1), got " + fmt(alpha));
  if (!(u > 0.0) || !std::isfinite(u)) throw ArgumentError("u must be positive, got " + fmt(u));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ArgumentError("sigma must be positive, got " + fmt(sigma));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double p0(const ProblemParams& params) {
  params.validate();
  const double exponent = static_cast<double>(params.p - 1);
  return std::exp(exponent * std::log1p(-params.alpha / static_cast<double>(params.R)));
}

double kappa(const ProblemParams& params, TableModel model) {
  params.validate();
  return std::sqrt(1.0 + collision_ratio(params, model));
}

double saturation_probability(const ProblemParams& params, TableModel model) {
  return 1.0 - clean_probability(params, model);
}

double exploration_miss_bound(const ProblemParams& params, uint64_t explore, double tau0, TableModel model) {
  params.validate();
  if (!(tau0 >= 0.0 && tau0 < params.u)) {
    throw ArgumentError("exploration bound needs tau0 in [0, u); got tau0 = " + fmt(tau0) + ", u = " + fmt(params.u));
  }
  if (explore < 1 || explore > params.T) {
    throw ArgumentError("T0 = " + std::to_string(explore) + " outside [1, T]");
  }
  return exploration_miss_value(params, static_cast<double>(explore), tau0, model);
}

ExplorationSolution find_T0(const ProblemParams& params, double tau0, double delta, TableModel model,
                            uint64_t floor) {
  params.validate();
  if (!(tau0 >= 0.0 && tau0 < params.u)) {
    throw ArgumentError("tau0 must lie in [0, u); got tau0 = " + fmt(tau0) + ", u = " + fmt(params.u));
  }
  if (floor < 1) floor = 1;
  const double sp = saturation_probability(params, model);
  if (!(delta > sp)) {
    throw SolverError("infeasible: delta = " + fmt(delta) + " does not exceed the saturation probability SP = " +
                      fmt(sp));
  }
  if (floor > params.T) {
    throw SolverError("infeasible: exploration floor " + std::to_string(floor) + " exceeds T = " +
                      std::to_string(params.T));
  }
  auto bound = [&](uint64_t t0) { return exploration_miss_value(params, static_cast<double>(t0), tau0, model); };

  const double at_end = bound(params.T);
  if (at_end > delta) {
    throw SolverError("infeasible: exploration bound at T0 = T is " + fmt(at_end) + " > delta = " + fmt(delta));
  }

  // sqrt(T0) u - T tau0 / sqrt(T0) increases with T0, so the bound is
  // non-increasing and the smallest admissible T0 is found by bisection.
  uint64_t lo = floor;
  uint64_t hi = params.T;
  if (bound(lo) <= delta) {
    hi = lo;
  } else {
    while (hi - lo > 1) {
      const uint64_t mid = lo + (hi - lo) / 2;
      if (bound(mid) <= delta) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }

  ExplorationSolution out{hi, bound(hi), std::numeric_limits<double>::quiet_NaN()};
  if (hi > floor) out.bound_before = bound(hi - 1);
  if (out.bound > delta || (hi > floor && !(out.bound_before > delta))) {
    // Certificate failed: recover minimality with a linear scan.
    for (uint64_t t0 = floor; t0 <= params.T; ++t0) {
      if (bound(t0) <= delta) {
        out.explore = t0;
        out.bound = bound(t0);
        out.bound_before = t0 > floor ? bound(t0 - 1) : std::numeric_limits<double>::quiet_NaN();
        break;
      }
    }
  }
  return out;
}

double omega(const ProblemParams& params, TableModel model) {
  params.validate();
  const double T = static_cast<double>(params.T);
  return params.sigma * std::sqrt(1.0 + collision_ratio(params, model) / (T * T));
}

double sampling_miss_bound(const ProblemParams& params, double tau0, uint64_t explore, double theta, TableModel model) {
  params.validate();
  if (!(theta > 0.0 && theta < params.u)) {
    throw ArgumentError("sampling bound needs theta in (0, u); got theta = " + fmt(theta));
  }
  if (!(tau0 >= 0.0)) throw ArgumentError("tau0 must be >= 0");
  if (explore < 1) throw ArgumentError("T0 must be >= 1");
  return sampling_miss_value(params, tau0, static_cast<double>(explore), theta, omega(params, model));
}

ThetaSolution find_theta(const ProblemParams& params, double tau0, uint64_t explore, const MissBudget& budget,
                         TableModel model) {
  params.validate();
  if (explore < 1) throw ArgumentError("T0 must be >= 1");
  if (!(tau0 >= 0.0)) throw ArgumentError("tau0 must be >= 0");
  const double target = budget.delta_star - budget.delta;
  if (!(target > 0.0)) {
    throw SolverError("infeasible: delta_star - delta = " + fmt(target) + " leaves no budget for sampling");
  }
  const double w = omega(params, model);
  const double t0 = static_cast<double>(explore);
  auto bound = [&](double theta) { return sampling_miss_value(params, tau0, t0, theta, w); };

  const double at_zero = bound(0.0);
  if (at_zero > target) {
    throw SolverError("infeasible: sampling bound at theta -> 0 is " + fmt(at_zero) + " > delta_star - delta = " +
                      fmt(target));
  }
  const double top = params.u - kThetaTolerance;
  if (bound(top) <= target) return {top, bound(top), false};

  constexpr int kGrid = 1024;
  bool monotone = true;
  double previous = at_zero;
  for (int j = 1; j < kGrid; ++j) {
    const double value = bound(params.u * j / kGrid);
    if (value < previous * (1.0 - 1e-12) - 1e-300) {
      monotone = false;
      break;
    }
    previous = value;
  }

  double lo = 0.0;
  double hi = top;
  if (!monotone) {
    // Bracket the largest admissible grid point, then refine inside it.
    for (int j = kGrid - 1; j >= 0; --j) {
      const double theta = params.u * j / kGrid;
      if (bound(theta) <= target) {
        lo = theta;
        hi = std::min(top, params.u * (j + 1) / kGrid);
        break;
      }
    }
  }
  while (hi - lo > kThetaTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (bound(mid) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (lo <= 0.0) {
    throw SolverError("infeasible: no theta in (0, u) keeps the sampling bound below " + fmt(target));
  }
  return {lo, bound(lo), !monotone};
}

double snr_cs(const ProblemParams& params) {
  params.validate();
  const double s2 = params.sigma * params.sigma;
  return params.alpha * (params.u * params.u + s2) / ((1.0 - params.alpha) * s2);
}

double snr_ascs_lower_bound(const ProblemParams& params, const ThresholdSchedule& schedule, double delta_star,
                            double t, TableModel model) {
  params.validate();
  const double t0 = static_cast<double>(schedule.explore);
  if (!(t >= t0)) {
    throw ArgumentError("SNR bound requested at t = " + fmt(t) + " before T0 = " + std::to_string(schedule.explore));
  }
  const double clean = clean_probability(params, model);
  const double arg = -schedule.theta * (std::sqrt(t) - std::sqrt(t0)) / (kappa(params, model) * params.sigma);
  const double noise_fraction = normal_cdf(arg) * clean + (1.0 - clean);
  return (1.0 - delta_star) / noise_fraction * snr_cs(params);
}

MissBudget default_budget(const ProblemParams& params, TableModel model) {
  const double sp = saturation_probability(params, model);
  MissBudget budget;
  budget.delta = std::max(1.01 * sp, 0.05);
  budget.delta_star = budget.delta + 0.15;
  if (budget.delta_star >= 1.0) {
    throw SolverError("infeasible budget: saturation probability SP = " + fmt(sp) + " forces delta_star = " +
                      fmt(budget.delta_star) + " >= 1");
  }
  return budget;
}

double estimate_sigma(std::span<const std::vector<Increment>> prefix, std::span<const uint64_t> subset) {
  if (prefix.empty()) throw ArgumentError("sigma estimate needs at least one sample");
  if (subset.empty()) throw ArgumentError("sigma estimate needs a non-empty item subset");
  std::vector<uint64_t> members(subset.begin(), subset.end());
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  double sum_sq = 0.0;
  for (const auto& sample : prefix) {
    for (const Increment& inc : sample) {
      if (std::binary_search(members.begin(), members.end(), inc.item)) sum_sq += inc.value * inc.value;
    }
  }
  if (!(sum_sq > 0.0)) throw DataError("sigma estimate is zero: the prefix carries no signal on the subset");
  const double count = static_cast<double>(members.size()) * static_cast<double>(prefix.size());
  return std::sqrt(sum_sq / count);
}

double nearest_rank(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ArgumentError("quantile of an empty set");
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<size_t>(std::ceil(std::clamp(q, 0.0, 1.0) * n));
  rank = std::clamp<size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<double> pilot_percentiles(const CountSketch& pilot, std::span<const uint64_t> subset,
                                      std::span<const double> quantiles) {
  if (subset.empty()) throw ArgumentError("pilot percentiles need a non-empty item subset");
  std::vector<double> estimates;
  estimates.reserve(subset.size());
  for (uint64_t item : subset) estimates.push_back(pilot.estimate(item));
  std::sort(estimates.begin(), estimates.end());
  std::vector<double> out;
  out.reserve(quantiles.size());
  for (double q : quantiles) out.push_back(nearest_rank(estimates, q));
  return out;
}

std::vector<uint64_t> sample_item_subset(uint64_t p, uint64_t seed, uint64_t cap) {
  std::vector<uint64_t> out;
  if (p <= cap) {
    out.resize(p);
    for (uint64_t i = 0; i < p; ++i) out[i] = i;
    return out;
  }
  // Floyd's algorithm: cap distinct draws from [0, p).
  std::mt19937_64 rng(seed);
  std::unordered_set<uint64_t> chosen;
  chosen.reserve(cap * 2);
  for (uint64_t j = p - cap; j < p; ++j) {
    const uint64_t r = std::uniform_int_distribution<uint64_t>(0, j)(rng);
    if (!chosen.insert(r).second) chosen.insert(j);
  }
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ascs
