#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ascs/active_sampler.hpp"
#include "ascs/countsketch.hpp"

namespace ascs {

// Constants of the sparse mean-estimation model that drive the exploration
// and threshold bounds.
struct ProblemParams {
  uint64_t p = 1;      // number of sketched variables, d(d-1)/2 for covariances
  uint64_t T = 1;      // total samples
  double alpha = 0.01; // proportion of signal variables, in (0, 1)
  double u = 1.0;      // lower bound of the signal means
  double sigma = 1.0;  // standard deviation of each X_i
  uint32_t K = 1;      // hash tables
  uint64_t R = 1;      // buckets per table

  void validate() const;
};

// Single-table forms are the proven bounds; multi-table forms substitute
// kappa, p0^K and omega_1, which are closed-form approximations.
enum class TableModel {
  single,
  multi,
};

struct MissBudget {
  double delta = 0.05;       // miss probability at T0
  double delta_star = 0.20;  // total miss probability over the run
};

inline constexpr uint64_t kDefaultExplorationFloor = 30;

// Standard normal CDF, 0.5 * erfc(-x / sqrt 2).
double normal_cdf(double x);

// Probability that a signal shares no bucket with another signal in one table.
double p0(const ProblemParams& params);

double kappa(const ProblemParams& params, TableModel model);

// 1 - p0 (single) or 1 - p0^K (multi). Floors the exploration bound.
double saturation_probability(const ProblemParams& params, TableModel model);

// Upper bound on P(|mu_hat^(T0)| < tau0 | signal). Requires 0 <= tau0 < u and
// 1 <= T0 <= T.
double exploration_miss_bound(const ProblemParams& params, uint64_t explore, double tau0, TableModel model);

struct ExplorationSolution {
  uint64_t explore;      // minimal T0
  double bound;          // bound at T0, <= delta
  double bound_before;   // bound at T0 - 1 (> delta), NaN when T0 is the floor
};

// Minimal T0 in [floor, T] whose exploration bound is <= delta. Throws
// SolverError when delta does not exceed the saturation probability or when
// even T0 = T is not enough.
ExplorationSolution find_T0(const ProblemParams& params, double tau0, double delta, TableModel model,
                            uint64_t floor = kDefaultExplorationFloor);

double omega(const ProblemParams& params, TableModel model);

// Upper bound on the probability that a signal, kept at T0, is dropped later
// under the linear schedule with slope theta. Requires 0 < theta < u.
double sampling_miss_bound(const ProblemParams& params, double tau0, uint64_t explore, double theta,
                      TableModel model);

struct ThetaSolution {
  double theta;
  double bound;          // bound at theta, <= delta_star - delta
  bool grid_fallback;    // bound was not monotone on the check grid
};

inline constexpr double kThetaTolerance = 1e-9;

// Largest theta in (0, u) with sampling_miss_bound <= delta_star - delta, to
// kThetaTolerance. Throws SolverError when even theta -> 0 violates it.
ThetaSolution find_theta(const ProblemParams& params, double tau0, uint64_t explore, const MissBudget& budget,
                         TableModel model);

// Signal-to-noise ratio of the data a vanilla count sketch ingests.
double snr_cs(const ProblemParams& params);

// Lower bound on the ASCS signal-to-noise ratio at sample t >= T0 (t may
// exceed T to read off the plateau).
double snr_ascs_lower_bound(const ProblemParams& params, const ThresholdSchedule& schedule,
                            double delta_star, double t, TableModel model);

// delta = max(1.01 SP, 0.05), delta_star = delta + 0.15.
MissBudget default_budget(const ProblemParams& params, TableModel model);

// sqrt of the mean of X_i^2 over the prefix samples and the subset items.
// Items absent from a sample's increment list count as zero.
double estimate_sigma(std::span<const std::vector<Increment>> prefix, std::span<const uint64_t> subset);

// Nearest-rank quantiles of the sketch estimates over `subset`.
std::vector<double> pilot_percentiles(const CountSketch& pilot, std::span<const uint64_t> subset,
                                      std::span<const double> quantiles);

// Nearest-rank quantile of already sorted values.
double nearest_rank(std::span<const double> sorted, double q);

inline constexpr uint64_t kMaxPairSubset = 1'000'000;

// All of [0, p) when p <= cap, otherwise `cap` items drawn uniformly without
// replacement. Sorted ascending.
std::vector<uint64_t> sample_item_subset(uint64_t p, uint64_t seed, uint64_t cap = kMaxPairSubset);

}  // namespace ascs
