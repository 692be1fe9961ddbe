#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ascs::cli {

struct RunConfig {
  std::string command;
  std::string data;
  std::optional<uint32_t> dim;
  std::optional<uint64_t> samples;
  bool strict = false;

  uint32_t tables = 5;
  std::optional<uint32_t> buckets;
  std::optional<uint64_t> budget;
  std::string engine = "ascs";

  std::optional<double> alpha;
  std::optional<double> u;
  std::optional<double> sigma;
  std::optional<double> tau0;
  std::optional<double> delta;
  std::optional<double> delta_star;
  std::optional<uint64_t> explore;
  std::optional<double> theta;

  std::string mode = "cov";
  double pilot_frac = 0.05;
  uint64_t seed = 1;
  std::string gate = "abs";
  std::string adjustment = "off";
  std::string fast_path = "off";
  double sparse_eps = 0.01;
  uint64_t shuffle_capacity = 0;

  std::string out;
  std::string manifest;
  std::string snapshot;
  std::string truth;
  bool csv = false;

  uint64_t top = 100;
  std::vector<uint64_t> top_n;
  std::optional<double> f1_threshold;

  double signal_low = 0.5;
  double signal_high = 1.0;
  uint64_t replicates = 300;
  uint64_t seeds = 1;
  uint64_t checkpoint_every = 200;
};

int run_sketch(const RunConfig& config);
int run_topk(const RunConfig& config);
int run_eval(const RunConfig& config);
int run_hyper(const RunConfig& config);
int run_simulate(const RunConfig& config);
int run_validate(const RunConfig& config);

}  // namespace ascs::cli
