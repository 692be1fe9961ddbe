#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "ascs/error.hpp"
#include "commands.hpp"

namespace {

using ascs::cli::RunConfig;

void add_shape(CLI::App* sub, RunConfig& c) {
  sub->add_option("--dim", c.dim, "Feature dimension d (inferred by a pre-scan when omitted)");
  sub->add_option("--samples", c.samples, "Stream length T (row count when omitted)");
}

void add_sketch(CLI::App* sub, RunConfig& c) {
  sub->add_option("--k", c.tables, "Hash tables K")->capture_default_str();
  sub->add_option("--r", c.buckets, "Buckets per table R");
  sub->add_option("--budget", c.budget, "Total buckets M; R = M / K");
}

void add_hyper(CLI::App* sub, RunConfig& c) {
  sub->add_option("--alpha", c.alpha, "Signal proportion");
  sub->add_option("--u", c.u, "Signal mean lower bound");
  sub->add_option("--sigma", c.sigma, "Increment standard deviation");
  sub->add_option("--tau0", c.tau0, "Threshold at the end of exploration");
  sub->add_option("--delta", c.delta, "Miss probability budget at T0");
  sub->add_option("--delta-star", c.delta_star, "Total miss probability budget");
  sub->add_option("--t0", c.explore, "Exploration length, skipping its solver");
  sub->add_option("--theta", c.theta, "Threshold slope, skipping its solver");
  sub->add_option("--gate", c.gate, "Gate test")->check(CLI::IsMember({"abs", "signed"}))->capture_default_str();
}

void add_stream(CLI::App* sub, RunConfig& c) {
  sub->add_option("--data", c.data, "LIBSVM dataset");
  sub->add_flag("--strict", c.strict, "Strict streaming: no pre-scan, --dim and --samples required");
  sub->add_option("--engine", c.engine, "Sketching engine")
      ->check(CLI::IsMember({"cs", "ascs", "both"}))
      ->capture_default_str();
  sub->add_option("--mode", c.mode, "Statistic")->check(CLI::IsMember({"cov", "corr"}))->capture_default_str();
  sub->add_option("--pilot-frac", c.pilot_frac, "Pilot prefix fraction")->capture_default_str();
  sub->add_option("--adjustment", c.adjustment, "Mean-drift adjustment (covariance mode)")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  sub->add_option("--fast-path", c.fast_path, "Sparse fast path")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  sub->add_option("--sparse-eps", c.sparse_eps, "|mean/std| below which a feature counts as zero-mean")
      ->capture_default_str();
  sub->add_option("--shuffle-capacity", c.shuffle_capacity, "Shuffle buffer size, 0 = off")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming sparse covariance and correlation estimation with active sampling count sketches"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig c;
  app.add_option("--seed", c.seed, "Master seed")->capture_default_str();

  auto* sketch = app.add_subcommand("sketch", "Sketch a dataset into a snapshot and run manifest");
  add_shape(sketch, c);
  add_sketch(sketch, c);
  add_hyper(sketch, c);
  add_stream(sketch, c);
  sketch->add_option("--out", c.out, "Snapshot path")->required();
  sketch->add_option("--manifest", c.manifest, "Manifest path (default <out>.json)");

  auto* topk = app.add_subcommand("topk", "Largest estimates of a snapshot as CSV (a, b, estimate)");
  topk->add_option("--snapshot", c.snapshot, "Snapshot path");
  topk->add_option("--manifest", c.manifest, "Manifest giving snapshot and dim");
  topk->add_option("--dim", c.dim, "Feature dimension d");
  topk->add_option("--top", c.top, "Number of pairs")->capture_default_str();
  topk->add_option("--out", c.out, "CSV path (stdout when omitted)");

  auto* eval = app.add_subcommand("eval", "Sketch a dataset and score it against the exact matrix");
  add_shape(eval, c);
  add_sketch(eval, c);
  add_hyper(eval, c);
  add_stream(eval, c);
  eval->add_option("--top-n", c.top_n, "Ground-truth sizes for max F1 (default round(alpha p))");
  eval->add_option("--f1-threshold", c.f1_threshold, "Also report max F1 against {|corr| >= threshold}");
  eval->add_option("--out", c.out, "CSV path (stdout when omitted)");
  eval->add_option("--manifest", c.manifest, "Write the run manifests here");

  auto* hyper = app.add_subcommand("hyper", "Solve T0 and theta and tabulate the bounds");
  add_shape(hyper, c);
  add_sketch(hyper, c);
  add_hyper(hyper, c);
  hyper->add_option("--checkpoint-every", c.checkpoint_every, "SNR bound spacing")->capture_default_str();
  hyper->add_flag("--csv", c.csv, "CSV instead of a table");
  hyper->add_option("--out", c.out, "Output path (stdout when omitted)");

  auto* simulate = app.add_subcommand("simulate", "Synthetic Gaussian stream with a sparse covariance");
  add_shape(simulate, c);
  simulate->add_option("--alpha", c.alpha, "Signal proportion");
  simulate->add_option("--signal-low", c.signal_low, "Smallest signal")->capture_default_str();
  simulate->add_option("--signal-high", c.signal_high, "Largest signal")->capture_default_str();
  simulate->add_option("--out", c.out, "LIBSVM stream path")->required();
  simulate->add_option("--truth", c.truth, "Truth CSV (default <out>.truth.csv)");
  simulate->add_option("--manifest", c.manifest, "Generator metadata (default <out>.json)");

  auto* validate = app.add_subcommand("validate", "Monte-Carlo miss probabilities and SNR on synthetic data");
  add_shape(validate, c);
  add_sketch(validate, c);
  add_hyper(validate, c);
  validate->add_option("--signal-low", c.signal_low, "Smallest signal")->capture_default_str();
  validate->add_option("--signal-high", c.signal_high, "Largest signal")->capture_default_str();
  validate->add_option("--replicates", c.replicates, "Replicates per seed")->capture_default_str();
  validate->add_option("--seeds", c.seeds, "Independent master seeds (seed, seed+1, ...)")->capture_default_str();
  validate->add_option("--checkpoint-every", c.checkpoint_every, "SNR checkpoint spacing after T0")
      ->capture_default_str();
  validate->add_option("--out", c.out, "Miss CSV path; SNR goes to <out>.snr.csv (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ascs::ErrorCategory::config);
  }

  try {
    c.command = app.get_subcommands().front()->get_name();
    if (c.command == "sketch") return ascs::cli::run_sketch(c);
    if (c.command == "topk") return ascs::cli::run_topk(c);
    if (c.command == "eval") return ascs::cli::run_eval(c);
    if (c.command == "hyper") return ascs::cli::run_hyper(c);
    if (c.command == "simulate") return ascs::cli::run_simulate(c);
    if (c.command == "validate") return ascs::cli::run_validate(c);
  } catch (const ascs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
