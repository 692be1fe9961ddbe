#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "ascs/countsketch.hpp"
#include "ascs/covstream.hpp"
#include "ascs/datagen.hpp"
#include "ascs/error.hpp"
#include "ascs/eval.hpp"
#include "ascs/hashing.hpp"
#include "ascs/hyperparams.hpp"
#include "ascs/io.hpp"
#include "ascs/pipeline.hpp"

namespace ascs::cli {

using nlohmann::ordered_json;

namespace {

constexpr double kCorrelationTau0 = 1e-4;
constexpr double kCovarianceTau0Quantile = 0.10;
constexpr double kNoiseBand = 3.0;
constexpr double kMadToSigma = 0.6744897501960817;

// Independent seed streams derived from --seed.
uint64_t derived_seed(uint64_t seed, uint64_t stream) { return mix64(seed + stream * kGoldenGamma); }
enum SeedStream : uint64_t { kShuffleSeed = 101, kSubsetSeed = 102 };

struct Shape {
  uint32_t dim = 0;
  uint64_t T = 0;
};

StatMode parse_mode(const std::string& mode) { return mode == "corr" ? StatMode::correlation : StatMode::covariance; }
GateMode parse_gate(const std::string& gate) { return gate == "signed" ? GateMode::signed_value : GateMode::absolute; }
bool on(const std::string& flag) { return flag == "on"; }

uint32_t resolve_buckets(const RunConfig& c) {
  if (c.buckets.has_value() == c.budget.has_value()) throw ArgumentError("give exactly one of --r and --budget");
  if (c.buckets) {
    if (*c.buckets == 0) throw ArgumentError("--r must be >= 1");
    return *c.buckets;
  }
  const uint64_t r = *c.budget / c.tables;
  if (r == 0) throw ArgumentError("--budget is smaller than --k");
  if (r > UINT32_MAX) throw ArgumentError("--budget / --k exceeds the bucket limit");
  return static_cast<uint32_t>(r);
}

void check_common(const RunConfig& c) {
  if (!(c.pilot_frac > 0.0 && c.pilot_frac < 1.0)) throw ArgumentError("--pilot-frac must lie in (0, 1)");
  if (c.samples && *c.samples == 0) throw ArgumentError("--samples must be > 0");
  if (c.tables == 0) throw ArgumentError("--k must be >= 1");
}

Shape resolve_shape(const RunConfig& c) {
  if (c.strict && !(c.dim && c.samples)) throw ArgumentError("--strict streaming needs --dim and --samples");
  Shape shape;
  if (c.dim && c.samples) {
    shape = {*c.dim, *c.samples};
  } else {
    std::ifstream in(c.data);
    if (!in) throw IoError("cannot open " + c.data);
    uint64_t rows = 0;
    uint32_t max_dim = 0;
    read_libsvm(in, c.dim, [&](SparseSample&& s) {
      ++rows;
      if (!s.index.empty()) max_dim = std::max(max_dim, s.index.back() + 1);
    });
    shape.dim = c.dim ? *c.dim : max_dim;
    shape.T = c.samples ? *c.samples : rows;
  }
  if (shape.dim < 2) throw DataError("need at least two features, got d = " + std::to_string(shape.dim));
  if (shape.T == 0) throw DataError("dataset has no samples");
  return shape;
}

// Routes samples through the optional shuffle buffer.
class Feeder {
 public:
  Feeder(const RunConfig& c, std::function<void(const SparseSample&)> sink) : sink_(std::move(sink)) {
    if (c.shuffle_capacity > 0) buffer_.emplace(c.shuffle_capacity, derived_seed(c.seed, kShuffleSeed));
  }

  void operator()(SparseSample&& s) {
    if (!buffer_) {
      sink_(s);
      return;
    }
    if (auto out = buffer_->push(std::move(s))) sink_(*out);
  }

  void finish() {
    if (!buffer_) return;
    for (const auto& s : buffer_->finish()) sink_(s);
  }

 private:
  std::function<void(const SparseSample&)> sink_;
  std::optional<ShuffleBuffer> buffer_;
};

struct Resolved {
  double value = 0.0;
  std::string source;
};

ordered_json to_json(const Resolved& r) { return {{"value", r.value}, {"source", r.source}}; }

// Everything the engine needs beyond the flags, settled on the pilot prefix.
struct Plan {
  std::optional<FeatureStats> stats;
  uint64_t pilot_samples = 0;
  std::optional<Resolved> alpha, u, sigma, tau0;
  std::optional<MissBudget> budget;
  std::optional<ThresholdSchedule> schedule;
  ordered_json hyper;
};

bool schedule_given(const RunConfig& c) { return c.explore && c.theta && c.tau0; }

bool needs_pilot(const RunConfig& c, Engine engine) {
  const bool stats = parse_mode(c.mode) == StatMode::correlation || on(c.fast_path);
  const bool hyper = engine == Engine::ascs && !schedule_given(c) && !(c.alpha && c.u && c.sigma && c.tau0);
  return stats || hyper;
}

StreamConfig stream_config(const RunConfig& c) {
  StreamConfig sc;
  sc.mode = parse_mode(c.mode);
  sc.adjustment = on(c.adjustment);
  sc.fast_path = on(c.fast_path);
  sc.sparse_eps = c.sparse_eps;
  sc.validate();
  return sc;
}

Plan make_plan(const RunConfig& c, const Shape& shape, Engine engine, uint32_t buckets,
               const std::vector<SparseSample>& pilot) {
  Plan plan;
  plan.pilot_samples = pilot.size();
  const StreamConfig sc = stream_config(c);
  const uint64_t p = PairIndex(shape.dim).size();

  if (!pilot.empty()) {
    StreamMoments moments(shape.dim);
    for (const auto& s : pilot) moments.update(s);
    plan.stats = FeatureStats::from(moments);
    if (sc.mode == StatMode::correlation) {
      size_t dropped = 0;
      for (double s : plan.stats->stddev) dropped += !(s > 0.0);
      if (dropped) std::cerr << "warning: dropping " << dropped << " zero-variance features\n";
    }
  }
  if (engine != Engine::ascs) return plan;

  const auto flag = [](std::optional<double> v) -> std::optional<Resolved> {
    if (!v) return std::nullopt;
    return Resolved{*v, "flag"};
  };
  plan.alpha = flag(c.alpha);
  plan.u = flag(c.u);
  plan.sigma = flag(c.sigma);
  plan.tau0 = flag(c.tau0);

  if (!(plan.alpha && plan.u && plan.sigma && plan.tau0) && !schedule_given(c)) {
    if (pilot.empty()) throw ArgumentError("no pilot samples to derive hyperparameters from");
    const auto subset = sample_item_subset(p, derived_seed(c.seed, kSubsetSeed));
    EngineConfig pe;
    pe.engine = Engine::cs;
    pe.tables = c.tables;
    pe.buckets = buckets;
    pe.seed = c.seed;
    pe.total = pilot.size();
    const bool needs_stats = sc.mode == StatMode::correlation || sc.fast_path;
    StreamSketcher sketcher(shape.dim, sc, needs_stats ? plan.stats : std::nullopt, pe);
    double sum_sq = 0.0;
    for (const auto& s : pilot) {
      sketcher.push(s, [&](const Increment& inc, double, bool) {
        if (std::binary_search(subset.begin(), subset.end(), inc.item)) sum_sq += inc.value * inc.value;
      });
    }
    const double n = static_cast<double>(pilot.size());
    std::vector<double> magnitude;
    magnitude.reserve(subset.size());
    for (uint64_t item : subset) magnitude.push_back(std::abs(sketcher.sketch().estimate(item)));
    std::sort(magnitude.begin(), magnitude.end());

    if (!plan.sigma) {
      const double s = std::sqrt(sum_sq / (n * static_cast<double>(subset.size())));
      if (!(s > 0.0)) throw DataError("pilot increments are all zero; cannot estimate sigma");
      plan.sigma = Resolved{s, "pilot: root mean square increment over " + std::to_string(subset.size()) + " pairs"};
    }
    if (!plan.alpha) {
      // Noise scale from the median |mu|, which signals barely move; it
      // includes bucket-collision noise that sigma / sqrt(n) would miss.
      const double scale = nearest_rank(magnitude, 0.5) / kMadToSigma;
      const double band = kNoiseBand * scale;
      const auto above = static_cast<double>(magnitude.end() -
                                             std::upper_bound(magnitude.begin(), magnitude.end(), band));
      const double excess = above / static_cast<double>(magnitude.size()) - 2.0 * normal_cdf(-kNoiseBand);
      const double a = std::clamp(excess, 1.0 / static_cast<double>(p), 0.5);
      std::ostringstream why;
      why << "pilot: share of |mu| above " << kNoiseBand << " x median(|mu|) / " << kMadToSigma
          << " minus the Gaussian tail share";
      plan.alpha = Resolved{a, why.str()};
    }
    if (!plan.u) {
      const double q = 1.0 - plan.alpha->value;
      std::ostringstream why;
      why << "pilot: |mu| quantile " << std::setprecision(6) << q;
      plan.u = Resolved{nearest_rank(magnitude, q), why.str()};
    }
    if (!plan.tau0) {
      if (sc.mode == StatMode::correlation) {
        plan.tau0 = Resolved{kCorrelationTau0, "default for correlation mode"};
      } else {
        std::ostringstream why;
        why << "pilot: |mu| quantile " << kCovarianceTau0Quantile;
        plan.tau0 = Resolved{nearest_rank(magnitude, kCovarianceTau0Quantile), why.str()};
      }
    }
  }

  ThresholdSchedule schedule;
  schedule.total = shape.T;
  if (schedule_given(c)) {
    schedule.tau0 = *c.tau0;
    schedule.explore = *c.explore;
    schedule.theta = *c.theta;
    plan.hyper["explore"] = {{"value", schedule.explore}, {"source", "flag"}};
    plan.hyper["theta"] = {{"value", schedule.theta}, {"source", "flag"}};
  } else {
    ProblemParams params;
    params.p = p;
    params.T = shape.T;
    params.alpha = plan.alpha->value;
    params.u = plan.u->value;
    params.sigma = plan.sigma->value;
    params.K = c.tables;
    params.R = buckets;
    params.validate();
    if (!(plan.tau0->value >= 0.0 && plan.tau0->value < params.u)) {
      std::ostringstream msg;
      msg << "tau0 = " << plan.tau0->value << " must lie in [0, u = " << params.u << "); pass --tau0";
      throw SolverError(msg.str());
    }
    MissBudget budget = default_budget(params, TableModel::multi);
    std::string budget_source = "default";
    if (c.delta) {
      budget.delta = *c.delta;
      budget.delta_star = c.delta_star ? *c.delta_star : *c.delta + 0.15;
      budget_source = "flag";
    } else if (c.delta_star) {
      budget.delta_star = *c.delta_star;
      budget_source = "flag";
    }
    plan.budget = budget;
    plan.hyper["budget"] = {{"delta", budget.delta}, {"delta_star", budget.delta_star}, {"source", budget_source}};
    plan.hyper["saturation_probability"] = saturation_probability(params, TableModel::multi);

    schedule.tau0 = plan.tau0->value;
    if (c.explore) {
      schedule.explore = *c.explore;
      plan.hyper["explore"] = {{"value", schedule.explore}, {"source", "flag"}};
    } else {
      const auto t0 = find_T0(params, schedule.tau0, budget.delta, TableModel::multi);
      schedule.explore = t0.explore;
      plan.hyper["explore"] = {{"value", t0.explore}, {"source", "solver"}, {"bound", t0.bound}};
    }
    if (c.theta) {
      schedule.theta = *c.theta;
      plan.hyper["theta"] = {{"value", schedule.theta}, {"source", "flag"}};
    } else {
      const auto th = find_theta(params, schedule.tau0, schedule.explore, budget, TableModel::multi);
      schedule.theta = th.theta;
      plan.hyper["theta"] = {{"value", th.theta}, {"source", "solver"}, {"bound", th.bound}};
    }
  }
  schedule.validate();
  plan.schedule = schedule;
  return plan;
}

struct EngineRun {
  CountSketch sketch;
  ordered_json manifest;
  std::optional<double> alpha;
};

// One pass over `each` (which must call its argument once per sample, in
// stream order): pilot prefix buffered, plan settled, prefix replayed.
EngineRun run_engine(const RunConfig& c, const Shape& shape, Engine engine,
                     const std::function<void(const std::function<void(SparseSample&&)>&)>& each) {
  const uint32_t buckets = resolve_buckets(c);
  const StreamConfig sc = stream_config(c);
  const bool pilot_on = needs_pilot(c, engine);
  const uint64_t pilot_target =
      pilot_on ? std::max<uint64_t>(1, static_cast<uint64_t>(std::ceil(c.pilot_frac * static_cast<double>(shape.T))))
               : 0;

  std::vector<SparseSample> prefix;
  std::optional<Plan> plan;
  std::optional<StreamSketcher> sketcher;

  const auto start = [&] {
    plan = make_plan(c, shape, engine, buckets, prefix);
    EngineConfig ec;
    ec.engine = engine;
    ec.tables = c.tables;
    ec.buckets = buckets;
    ec.seed = c.seed;
    ec.total = shape.T;
    if (plan->schedule) ec.schedule = *plan->schedule;
    ec.gate = parse_gate(c.gate);
    const bool needs_stats = sc.mode == StatMode::correlation || sc.fast_path;
    sketcher.emplace(shape.dim, sc, needs_stats ? plan->stats : std::nullopt, ec);
    for (const auto& s : prefix) sketcher->push(s);
    prefix.clear();
    prefix.shrink_to_fit();
  };

  Feeder feeder(c, [&](const SparseSample& s) {
    if (!sketcher && prefix.size() < pilot_target) {
      prefix.push_back(s);
      if (prefix.size() == pilot_target) start();
      return;
    }
    if (!sketcher) start();
    sketcher->push(s);
  });
  each([&](SparseSample&& s) { feeder(std::move(s)); });
  feeder.finish();
  if (!sketcher) start();

  ordered_json m;
  m["command"] = c.command;
  m["engine"] = engine == Engine::ascs ? "ascs" : "cs";
  m["data"] = c.data;
  m["dim"] = shape.dim;
  m["pairs"] = PairIndex(shape.dim).size();
  m["samples"] = shape.T;
  m["samples_seen"] = sketcher->samples_seen();
  m["strict"] = c.strict;
  m["tables"] = c.tables;
  m["buckets"] = buckets;
  m["seed"] = c.seed;
  m["mode"] = c.mode;
  m["gate"] = c.gate;
  m["adjustment"] = c.adjustment;
  m["fast_path"] = c.fast_path;
  m["sparse_eps"] = c.sparse_eps;
  m["shuffle"] = {{"capacity", c.shuffle_capacity}, {"seed", derived_seed(c.seed, kShuffleSeed)}};
  m["pilot"] = {{"fraction", c.pilot_frac}, {"samples", plan->pilot_samples}};
  if (plan->alpha) m["pilot"]["alpha"] = to_json(*plan->alpha);
  if (plan->u) m["pilot"]["u"] = to_json(*plan->u);
  if (plan->sigma) m["pilot"]["sigma"] = to_json(*plan->sigma);
  if (plan->tau0) m["pilot"]["tau0"] = to_json(*plan->tau0);
  if (plan->schedule) {
    m["schedule"] = {{"tau0", plan->schedule->tau0},
                     {"explore", plan->schedule->explore},
                     {"theta", plan->schedule->theta},
                     {"total", plan->schedule->total}};
  }
  if (!plan->hyper.empty()) m["hyperparameters"] = plan->hyper;
  if (sketcher->samples_seen() < shape.T) {
    std::cerr << "warning: stream ended after " << sketcher->samples_seen() << " of " << shape.T << " samples\n";
  }

  std::optional<double> alpha = plan->alpha ? std::optional<double>(plan->alpha->value) : c.alpha;
  return {std::move(*sketcher).release(), std::move(m), alpha};
}

Engine parse_engine(const std::string& name) { return name == "cs" ? Engine::cs : Engine::ascs; }

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out = open_output(path);
  out << std::setw(2) << j << '\n';
  if (!out) throw IoError("write failed: " + path);
}

ordered_json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

// Writes to --out, or stdout when it is empty.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out = open_output(path);
  fn(out);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

int run_sketch(const RunConfig& c) {
  check_common(c);
  if (c.data.empty()) throw ArgumentError("sketch needs --data");
  if (c.out.empty()) throw ArgumentError("sketch needs --out for the snapshot");
  if (c.engine == "both") throw ArgumentError("sketch runs one engine; use --engine cs or ascs");
  const Shape shape = resolve_shape(c);
  auto run = run_engine(c, shape, parse_engine(c.engine), [&](const auto& sink) {
    std::ifstream in(c.data);
    if (!in) throw IoError("cannot open " + c.data);
    read_libsvm(in, shape.dim, sink);
  });
  run.sketch.save_file(c.out);
  run.manifest["snapshot"] = c.out;
  write_json(c.manifest.empty() ? c.out + ".json" : c.manifest, run.manifest);
  return 0;
}

int run_topk(const RunConfig& c) {
  std::string snapshot = c.snapshot;
  std::optional<uint32_t> dim = c.dim;
  if (!c.manifest.empty()) {
    const auto m = read_json(c.manifest);
    if (snapshot.empty()) snapshot = m.at("snapshot").get<std::string>();
    if (!dim) dim = m.at("dim").get<uint32_t>();
  }
  if (snapshot.empty()) throw ArgumentError("topk needs --snapshot or --manifest");
  if (!dim) throw ArgumentError("topk needs --dim or --manifest");
  if (c.top == 0) throw ArgumentError("--top must be >= 1");

  const CountSketch sketch = CountSketch::load_file(snapshot);
  const PairIndex pairs(*dim);
  const uint64_t k = std::min<uint64_t>(c.top, pairs.size());

  // Min-heap on (estimate desc, item asc) order keeps the best k.
  const auto better = [](const ScoredItem& x, const ScoredItem& y) {
    return x.estimate > y.estimate || (x.estimate == y.estimate && x.item < y.item);
  };
  std::priority_queue<ScoredItem, std::vector<ScoredItem>, decltype(better)> heap(better);
  for (uint64_t i = 0; i < pairs.size(); ++i) {
    const ScoredItem s{i, sketch.estimate(i)};
    if (heap.size() < k) {
      heap.push(s);
    } else if (better(s, heap.top())) {
      heap.pop();
      heap.push(s);
    }
  }
  std::vector<ScoredItem> best;
  while (!heap.empty()) {
    best.push_back(heap.top());
    heap.pop();
  }
  std::reverse(best.begin(), best.end());

  with_output(c.out, [&](std::ostream& out) {
    CsvWriter csv(out, {"a", "b", "estimate"});
    for (const auto& s : best) {
      const auto [a, b] = pairs.pair(s.item);
      csv.cell(a).cell(b).cell(s.estimate).end_row();
    }
  });
  return 0;
}

int run_eval(const RunConfig& c) {
  check_common(c);
  if (c.data.empty()) throw ArgumentError("eval needs --data");
  const Dataset data = load_libsvm(c.data, c.dim);
  Shape shape{data.dim, c.samples ? *c.samples : data.rows.size()};
  if (shape.dim < 2 || shape.T == 0) throw DataError("eval needs d >= 2 and at least one sample");
  const ExactMatrix exact = exact_matrix(data, parse_mode(c.mode));

  std::vector<Engine> engines;
  if (c.engine == "both") {
    engines = {Engine::ascs, Engine::cs};
  } else {
    engines = {parse_engine(c.engine)};
  }

  std::optional<double> alpha = c.alpha;
  std::vector<std::pair<std::string, EvalReport>> reports;
  std::vector<std::pair<std::string, double>> threshold_f1;
  ordered_json manifests = ordered_json::array();
  for (Engine engine : engines) {
    auto run = run_engine(c, shape, engine, [&](const auto& sink) {
      for (const auto& row : data.rows) sink(SparseSample(row));
    });
    if (!alpha) alpha = run.alpha;
    if (!alpha) throw ArgumentError("eval needs --alpha for the cs engine");
    const auto estimates = all_estimates(run.sketch, exact.values.size());

    EvalReport report;
    const double p = static_cast<double>(exact.values.size());
    for (double f : kReportFractions) {
      const double n = std::round(f * *alpha * p);
      if (n >= 1.0 && n <= p) report.mean_top_corr[f] = mean_top_correlation(estimates, exact.values, f, *alpha);
    }
    std::vector<uint64_t> top_n = c.top_n;
    if (top_n.empty()) top_n.push_back(std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(*alpha * p))));
    for (uint64_t n : top_n) report.max_f1[n] = max_f1(estimates, exact.values, n);
    const std::string name = engine == Engine::ascs ? "ascs" : "cs";
    if (c.f1_threshold) threshold_f1.emplace_back(name, max_f1_threshold(estimates, exact.values, *c.f1_threshold));
    reports.emplace_back(name, std::move(report));
    manifests.push_back(std::move(run.manifest));
  }

  with_output(c.out, [&](std::ostream& out) {
    CsvWriter csv(out, report_csv_header());
    for (const auto& [name, report] : reports) write_report_rows(csv, name, report, c.seed);
    for (const auto& [name, f1] : threshold_f1) {
      csv.cell("max_f1_threshold").cell(name).cell(*c.f1_threshold).cell(f1).cell("").cell(c.seed).end_row();
    }
  });
  if (!c.manifest.empty()) write_json(c.manifest, manifests);
  return 0;
}

namespace {

ProblemParams hyper_params(const RunConfig& c, uint32_t buckets) {
  if (!c.dim || !c.samples) throw ArgumentError("needs --dim and --samples");
  if (!c.alpha || !c.u) throw ArgumentError("needs --alpha and --u");
  ProblemParams params;
  params.p = PairIndex(*c.dim).size();
  params.T = *c.samples;
  params.alpha = *c.alpha;
  params.u = *c.u;
  params.sigma = c.sigma.value_or(1.0);
  params.K = c.tables;
  params.R = buckets;
  params.validate();
  return params;
}

MissBudget budget_from(const RunConfig& c, const ProblemParams& params) {
  MissBudget budget;
  if (c.delta) {
    budget.delta = *c.delta;
    budget.delta_star = c.delta_star.value_or(*c.delta + 0.15);
  } else {
    budget = default_budget(params, TableModel::multi);
    if (c.delta_star) budget.delta_star = *c.delta_star;
  }
  return budget;
}

}  // namespace

int run_hyper(const RunConfig& c) {
  check_common(c);
  const uint32_t buckets = resolve_buckets(c);
  const ProblemParams params = hyper_params(c, buckets);
  const double tau0 = c.tau0.value_or(kCorrelationTau0);
  const MissBudget budget = budget_from(c, params);
  const TableModel model = TableModel::multi;

  std::vector<std::pair<std::string, double>> rows;
  rows.emplace_back("p", static_cast<double>(params.p));
  rows.emplace_back("T", static_cast<double>(params.T));
  rows.emplace_back("K", params.K);
  rows.emplace_back("R", static_cast<double>(params.R));
  rows.emplace_back("alpha", params.alpha);
  rows.emplace_back("u", params.u);
  rows.emplace_back("sigma", params.sigma);
  rows.emplace_back("tau0", tau0);
  rows.emplace_back("p0", p0(params));
  rows.emplace_back("kappa", kappa(params, model));
  rows.emplace_back("saturation_probability", saturation_probability(params, model));
  rows.emplace_back("delta", budget.delta);
  rows.emplace_back("delta_star", budget.delta_star);

  const auto t0 = c.explore ? ExplorationSolution{*c.explore, exploration_miss_bound(params, *c.explore, tau0, model), NAN}
                            : find_T0(params, tau0, budget.delta, model);
  rows.emplace_back("T0", static_cast<double>(t0.explore));
  rows.emplace_back("exploration_bound", t0.bound);
  double theta = 0.0;
  if (c.theta) {
    theta = *c.theta;
    rows.emplace_back("theta", theta);
  } else {
    const auto th = find_theta(params, tau0, t0.explore, budget, model);
    theta = th.theta;
    rows.emplace_back("theta", theta);
    rows.emplace_back("sampling_bound", th.bound);
  }
  rows.emplace_back("snr_cs", snr_cs(params));
  ThresholdSchedule schedule{tau0, theta, t0.explore, params.T};
  rows.emplace_back("snr_plateau", snr_ascs_lower_bound(params, schedule, budget.delta_star, 1e300, model));
  for (uint64_t t = t0.explore; t <= params.T; t += c.checkpoint_every) {
    rows.emplace_back("snr_lower_bound@" + std::to_string(t),
                      snr_ascs_lower_bound(params, schedule, budget.delta_star, static_cast<double>(t), model));
  }

  with_output(c.out, [&](std::ostream& out) {
    if (c.csv) {
      CsvWriter csv(out, {"quantity", "value"});
      for (const auto& [name, value] : rows) csv.cell(name).cell(value).end_row();
      return;
    }
    size_t width = 0;
    for (const auto& row : rows) width = std::max(width, row.first.size());
    for (const auto& [name, value] : rows) {
      out << std::left << std::setw(static_cast<int>(width) + 2) << name << format_double(value) << '\n';
    }
  });
  return 0;
}

int run_simulate(const RunConfig& c) {
  if (c.out.empty()) throw ArgumentError("simulate needs --out for the stream");
  if (!c.dim || !c.samples || !c.alpha) throw ArgumentError("simulate needs --dim, --samples and --alpha");
  SyntheticSpec spec;
  spec.d = *c.dim;
  spec.T = *c.samples;
  spec.alpha = *c.alpha;
  spec.signal_low = c.signal_low;
  spec.signal_high = c.signal_high;
  spec.seed = c.seed;
  const SyntheticData sim = generate(spec);
  write_libsvm(c.out, sim.data);

  const std::string truth = c.truth.empty() ? c.out + ".truth.csv" : c.truth;
  {
    std::ofstream out = open_output(truth);
    CsvWriter csv(out, {"a", "b", "value"});
    for (uint32_t a = 0; a < spec.d; ++a) {
      for (uint32_t b = a + 1; b < spec.d; ++b) {
        const double v = sim.model.matrix(a, b);
        if (v != 0.0) csv.cell(a).cell(b).cell(v).end_row();
      }
    }
    if (!out) throw IoError("write failed: " + truth);
  }

  ordered_json m;
  m["command"] = "simulate";
  m["dim"] = spec.d;
  m["samples"] = spec.T;
  m["alpha"] = spec.alpha;
  m["signal_pairs"] = sim.model.signal_pairs.size();
  m["signal_low"] = spec.signal_low;
  m["signal_high"] = spec.signal_high;
  m["seed"] = spec.seed;
  m["repair"] = {{"iterations", sim.model.repair.iterations},
                 {"min_eigenvalue_before", sim.model.repair.min_eigenvalue_before},
                 {"min_eigenvalue_after", sim.model.repair.min_eigenvalue_after},
                 {"shrink", sim.model.repair.shrink}};
  m["stream"] = c.out;
  m["truth"] = truth;
  write_json(c.manifest.empty() ? c.out + ".json" : c.manifest, m);
  return 0;
}

int run_validate(const RunConfig& c) {
  check_common(c);
  if (!c.dim || !c.samples || !c.alpha) throw ArgumentError("validate needs --dim, --samples and --alpha");
  if (c.replicates < 1) throw ArgumentError("--replicates must be >= 1");
  const uint32_t buckets = resolve_buckets(c);

  SyntheticSpec spec;
  spec.d = *c.dim;
  spec.T = *c.samples;
  spec.alpha = *c.alpha;
  spec.signal_low = c.signal_low;
  spec.signal_high = c.signal_high;
  spec.seed = c.seed;
  const CovarianceModel model = make_covariance(spec);

  RunConfig with_u = c;
  if (!with_u.u) with_u.u = c.signal_low;
  const ProblemParams params = hyper_params(with_u, buckets);
  const double tau0 = c.tau0.value_or(kCorrelationTau0);
  const MissBudget budget = budget_from(c, params);
  const uint64_t explore = c.explore ? *c.explore : find_T0(params, tau0, budget.delta, TableModel::multi).explore;
  const double theta =
      c.theta ? *c.theta : find_theta(params, tau0, explore, budget, TableModel::multi).theta;
  const ThresholdSchedule schedule{tau0, theta, explore, spec.T};

  const std::string snr_path = c.out.empty() ? std::string() : c.out + ".snr.csv";
  std::ostringstream miss_text;
  std::ostringstream snr_text;
  CsvWriter miss_csv(miss_text, {"seed", "replicates", "T0", "theta", "tau0", "delta", "miss_at_T0", "delta_after",
                                 "miss_after_T0"});
  CsvWriter snr_csv(snr_text, {"seed", "t", "empirical", "bound"});
  for (uint64_t s = 0; s < c.seeds; ++s) {
    ValidationSetup setup;
    setup.tables = c.tables;
    setup.buckets = buckets;
    setup.schedule = schedule;
    setup.gate = parse_gate(c.gate);
    setup.replicates = c.replicates;
    setup.seed = c.seed + s;
    const ValidationResult r = validate_miss_probability(model, setup);
    miss_csv.cell(setup.seed).cell(r.replicates).cell(explore).cell(theta).cell(tau0).cell(budget.delta);
    miss_csv.cell(r.miss_at_T0()).cell(budget.delta_star - budget.delta).cell(r.miss_after()).end_row();
    for (uint64_t t = explore + c.checkpoint_every; t <= spec.T; t += c.checkpoint_every) {
      const double bound =
          snr_ascs_lower_bound(params, schedule, budget.delta_star, static_cast<double>(t), TableModel::multi);
      snr_csv.cell(setup.seed).cell(t).cell(measure_snr(r.snr, t)).cell(bound).end_row();
    }
  }
  with_output(c.out, [&](std::ostream& out) { out << miss_text.str(); });
  if (snr_path.empty()) {
    std::cout << snr_text.str();
  } else {
    with_output(snr_path, [&](std::ostream& out) { out << snr_text.str(); });
  }
  return 0;
}

}  // namespace ascs::cli
