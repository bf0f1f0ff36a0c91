#pragma once
// Experiment harness: cartesian sweeps over operators, sizes, noise rates,
// tolerances, and seeds. Rows are computed into pre-assigned slots so the
// output is identical no matter how many worker threads run them.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "baglogic/cp_abduce.hpp"
#include "baglogic/datagen.hpp"
#include "baglogic/scene.hpp"
#include "baglogic/tp_infer.hpp"

#include <json.hpp>

namespace baglogic {

struct ExperimentSpec {
  enum class Scenario { tp, cp, scene };

  Scenario scenario = Scenario::tp;
  std::vector<std::string> ops = {"sum", "product", "xor", "boolC"};
  std::vector<int> n_bags = {50};       // scene: fragments per dataset
  int m = 2;                            // bag size for variadic operators
  int labels = 10;                      // digit alphabet 0..labels-1
  std::vector<double> noise = {0.0};
  std::vector<double> tolerance = {1.0};
  std::vector<std::uint64_t> seeds = {1};
  std::vector<double> reuse = {0.0};
  std::vector<double> visibility = {1.0};
  std::string out;                      // output path base (CLI writes files)
};

inline ExperimentSpec::Scenario parse_scenario(const std::string& name) {
  if (name == "tp") return ExperimentSpec::Scenario::tp;
  if (name == "cp") return ExperimentSpec::Scenario::cp;
  if (name == "scene") return ExperimentSpec::Scenario::scene;
  throw Error(ErrorKind::invalid_argument, "unknown scenario '" + name + "'");
}

inline void validate_spec(const ExperimentSpec& spec,
                          const OperatorRegistry& registry) {
  auto require_nonempty = [](bool ok, const char* what) {
    if (!ok)
      throw Error(ErrorKind::invalid_argument,
                  std::string("experiment grid '") + what + "' is empty");
  };
  require_nonempty(!spec.n_bags.empty(), "n_bags");
  require_nonempty(!spec.noise.empty(), "noise");
  require_nonempty(!spec.tolerance.empty(), "tolerance");
  require_nonempty(!spec.seeds.empty(), "seeds");
  require_nonempty(!spec.reuse.empty(), "reuse");
  require_nonempty(!spec.visibility.empty(), "visibility");
  if (spec.scenario != ExperimentSpec::Scenario::scene) {
    require_nonempty(!spec.ops.empty(), "ops");
    for (const auto& name : spec.ops) registry.require(name);
  }
  std::set<std::uint64_t> distinct(spec.seeds.begin(), spec.seeds.end());
  if (distinct.size() != spec.seeds.size())
    throw Error(ErrorKind::invalid_argument, "seeds must be distinct");
  if (spec.m < 1 || spec.labels < 2)
    throw Error(ErrorKind::invalid_argument, "m must be >=1 and labels >=2");
  for (double v : spec.noise)
    if (v < 0.0 || v > 1.0)
      throw Error(ErrorKind::invalid_argument, "noise rate outside [0,1]");
  for (double v : spec.tolerance)
    if (v < 0.0 || v > 1.0)
      throw Error(ErrorKind::invalid_argument, "tolerance outside [0,1]");
  for (double v : spec.reuse)
    if (v < 0.0 || v > 1.0)
      throw Error(ErrorKind::invalid_argument, "reuse outside [0,1]");
  for (double v : spec.visibility)
    if (v <= 0.0 || v > 1.0)
      throw Error(ErrorKind::invalid_argument, "visibility outside (0,1]");
}

struct ExperimentResult {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // fixed sweep order
  nlohmann::json summary;

  std::string csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ',';
      out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += row[i];
      }
      out += '\n';
    }
    return out;
  }
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; each index owns its
// output slot, so scheduling cannot change the result.
template <typename Fn>
void run_indexed(std::size_t count, int jobs, Fn&& fn) {
  int workers = std::max(1, jobs);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
      fn(i);
  };
  std::size_t spawn = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  threads.reserve(spawn);
  for (std::size_t t = 0; t < spawn; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

inline int effective_bag_size(const TransitionOp& op, int m) {
  return op.arity().variadic ? m : op.arity().n;
}

}  // namespace detail

inline ExperimentResult run_tp_experiment(const ExperimentSpec& spec,
                                          const OperatorRegistry& registry,
                                          int jobs = 1) {
  validate_spec(spec, registry);

  struct Task {
    std::string op;
    int n;
    double rho, tau, reuse;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& op : spec.ops)
    for (int n : spec.n_bags)
      for (double rho : spec.noise)
        for (double tau : spec.tolerance)
          for (double reuse : spec.reuse)
            for (std::uint64_t seed : spec.seeds)
              tasks.push_back({op, n, rho, tau, reuse, seed});

  struct Row {
    std::vector<std::string> cells;
    bool identified = false, tie = false, no_winner = false;
    double consistency = 0.0;
  };
  std::vector<Row> rows(tasks.size());
  LabelAlphabet alphabet = LabelAlphabet::numeric_range(0, spec.labels - 1);

  detail::run_indexed(tasks.size(), jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    const TransitionOp& op = registry.require(t.op);
    int m = detail::effective_bag_size(op, spec.m);
    Dataset d = gen_digit_dataset(op, t.n, m, alphabet, t.seed, t.reuse);
    PredictionSet preds =
        gen_noisy_predictions(d, NoiseModel::uniform(t.rho, t.seed));
    TpVerdict v = infer_tp(d, preds, registry, t.tau,
                           NegativePolicy::corrupt_s(), t.seed);

    Row& row = rows[i];
    row.identified = v.unique && v.winners.front() == op.name();
    row.tie = v.winners.size() > 1;
    row.no_winner = v.winners.empty();
    if (const auto* h = v.score_for(op.name())) row.consistency = h->consistency;
    auto rank = v.rank_of(op.name());
    row.cells = {t.op,
                 std::to_string(t.n),
                 detail::fmt(t.rho),
                 detail::fmt(t.tau),
                 detail::fmt(t.reuse),
                 std::to_string(t.seed),
                 detail::join(v.winners, '|'),
                 v.unique ? "1" : "0",
                 rank ? std::to_string(*rank) : "",
                 detail::fmt(row.consistency),
                 row.identified ? "1" : "0"};
  });

  ExperimentResult result;
  result.columns = {"op",   "n",       "rho",         "tau",
                    "reuse", "seed",   "winners",     "unique",
                    "true_op_rank",    "consistency", "identified"};
  struct Agg {
    long long runs = 0, identified = 0, ties = 0, no_winner = 0;
    double consistency_sum = 0.0;
  };
  std::map<std::string, Agg> cells;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    result.rows.push_back(rows[i].cells);
    std::string key = "op=" + t.op + ";n=" + std::to_string(t.n) +
                      ";rho=" + detail::fmt(t.rho) + ";tau=" +
                      detail::fmt(t.tau) + ";reuse=" + detail::fmt(t.reuse);
    Agg& a = cells[key];
    ++a.runs;
    a.identified += rows[i].identified;
    a.ties += rows[i].tie;
    a.no_winner += rows[i].no_winner;
    a.consistency_sum += rows[i].consistency;
  }
  result.summary = nlohmann::json::object();
  for (const auto& [key, a] : cells) {
    double runs = static_cast<double>(a.runs);
    result.summary[key] = {
        {"runs", a.runs},
        {"identification_rate", static_cast<double>(a.identified) / runs},
        {"tie_rate", static_cast<double>(a.ties) / runs},
        {"no_winner_rate", static_cast<double>(a.no_winner) / runs},
        {"mean_consistency", a.consistency_sum / runs}};
  }
  return result;
}

inline ExperimentResult run_cp_experiment(const ExperimentSpec& spec,
                                          const OperatorRegistry& registry,
                                          int jobs = 1) {
  validate_spec(spec, registry);

  struct Task {
    std::string op;
    int n;
    double rho, reuse;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& op : spec.ops)
    for (int n : spec.n_bags)
      for (double rho : spec.noise)
        for (double reuse : spec.reuse)
          for (std::uint64_t seed : spec.seeds)
            tasks.push_back({op, n, rho, reuse, seed});

  struct Row {
    std::vector<std::string> cells;
    double mean_candidates = 0.0, truth_containment = 0.0;
    double precision = 1.0, recall = 1.0;
  };
  std::vector<Row> rows(tasks.size());
  LabelAlphabet alphabet = LabelAlphabet::numeric_range(0, spec.labels - 1);

  detail::run_indexed(tasks.size(), jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    const TransitionOp& op = registry.require(t.op);
    int m = detail::effective_bag_size(op, spec.m);
    Dataset d = gen_digit_dataset(op, t.n, m, alphabet, t.seed, t.reuse);
    CandidateMap cm = abduce_labels(d, op);

    double size_sum = 0.0;
    long long truth_in = 0, instances = 0;
    for (const auto& [inst, labels] : cm.per_instance) {
      ++instances;
      size_sum += static_cast<double>(labels.size());
      if (labels.count(d.ground_truth->at(inst))) ++truth_in;
    }

    PredictionSet preds =
        gen_noisy_predictions(d, NoiseModel::uniform(t.rho, t.seed));
    ValidationReport report = validate_classifier(d, op, preds);

    std::set<std::string> violating;
    for (const auto& v : report.violating_bags) violating.insert(v.bag_id);
    long long corrupted = 0, detected_corrupted = 0;
    for (const auto& bag : d.bags) {
      bool dirty = false;
      for (const auto& inst : bag.instances)
        if (!(*preds.find(inst) == d.ground_truth->at(inst))) dirty = true;
      if (!dirty) continue;
      ++corrupted;
      if (violating.count(bag.bag_id)) ++detected_corrupted;
    }

    Row& row = rows[i];
    row.mean_candidates = instances ? size_sum / static_cast<double>(instances) : 0.0;
    row.truth_containment =
        instances ? static_cast<double>(truth_in) / static_cast<double>(instances)
                  : 1.0;
    long long violations = static_cast<long long>(report.violating_bags.size());
    row.precision = violations
                        ? static_cast<double>(detected_corrupted) /
                              static_cast<double>(violations)
                        : 1.0;
    row.recall = corrupted ? static_cast<double>(detected_corrupted) /
                                 static_cast<double>(corrupted)
                           : 1.0;
    row.cells = {t.op,
                 std::to_string(t.n),
                 detail::fmt(t.rho),
                 detail::fmt(t.reuse),
                 std::to_string(t.seed),
                 std::to_string(instances),
                 detail::fmt(row.mean_candidates),
                 detail::fmt(row.truth_containment),
                 std::to_string(corrupted),
                 std::to_string(violations),
                 detail::fmt(row.precision),
                 detail::fmt(row.recall)};
  });

  ExperimentResult result;
  result.columns = {"op",        "n",    "rho",
                    "reuse",     "seed", "instances",
                    "mean_candidates",   "truth_containment",
                    "corrupted_bags",    "violating_bags",
                    "precision", "recall"};
  struct Agg {
    long long runs = 0;
    double candidates = 0.0, containment = 0.0, precision = 0.0, recall = 0.0;
  };
  std::map<std::string, Agg> cells;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    result.rows.push_back(rows[i].cells);
    std::string key = "op=" + t.op + ";n=" + std::to_string(t.n) + ";rho=" +
                      detail::fmt(t.rho) + ";reuse=" + detail::fmt(t.reuse);
    Agg& a = cells[key];
    ++a.runs;
    a.candidates += rows[i].mean_candidates;
    a.containment += rows[i].truth_containment;
    a.precision += rows[i].precision;
    a.recall += rows[i].recall;
  }
  result.summary = nlohmann::json::object();
  for (const auto& [key, a] : cells) {
    double runs = static_cast<double>(a.runs);
    result.summary[key] = {{"runs", a.runs},
                           {"mean_candidates", a.candidates / runs},
                           {"truth_containment", a.containment / runs},
                           {"violation_precision", a.precision / runs},
                           {"violation_recall", a.recall / runs}};
  }
  return result;
}

// Scene sweep over the tabletop vocabulary: fragments of a fixed relation
// graph at varying visibility; measures how often the true relations are
// recovered as accepted and how many spurious acceptances appear.
inline ExperimentResult run_scene_experiment(const ExperimentSpec& spec,
                                             int jobs = 1) {
  validate_spec(spec, OperatorRegistry::builtins());

  SceneData vocab = table_demo_scene();
  const std::vector<RelationAtom> graph = {{"onTop", "vase", "table"},
                                           {"onTop", "books", "table"},
                                           {"nextTo", "lamp", "books"}};

  struct Task {
    int n;
    double visibility;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (int n : spec.n_bags)
    for (double vis : spec.visibility)
      for (std::uint64_t seed : spec.seeds) tasks.push_back({n, vis, seed});

  struct Row {
    std::vector<std::string> cells;
    double recovery = 0.0;
    long long spurious = 0;
  };
  std::vector<Row> rows(tasks.size());

  detail::run_indexed(tasks.size(), jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    SceneData scene = gen_scene_dataset(graph, vocab.objects, vocab.relations,
                                        t.n, t.visibility, t.seed);
    SceneInference inf = infer_scene_relations(scene);
    std::set<std::string> accepted = inf.accepted_atoms();

    long long recovered = 0;
    for (const auto& atom : graph) recovered += accepted.count(atom.text());
    long long spurious = static_cast<long long>(accepted.size()) - recovered;

    Row& row = rows[i];
    row.recovery = static_cast<double>(recovered) /
                   static_cast<double>(graph.size());
    row.spurious = spurious;
    row.cells = {std::to_string(t.n),
                 detail::fmt(t.visibility),
                 std::to_string(t.seed),
                 std::to_string(graph.size()),
                 std::to_string(recovered),
                 std::to_string(spurious),
                 std::to_string(inf.pairs.size())};
  });

  ExperimentResult result;
  result.columns = {"n",         "visibility", "seed", "graph_size",
                    "recovered", "spurious",   "pairs"};
  struct Agg {
    long long runs = 0, spurious = 0;
    double recovery = 0.0;
  };
  std::map<std::string, Agg> cells;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    result.rows.push_back(rows[i].cells);
    std::string key = "n=" + std::to_string(t.n) +
                      ";visibility=" + detail::fmt(t.visibility);
    Agg& a = cells[key];
    ++a.runs;
    a.recovery += rows[i].recovery;
    a.spurious += rows[i].spurious;
  }
  result.summary = nlohmann::json::object();
  for (const auto& [key, a] : cells) {
    double runs = static_cast<double>(a.runs);
    result.summary[key] = {
        {"runs", a.runs},
        {"recovery_rate", a.recovery / runs},
        {"mean_spurious", static_cast<double>(a.spurious) / runs}};
  }
  return result;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       const OperatorRegistry& registry,
                                       int jobs = 1) {
  switch (spec.scenario) {
    case ExperimentSpec::Scenario::tp:
      return run_tp_experiment(spec, registry, jobs);
    case ExperimentSpec::Scenario::cp:
      return run_cp_experiment(spec, registry, jobs);
    case ExperimentSpec::Scenario::scene:
      return run_scene_experiment(spec, jobs);
  }
  throw Error(ErrorKind::invalid_argument, "unreachable scenario");
}

}  // namespace baglogic
