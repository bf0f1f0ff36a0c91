// baglogic command-line front end.
//
// Subcommands: gen, infer-tp, abduce, validate, eval, scene.
// JSON goes to stdout, diagnostics and the resolved config to stderr.
// Exit codes: 0 ok, 2 config error, 3 IO error, 4 ambiguous winner,
// 5 nothing meets the tolerance.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "baglogic/baglogic.hpp"

namespace {

using namespace baglogic;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitTie = 4;
constexpr int kExitNoWinner = 5;

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::io_error:
    case ErrorKind::parse_error:
      return kExitIo;
    default:
      return kExitConfig;
  }
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::io_error, "write failed for '" + path + "'");
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_argument, "bad number '" + tok + "'");
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) out.push_back(static_cast<int>(v));
  return out;
}

// "1,2,3" or "1..100" (inclusive range), combinable: "1..3,7".
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    auto parse_one = [](const std::string& t) -> std::uint64_t {
      try {
        std::size_t used = 0;
        std::uint64_t v = std::stoull(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
      } catch (const std::exception&) {
        throw Error(ErrorKind::invalid_argument, "bad seed '" + t + "'");
      }
    };
    auto dots = tok.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_one(tok));
      continue;
    }
    std::uint64_t lo = parse_one(tok.substr(0, dots));
    std::uint64_t hi = parse_one(tok.substr(dots + 2));
    if (hi < lo)
      throw Error(ErrorKind::invalid_argument, "bad seed range '" + tok + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

// Options shared by every subcommand; flag values beat config-file values.
struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  long long budget = kDefaultEnumerationBudget;
  int jobs = 1;
  double tolerance = 1.0;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* tolerance_opt = nullptr;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config_path, "JSON config file");
    seed_opt = cmd.add_option("--seed", seed, "random seed");
    budget_opt = cmd.add_option("--budget", budget, "enumeration budget");
    jobs_opt = cmd.add_option("--jobs", jobs, "worker threads");
    tolerance_opt =
        cmd.add_option("--tolerance", tolerance, "consistency threshold");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    if (seed_opt->count()) cfg.seed = seed;
    if (budget_opt->count()) cfg.budget = budget;
    if (jobs_opt->count()) cfg.jobs = jobs;
    if (tolerance_opt->count()) cfg.tolerance = tolerance;
    return cfg;
  }
};

void log_resolved_config(const RunConfig& cfg) {
  std::cerr << "resolved config: " << run_config_to_json(cfg).dump() << "\n";
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  Common common;
  std::string op;
  int bags = 50;
  int m = 2;
  int labels = 10;
  double reuse = 0.0;
  double noise = 0.0;
  bool no_preds = false;
  std::string scene;  // "table-demo" | "random"
  int fragments = 6;
  double visibility = 1.0;
  double distractors = 0.0;
  std::string out;
  std::string manifest;
  CLI::Option* m_opt = nullptr;
};

int run_gen(const GenArgs& a) {
  RunConfig cfg = a.common.resolve();
  log_resolved_config(cfg);
  OperatorRegistry registry = build_registry(cfg);

  nlohmann::json params{{"seed", cfg.seed}};
  std::string content;
  if (!a.scene.empty()) {
    SceneData scene;
    if (a.scene == "table-demo") {
      scene = table_demo_scene();
    } else if (a.scene == "random") {
      SceneData vocab = table_demo_scene();
      const std::vector<RelationAtom> graph = {{"onTop", "vase", "table"},
                                               {"onTop", "books", "table"},
                                               {"nextTo", "lamp", "books"}};
      scene = gen_scene_dataset(graph, vocab.objects, vocab.relations,
                                a.fragments, a.visibility, cfg.seed,
                                a.distractors);
      params["fragments"] = a.fragments;
      params["visibility"] = a.visibility;
      params["distractors"] = a.distractors;
    } else {
      throw Error(ErrorKind::invalid_argument,
                  "unknown scene '" + a.scene + "' (table-demo or random)");
    }
    params["scene"] = a.scene;
    content = write_scene_facts(scene);
  } else {
    if (a.op.empty())
      throw Error(ErrorKind::invalid_argument, "gen needs --op or --scene");
    const TransitionOp& op = registry.require(a.op);
    int m = a.m_opt->count() || op.arity().variadic ? a.m : op.arity().n;
    LabelAlphabet alphabet = LabelAlphabet::numeric_range(0, a.labels - 1);
    Dataset d =
        gen_digit_dataset(op, a.bags, m, alphabet, cfg.seed, a.reuse, cfg.budget);
    params["op"] = op.name();
    params["bags"] = a.bags;
    params["m"] = m;
    params["labels"] = a.labels;
    params["reuse"] = a.reuse;
    if (a.no_preds) {
      content = write_dataset_facts(d);
    } else {
      PredictionSet preds =
          gen_noisy_predictions(d, NoiseModel::uniform(a.noise, cfg.seed));
      params["noise"] = a.noise;
      content = write_dataset_facts(d, &preds);
    }
  }

  write_file(a.out, content);
  std::string manifest_path = a.manifest.empty() ? a.out + ".manifest.json"
                                                 : a.manifest;
  nlohmann::json manifest{
      {"command", "gen"},
      {"params", params},
      {"files",
       {{a.out,
         {{"bytes", content.size()}, {"fnv1a64", hex64(fnv1a64(content))}}}}}};
  std::string manifest_text = manifest.dump(2) + "\n";
  write_file(manifest_path, manifest_text);
  std::cout << manifest_text;
  return kExitOk;
}

// ---- infer-tp ---------------------------------------------------------------

struct InferArgs {
  Common common;
  std::string data;
  std::string policy = "corrupt-s";
  double ratio = 1.0;
  std::string vs_op;
};

int run_infer_tp(const InferArgs& a) {
  RunConfig cfg = a.common.resolve();
  log_resolved_config(cfg);
  OperatorRegistry registry = build_registry(cfg);

  FactFile f = load_fact_file(a.data);
  Dataset d = make_dataset(f);
  PredictionSet preds = make_predictions(f);
  NegativePolicy policy = parse_negative_policy(a.policy, a.ratio, a.vs_op);

  TpVerdict v = infer_tp(d, preds, registry, cfg.tolerance, policy, cfg.seed);
  print_json(tp_verdict_to_json(v));
  if (!v.diagnostic.empty()) std::cerr << v.diagnostic << "\n";
  if (v.winners.empty()) return kExitNoWinner;
  if (!v.unique) {
    std::cerr << "ambiguous: " << v.winners.size()
              << " operators share the best score\n";
    return kExitTie;
  }
  return kExitOk;
}

// ---- abduce -----------------------------------------------------------------

struct AbduceArgs {
  Common common;
  std::string data;
  std::string op;
  bool oracle = false;
  std::string csv;
};

int run_abduce(const AbduceArgs& a) {
  RunConfig cfg = a.common.resolve();
  log_resolved_config(cfg);
  OperatorRegistry registry = build_registry(cfg);

  FactFile f = load_fact_file(a.data);
  Dataset d = make_dataset(f);
  const TransitionOp& op = registry.require(a.op);

  CandidateMap cm = a.oracle
                        ? brute_force_abduction_oracle(d, op, cfg.budget)
                        : abduce_labels(d, op, cfg.budget);
  print_json(candidate_map_to_json(cm));
  if (!cm.contradictions.empty())
    std::cerr << cm.contradictions.size()
              << " instance(s) have no consistent label\n";
  if (!a.csv.empty()) write_file(a.csv, candidate_map_to_csv(cm, d));
  return kExitOk;
}

// ---- validate ---------------------------------------------------------------

struct ValidateArgs {
  Common common;
  std::string data;
  std::string op;
  bool scene = false;
  bool infer_accepted = false;
  std::vector<std::string> accept;
};

int run_validate(const ValidateArgs& a) {
  RunConfig cfg = a.common.resolve();
  log_resolved_config(cfg);

  FactFile f = load_fact_file(a.data);
  ValidationReport report;
  if (a.scene) {
    SceneData scene = make_scene(f);
    std::set<std::string> accepted;
    if (!a.accept.empty())
      accepted.insert(a.accept.begin(), a.accept.end());
    else if (a.infer_accepted)
      accepted = infer_scene_relations(scene, cfg.tolerance).accepted_atoms();
    else
      accepted = all_hinted_atoms(scene);
    report = validate_scene_detections(scene, accepted);
  } else {
    if (a.op.empty())
      throw Error(ErrorKind::invalid_argument, "validate needs --op or --scene");
    OperatorRegistry registry = build_registry(cfg);
    Dataset d = make_dataset(f);
    PredictionSet preds = make_predictions(f);
    report = validate_classifier(d, registry.require(a.op), preds, cfg.budget);
  }
  print_json(validation_report_to_json(report));
  if (!report.violating_bags.empty())
    std::cerr << report.violating_bags.size() << " violation(s) found\n";
  return kExitOk;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string scenario = "tp";
  std::string ops = "sum,product,xor,boolC";
  std::string bags = "50";
  int m = 2;
  int labels = 10;
  std::string noise = "0";
  std::string tolerances;
  std::string seeds = "1..20";
  std::string reuse = "0";
  std::string visibility = "1";
  std::string out;
};

int run_eval(const EvalArgs& a) {
  RunConfig cfg = a.common.resolve();
  log_resolved_config(cfg);
  OperatorRegistry registry = build_registry(cfg);

  ExperimentSpec spec;
  spec.scenario = parse_scenario(a.scenario);
  spec.ops = parse_name_list(a.ops);
  spec.n_bags = parse_int_list(a.bags);
  spec.m = a.m;
  spec.labels = a.labels;
  spec.noise = parse_double_list(a.noise);
  spec.tolerance = a.tolerances.empty() ? std::vector<double>{cfg.tolerance}
                                        : parse_double_list(a.tolerances);
  spec.seeds = parse_seed_list(a.seeds);
  spec.reuse = parse_double_list(a.reuse);
  spec.visibility = parse_double_list(a.visibility);
  spec.out = a.out;

  ExperimentResult result = run_experiment(spec, registry, cfg.jobs);
  if (!a.out.empty()) {
    write_file(a.out + ".csv", result.csv());
    write_file(a.out + ".summary.json", result.summary.dump(2) + "\n");
    std::cerr << "wrote " << a.out << ".csv and " << a.out
              << ".summary.json (" << result.rows.size() << " rows)\n";
  }
  print_json(result.summary);
  return kExitOk;
}

// ---- scene ------------------------------------------------------------------

struct SceneArgs {
  Common common;
  std::string data;
  bool demo = false;
};

int run_scene(const SceneArgs& a) {
  RunConfig cfg = a.common.resolve();
  log_resolved_config(cfg);

  SceneData scene;
  if (a.demo) {
    scene = table_demo_scene();
  } else {
    if (a.data.empty())
      throw Error(ErrorKind::invalid_argument, "scene needs --data or --demo");
    scene = make_scene(load_fact_file(a.data));
  }
  SceneInference inf = infer_scene_relations(scene, cfg.tolerance);
  nlohmann::json j = scene_inference_to_json(inf);
  j["ledger"] = ledger_to_json(build_scene_tp_examples(scene));
  print_json(j);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic inference over weakly labeled instance bags"};
  app.set_version_flag("--version", "baglogic 0.1.0");
  app.require_subcommand(1);

  GenArgs gen;
  auto* cmd_gen = app.add_subcommand("gen", "generate datasets and scenes");
  gen.common.attach(*cmd_gen);
  cmd_gen->add_option("--op", gen.op, "generating operator");
  cmd_gen->add_option("--bags", gen.bags, "number of bags");
  gen.m_opt = cmd_gen->add_option("--m", gen.m, "instances per bag");
  cmd_gen->add_option("--labels", gen.labels, "alphabet size (0..labels-1)");
  cmd_gen->add_option("--reuse", gen.reuse, "instance reuse probability");
  cmd_gen->add_option("--noise", gen.noise, "prediction noise rate");
  cmd_gen->add_flag("--no-preds", gen.no_preds, "omit cp facts");
  cmd_gen->add_option("--scene", gen.scene, "scene preset: table-demo|random");
  cmd_gen->add_option("--fragments", gen.fragments, "random-scene fragments");
  cmd_gen->add_option("--visibility", gen.visibility,
                      "random-scene object visibility");
  cmd_gen->add_option("--distractors", gen.distractors,
                      "random-scene distractor hint rate");
  cmd_gen->add_option("--out", gen.out, "output fact file")->required();
  cmd_gen->add_option("--manifest", gen.manifest,
                      "manifest path (default <out>.manifest.json)");

  InferArgs infer;
  auto* cmd_infer =
      app.add_subcommand("infer-tp", "rank transition-function candidates");
  infer.common.attach(*cmd_infer);
  cmd_infer->add_option("--data", infer.data, "fact file")->required();
  cmd_infer->add_option("--policy", infer.policy,
                        "negative policy: corrupt-s|corrupt-vs-op");
  cmd_infer->add_option("--ratio", infer.ratio, "negatives per positive");
  cmd_infer->add_option("--vs-op", infer.vs_op,
                        "reference operator for corrupt-vs-op");

  AbduceArgs abduce;
  auto* cmd_abduce =
      app.add_subcommand("abduce", "candidate labels from weak constraints");
  abduce.common.attach(*cmd_abduce);
  cmd_abduce->add_option("--data", abduce.data, "fact file")->required();
  cmd_abduce->add_option("--op", abduce.op, "known operator")->required();
  cmd_abduce->add_flag("--oracle", abduce.oracle,
                       "joint-assignment enumeration (exponential)");
  cmd_abduce->add_option("--csv", abduce.csv, "also write a CSV summary");

  ValidateArgs validate;
  auto* cmd_validate =
      app.add_subcommand("validate", "check predictions or detections");
  validate.common.attach(*cmd_validate);
  cmd_validate->add_option("--data", validate.data, "fact file")->required();
  cmd_validate->add_option("--op", validate.op, "known operator (digit mode)");
  cmd_validate->add_flag("--scene", validate.scene, "scene-detection mode");
  cmd_validate->add_flag("--infer", validate.infer_accepted,
                         "accept relations via inference first");
  cmd_validate->add_option("--accept", validate.accept,
                           "accepted relation atom, e.g. onTop(vase,table)");

  EvalArgs eval;
  auto* cmd_eval = app.add_subcommand("eval", "run experiment sweeps");
  eval.common.attach(*cmd_eval);
  cmd_eval->add_option("--scenario", eval.scenario, "tp|cp|scene");
  cmd_eval->add_option("--ops", eval.ops, "comma-separated operator list");
  cmd_eval->add_option("--bags", eval.bags, "bag-count grid, e.g. 10,50");
  cmd_eval->add_option("--m", eval.m, "bag size for variadic operators");
  cmd_eval->add_option("--labels", eval.labels, "alphabet size");
  cmd_eval->add_option("--noise", eval.noise, "noise-rate grid");
  cmd_eval->add_option("--tolerances", eval.tolerances, "tolerance grid");
  cmd_eval->add_option("--seeds", eval.seeds, "seed list, e.g. 1..100");
  cmd_eval->add_option("--reuse", eval.reuse, "reuse-probability grid");
  cmd_eval->add_option("--visibility", eval.visibility, "visibility grid");
  cmd_eval->add_option("--out", eval.out, "output base path");

  SceneArgs scene;
  auto* cmd_scene =
      app.add_subcommand("scene", "infer scene relations from fragments");
  scene.common.attach(*cmd_scene);
  cmd_scene->add_option("--data", scene.data, "scene fact file");
  cmd_scene->add_flag("--demo", scene.demo, "use the built-in tabletop scene");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_infer->parsed()) return run_infer_tp(infer);
    if (cmd_abduce->parsed()) return run_abduce(abduce);
    if (cmd_validate->parsed()) return run_validate(validate);
    if (cmd_eval->parsed()) return run_eval(eval);
    if (cmd_scene->parsed()) return run_scene(scene);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
