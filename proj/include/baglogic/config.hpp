#pragma once
// Structured run configuration (JSON file). Unknown keys are rejected at
// every level so typos fail loudly; CLI flags override file values. A run's
// fully-resolved config is what gets logged to stderr.
//
// {
//   "seed": 7, "budget": 10000000, "jobs": 1, "tolerance": 1.0,
//   "negatives": {"policy": "corrupt-s", "ratio": 1.0},
//   "operators": [
//     {"name": "max", "kind": "builtin"},
//     {"name": "parity2", "kind": "table", "arity": 2,
//      "table": [{"in": ["0", "1"], "out": "1"}]}
//   ]
// }

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "baglogic/core.hpp"
#include "baglogic/examples.hpp"
#include "baglogic/operators.hpp"

#include <json.hpp>

namespace baglogic {

struct OperatorSpec {
  std::string name;
  std::string kind = "builtin";  // builtin | table
  int arity = 0;                 // table operators only
  std::vector<std::pair<std::vector<std::string>, std::string>> table;
};

struct RunConfig {
  std::uint64_t seed = 0;
  long long budget = kDefaultEnumerationBudget;
  int jobs = 1;
  double tolerance = 1.0;
  NegativePolicy negatives = NegativePolicy::corrupt_s();
  std::vector<OperatorSpec> operators;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                std::initializer_list<const char*> known,
                                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok)
      throw Error(ErrorKind::invalid_argument,
                  "unknown config key '" + key + "' in " + where);
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object())
    throw Error(ErrorKind::invalid_argument, "config root must be an object");
  detail::reject_unknown_keys(
      j, {"seed", "budget", "jobs", "tolerance", "negatives", "operators"},
      "config root");

  RunConfig cfg;
  try {
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("budget")) cfg.budget = j.at("budget").get<long long>();
    if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
    if (j.contains("tolerance"))
      cfg.tolerance = j.at("tolerance").get<double>();

    if (j.contains("negatives")) {
      const auto& n = j.at("negatives");
      detail::reject_unknown_keys(n, {"policy", "ratio", "vs_op"},
                                  "'negatives'");
      std::string policy = n.value("policy", "corrupt-s");
      double ratio = n.value("ratio", 1.0);
      std::string vs_op = n.value("vs_op", "");
      cfg.negatives = parse_negative_policy(policy, ratio, vs_op);
    }

    if (j.contains("operators")) {
      for (const auto& o : j.at("operators")) {
        detail::reject_unknown_keys(o, {"name", "kind", "arity", "table"},
                                    "'operators' entry");
        OperatorSpec spec;
        spec.name = o.at("name").get<std::string>();
        spec.kind = o.value("kind", "builtin");
        if (spec.kind != "builtin" && spec.kind != "table")
          throw Error(ErrorKind::invalid_argument,
                      "operator kind must be 'builtin' or 'table'");
        if (spec.kind == "table") {
          spec.arity = o.at("arity").get<int>();
          if (spec.arity < 1)
            throw Error(ErrorKind::invalid_argument,
                        "table operator arity must be >= 1");
          for (const auto& row : o.at("table")) {
            detail::reject_unknown_keys(row, {"in", "out"}, "table row");
            spec.table.emplace_back(
                row.at("in").get<std::vector<std::string>>(),
                row.at("out").get<std::string>());
          }
        }
        cfg.operators.push_back(std::move(spec));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument,
                std::string("malformed config: ") + e.what());
  }

  if (cfg.jobs < 1)
    throw Error(ErrorKind::invalid_argument, "jobs must be >= 1");
  if (cfg.budget < 1)
    throw Error(ErrorKind::invalid_argument, "budget must be >= 1");
  if (cfg.tolerance < 0.0 || cfg.tolerance > 1.0)
    throw Error(ErrorKind::invalid_argument, "tolerance outside [0,1]");
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot read '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument,
                "config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

// Builtins plus the config's custom table operators. A "builtin" entry must
// name an operator that already exists (it pins a dependency, adds nothing).
inline OperatorRegistry build_registry(const RunConfig& cfg) {
  OperatorRegistry reg = OperatorRegistry::builtins();
  for (const auto& spec : cfg.operators) {
    if (spec.kind == "builtin") {
      reg.require(spec.name);
      continue;
    }
    std::vector<std::pair<std::vector<LabelSymbol>, LabelSymbol>> rows;
    for (const auto& [in, out] : spec.table) {
      if (static_cast<int>(in.size()) != spec.arity)
        throw Error(ErrorKind::arity_mismatch,
                    "table row of operator '" + spec.name + "' has " +
                        std::to_string(in.size()) + " inputs, arity is " +
                        std::to_string(spec.arity));
      std::vector<LabelSymbol> tuple;
      for (const auto& t : in) tuple.push_back(LabelSymbol::from_text(t));
      rows.emplace_back(std::move(tuple), LabelSymbol::from_text(out));
    }
    reg = reg.with(TransitionOp::table(spec.name, spec.arity, std::move(rows)));
  }
  return reg;
}

inline nlohmann::json run_config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["budget"] = cfg.budget;
  j["jobs"] = cfg.jobs;
  j["tolerance"] = cfg.tolerance;
  j["negatives"] = {{"policy", cfg.negatives.kind == NegativePolicy::Kind::corrupt_s
                                   ? "corrupt-s"
                                   : "corrupt-vs-op"},
                    {"ratio", cfg.negatives.ratio}};
  if (!cfg.negatives.vs_op.empty())
    j["negatives"]["vs_op"] = cfg.negatives.vs_op;
  j["operators"] = nlohmann::json::array();
  for (const auto& spec : cfg.operators) {
    nlohmann::json o = {{"name", spec.name}, {"kind", spec.kind}};
    if (spec.kind == "table") {
      o["arity"] = spec.arity;
      o["table"] = nlohmann::json::array();
      for (const auto& [in, out] : spec.table)
        o["table"].push_back({{"in", in}, {"out", out}});
    }
    j["operators"].push_back(std::move(o));
  }
  return j;
}

}  // namespace baglogic
