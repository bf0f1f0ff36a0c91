#pragma once
// Scenario 1: rank candidate transition operators by covered positives minus
// covered negatives and report the winners with ambiguity diagnostics.

#include <algorithm>
#include <string>
#include <vector>

#include "baglogic/core.hpp"
#include "baglogic/examples.hpp"
#include "baglogic/operators.hpp"

#include <json.hpp>

namespace baglogic {

struct HypothesisScore {
  std::string op_name;
  std::string op_symbol;
  long long covered_pos = 0;
  long long covered_neg = 0;
  long long total_pos = 0;
  long long total_neg = 0;
  long long score = 0;        // covered_pos - covered_neg
  double consistency = 1.0;   // covered_pos / total_pos; 1 when no positives

  bool passes(double tolerance) const {
    return static_cast<double>(covered_pos) >=
           tolerance * static_cast<double>(total_pos);
  }
};

struct TpVerdict {
  std::vector<HypothesisScore> ranked;  // every candidate, best score first
  std::vector<std::string> winners;     // empty iff nothing met the tolerance
  bool unique = false;
  double tolerance = 1.0;
  std::string diagnostic;

  const HypothesisScore* score_for(const std::string& op_name) const {
    for (const auto& h : ranked)
      if (h.op_name == op_name) return &h;
    return nullptr;
  }
  // 1-based position in the ranking.
  std::optional<int> rank_of(const std::string& op_name) const {
    for (std::size_t i = 0; i < ranked.size(); ++i)
      if (ranked[i].op_name == op_name) return static_cast<int>(i) + 1;
    return std::nullopt;
  }
};

// Counts the ledger entries the operator maps onto their weak label.
// An entry the operator cannot evaluate (wrong label kind, missing table
// row) is simply not covered; an arity the operator can never accept is the
// caller's error.
inline HypothesisScore score_hypothesis(const TransitionOp& op,
                                        const ExampleLedger& ledger) {
  if (ledger.target != Target::TP)
    throw Error(ErrorKind::invalid_argument,
                "score_hypothesis expects a TP ledger");
  HypothesisScore h;
  h.op_name = op.name();
  h.op_symbol = op.symbol();
  h.total_pos = static_cast<long long>(ledger.positives.size());
  h.total_neg = static_cast<long long>(ledger.negatives.size());

  auto covered = [&](const LedgerEntry& e) {
    if (!op.arity().accepts(e.tuple.size()))
      throw Error(ErrorKind::arity_mismatch,
                  "operator '" + op.name() + "' does not accept tuples of " +
                      std::to_string(e.tuple.size()) + " labels");
    try {
      return op.eval(e.tuple) == e.weak_label;
    } catch (const Error&) {
      return false;
    }
  };

  for (const auto& e : ledger.positives)
    if (covered(e)) ++h.covered_pos;
  for (const auto& e : ledger.negatives)
    if (covered(e)) ++h.covered_neg;

  h.score = h.covered_pos - h.covered_neg;
  h.consistency = h.total_pos == 0 ? 1.0
                                   : static_cast<double>(h.covered_pos) /
                                         static_cast<double>(h.total_pos);
  return h;
}

// Ranking shared by operator inference and scene relation inference:
// descending score, ties kept in candidate order; winners are the top-scoring
// candidates among those meeting the tolerance.
inline TpVerdict rank_hypotheses(std::vector<HypothesisScore> scores,
                                 double tolerance) {
  TpVerdict v;
  v.tolerance = tolerance;
  std::stable_sort(scores.begin(), scores.end(),
                   [](const HypothesisScore& a, const HypothesisScore& b) {
                     return a.score > b.score;
                   });
  v.ranked = std::move(scores);

  long long best = 0;
  bool have_best = false;
  for (const auto& h : v.ranked) {
    if (!h.passes(tolerance)) continue;
    if (!have_best) {
      best = h.score;
      have_best = true;
    }
    if (h.score == best) v.winners.push_back(h.op_name);
  }
  v.unique = v.winners.size() == 1;
  if (!have_best) {
    double best_consistency = -1.0;
    std::string best_op;
    for (const auto& h : v.ranked)
      if (h.consistency > best_consistency) {
        best_consistency = h.consistency;
        best_op = h.op_name;
      }
    v.diagnostic = "no operator meets tolerance; best consistency " +
                   std::to_string(best_consistency) + " by '" + best_op + "'";
  }
  return v;
}

// Builds the scenario-1 ledger and ranks every registered operator.
// A registered operator whose arity cannot match the data scores zero.
inline TpVerdict infer_tp(const Dataset& d, const PredictionSet& preds,
                          const OperatorRegistry& registry, double tolerance,
                          const NegativePolicy& policy, std::uint64_t seed) {
  ExampleLedger ledger = build_tp_examples(d, preds, registry, policy, seed);

  std::vector<HypothesisScore> scores;
  scores.reserve(registry.size());
  for (const auto& op : registry.ops()) {
    try {
      scores.push_back(score_hypothesis(op, ledger));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::arity_mismatch) throw;
      HypothesisScore h;
      h.op_name = op.name();
      h.op_symbol = op.symbol();
      h.total_pos = static_cast<long long>(ledger.positives.size());
      h.total_neg = static_cast<long long>(ledger.negatives.size());
      h.consistency = h.total_pos == 0 ? 1.0 : 0.0;
      scores.push_back(h);
    }
  }
  return rank_hypotheses(std::move(scores), tolerance);
}

inline nlohmann::json hypothesis_score_to_json(const HypothesisScore& h) {
  nlohmann::json j;
  j["op"] = h.op_name;
  j["symbol"] = h.op_symbol;
  j["covered_pos"] = h.covered_pos;
  j["covered_neg"] = h.covered_neg;
  j["total_pos"] = h.total_pos;
  j["total_neg"] = h.total_neg;
  j["score"] = h.score;
  j["consistency"] = h.consistency;
  return j;
}

inline nlohmann::json tp_verdict_to_json(const TpVerdict& v) {
  nlohmann::json j;
  j["tolerance"] = v.tolerance;
  j["ranked"] = nlohmann::json::array();
  for (const auto& h : v.ranked) j["ranked"].push_back(hypothesis_score_to_json(h));
  j["winners"] = v.winners;
  j["unique"] = v.unique;
  if (!v.diagnostic.empty()) j["diagnostic"] = v.diagnostic;
  return j;
}

}  // namespace baglogic
