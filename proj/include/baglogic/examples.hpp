#pragma once
// Positive/negative example ledgers built from a dataset plus classifier
// predictions. Positives are the observed (bag, weak label) pairs with their
// predicted label tuples attached; negatives are synthesized by corrupting
// the weak label.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "baglogic/core.hpp"
#include "baglogic/operators.hpp"

#include <json.hpp>

namespace baglogic {

enum class Target { TP, CP };

inline const char* target_name(Target t) { return t == Target::TP ? "TP" : "CP"; }

struct LedgerEntry {
  std::string bag_id;
  LabelSymbol weak_label;
  std::vector<LabelSymbol> tuple;
  std::string provenance;
};

struct ExampleLedger {
  Target target = Target::TP;
  std::vector<LedgerEntry> positives;
  std::vector<LedgerEntry> negatives;

  bool contains(const std::vector<LedgerEntry>& side, const std::string& bag,
                const LabelSymbol& s) const {
    for (const auto& e : side)
      if (e.bag_id == bag && e.weak_label == s) return true;
    return false;
  }
  bool has_positive(const std::string& bag, const LabelSymbol& s) const {
    return contains(positives, bag, s);
  }
  bool has_negative(const std::string& bag, const LabelSymbol& s) const {
    return contains(negatives, bag, s);
  }
};

struct NegativePolicy {
  enum class Kind { corrupt_s, corrupt_vs_op };

  Kind kind = Kind::corrupt_s;
  double ratio = 1.0;   // negatives per positive
  std::string vs_op;    // required for corrupt_vs_op

  static NegativePolicy corrupt_s(double ratio = 1.0) {
    return NegativePolicy{Kind::corrupt_s, ratio, ""};
  }
  static NegativePolicy corrupt_vs_op(std::string op, double ratio = 1.0) {
    return NegativePolicy{Kind::corrupt_vs_op, ratio, std::move(op)};
  }
};

inline NegativePolicy parse_negative_policy(const std::string& name,
                                            double ratio = 1.0,
                                            const std::string& vs_op = "") {
  if (name == "corrupt-s") return NegativePolicy::corrupt_s(ratio);
  if (name == "corrupt-vs-op") {
    if (vs_op.empty())
      throw Error(ErrorKind::invalid_argument,
                  "corrupt-vs-op policy needs an operator name");
    return NegativePolicy::corrupt_vs_op(vs_op, ratio);
  }
  throw Error(ErrorKind::invalid_argument,
              "unknown negative policy '" + name + "'");
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-bag stream derived from (seed, position): draws are independent of
// iteration order, so parallel construction stays deterministic.
inline std::mt19937_64 bag_rng(std::uint64_t seed, std::uint64_t bag_index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(bag_index + 1)));
}

}  // namespace detail

// Scenario-1 ledger: every observed bag is a positive example carrying the
// predicted label tuple; negatives corrupt the weak label per the policy.
//
// corrupt-s draws the corrupted label from S minus every registered
// operator's evaluation of the tuple (and minus the observed label), so a
// negative stays negative for every candidate. When that exclusion empties S
// the draw falls back to S minus the observed label only; a bag whose weak
// alphabet offers no corrupted value yields no negative.
inline ExampleLedger build_tp_examples(const Dataset& d,
                                       const PredictionSet& preds,
                                       const OperatorRegistry& registry,
                                       const NegativePolicy& policy,
                                       std::uint64_t seed) {
  ExampleLedger ledger;
  ledger.target = Target::TP;

  const TransitionOp* vs_op = nullptr;
  if (policy.kind == NegativePolicy::Kind::corrupt_vs_op)
    vs_op = &registry.require(policy.vs_op);

  for (const auto& bag : d.bags) {
    LedgerEntry e;
    e.bag_id = bag.bag_id;
    e.weak_label = bag.weak_label;
    e.tuple = preds.tuple_for(bag);
    e.provenance = "observed";
    ledger.positives.push_back(std::move(e));
  }

  if (policy.ratio <= 0.0 || ledger.positives.empty()) return ledger;

  const std::size_t n_pos = ledger.positives.size();
  const long long total =
      std::llround(policy.ratio * static_cast<double>(n_pos));

  for (std::size_t i = 0; i < n_pos; ++i) {
    long long quota = total / static_cast<long long>(n_pos) +
                      (static_cast<long long>(i) <
                               total % static_cast<long long>(n_pos)
                           ? 1
                           : 0);
    if (quota == 0) continue;
    const LedgerEntry& pos = ledger.positives[i];

    std::set<std::string> excluded{pos.weak_label.text()};
    const char* provenance = "corrupt-s";
    if (policy.kind == NegativePolicy::Kind::corrupt_s) {
      for (const auto& op : registry.ops()) {
        if (!op.arity().accepts(pos.tuple.size())) continue;
        try {
          excluded.insert(op.eval(pos.tuple).text());
        } catch (const Error&) {
          // an operator that cannot evaluate this tuple excludes nothing
        }
      }
    } else {
      provenance = "corrupt-vs-op";
      try {
        excluded.insert(vs_op->eval(pos.tuple).text());
      } catch (const Error&) {
      }
    }

    std::vector<LabelSymbol> candidates;
    for (const auto& s : d.weak_alphabet)
      if (!excluded.count(s.text())) candidates.push_back(s);
    if (candidates.empty()) {
      // fall back to excluding only the observed label
      for (const auto& s : d.weak_alphabet)
        if (s != pos.weak_label) candidates.push_back(s);
    }

    auto rng = detail::bag_rng(seed, i);
    for (long long k = 0; k < quota && !candidates.empty(); ++k) {
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      std::size_t j = pick(rng);
      LedgerEntry neg;
      neg.bag_id = pos.bag_id;
      neg.weak_label = candidates[j];
      neg.tuple = pos.tuple;
      neg.provenance = provenance;
      ledger.negatives.push_back(std::move(neg));
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(j));
    }
  }
  return ledger;
}

// Scenario-2 ledger. A bag is positive iff the operator maps the predicted
// tuple to the observed weak label and, when ground truth is present, every
// prediction matches it; otherwise it is negative and records a witness.
inline ExampleLedger build_cp_examples(const Dataset& d, const TransitionOp& op,
                                       const PredictionSet& preds) {
  ExampleLedger ledger;
  ledger.target = Target::CP;

  for (const auto& bag : d.bags) {
    if (!op.arity().accepts(bag.instances.size()))
      throw Error(ErrorKind::arity_mismatch,
                  "operator '" + op.name() + "' does not accept bags of size " +
                      std::to_string(bag.instances.size()));
    LedgerEntry e;
    e.bag_id = bag.bag_id;
    e.weak_label = bag.weak_label;
    e.tuple = preds.tuple_for(bag);

    const InstanceRef* truth_witness = nullptr;
    if (d.ground_truth) {
      for (std::size_t pos = 0; pos < bag.instances.size(); ++pos) {
        auto it = d.ground_truth->find(bag.instances[pos]);
        if (it != d.ground_truth->end() && !(it->second == e.tuple[pos])) {
          truth_witness = &bag.instances[pos];
          break;
        }
      }
    }
    bool eval_ok = false;
    try {
      eval_ok = op.eval(e.tuple) == bag.weak_label;
    } catch (const Error&) {
      eval_ok = false;
    }

    if (eval_ok && !truth_witness) {
      e.provenance = "consistent";
      ledger.positives.push_back(std::move(e));
    } else if (truth_witness) {
      e.provenance = "witness:" + truth_witness->id;
      ledger.negatives.push_back(std::move(e));
    } else {
      e.provenance = "eval-mismatch";
      ledger.negatives.push_back(std::move(e));
    }
  }
  return ledger;
}

inline nlohmann::json ledger_entry_to_json(const LedgerEntry& e) {
  nlohmann::json j;
  j["bag"] = e.bag_id;
  j["s"] = e.weak_label.text();
  j["tuple"] = nlohmann::json::array();
  for (const auto& s : e.tuple) j["tuple"].push_back(s.text());
  j["provenance"] = e.provenance;
  return j;
}

inline nlohmann::json ledger_to_json(const ExampleLedger& ledger) {
  nlohmann::json j;
  j["target"] = target_name(ledger.target);
  j["positives"] = nlohmann::json::array();
  for (const auto& e : ledger.positives)
    j["positives"].push_back(ledger_entry_to_json(e));
  j["negatives"] = nlohmann::json::array();
  for (const auto& e : ledger.negatives)
    j["negatives"].push_back(ledger_entry_to_json(e));
  return j;
}

}  // namespace baglogic
