#pragma once
// Scenario 2: abduce per-instance candidate label sets from bag constraints
// under a known transition operator, and validate classifier predictions
// against them. The exported abduction is per-bag intersection (arc
// consistency); the joint-assignment oracle gives the stricter global
// semantics for tests and small runs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "baglogic/core.hpp"
#include "baglogic/operators.hpp"

#include <json.hpp>

namespace baglogic {

struct CandidateMap {
  std::map<InstanceRef, std::set<LabelSymbol>> per_instance;
  std::vector<InstanceRef> contradictions;  // instances with empty sets

  const std::set<LabelSymbol>* find(const InstanceRef& inst) const {
    auto it = per_instance.find(inst);
    return it == per_instance.end() ? nullptr : &it->second;
  }
};

struct ValidationWitness {
  InstanceRef instance;
  int position = 0;  // 1-based bag position
  std::optional<LabelSymbol> predicted;
  std::string constraint;
};

struct BagViolation {
  std::string bag_id;
  std::optional<ValidationWitness> witness;
};

struct ValidationReport {
  std::vector<std::string> consistent_bags;
  std::vector<BagViolation> violating_bags;
  std::optional<double> item_accuracy;
  long long correct_items = 0;
  long long total_items = 0;
};

namespace detail {

// Preimages keyed by weak-label text; bags sharing a label share the work.
class PreimageCache {
 public:
  PreimageCache(const TransitionOp& op, const LabelAlphabet& alphabet, int m,
                long long budget)
      : op_(op), alphabet_(alphabet), m_(m), budget_(budget) {}

  const std::vector<std::vector<LabelSymbol>>& tuples(const LabelSymbol& s) {
    auto it = cache_.find(s.text());
    if (it == cache_.end())
      it = cache_.emplace(s.text(), preimage(op_, s, alphabet_, m_, budget_))
               .first;
    return it->second;
  }

  // Labels that appear at `pos` in some preimage tuple of s.
  const std::set<LabelSymbol>& projection(const LabelSymbol& s, int pos) {
    auto key = std::make_pair(s.text(), pos);
    auto it = projections_.find(key);
    if (it == projections_.end()) {
      std::set<LabelSymbol> proj;
      for (const auto& t : tuples(s)) proj.insert(t[static_cast<std::size_t>(pos)]);
      it = projections_.emplace(std::move(key), std::move(proj)).first;
    }
    return it->second;
  }

 private:
  const TransitionOp& op_;
  const LabelAlphabet& alphabet_;
  int m_;
  long long budget_;
  std::map<std::string, std::vector<std::vector<LabelSymbol>>> cache_;
  std::map<std::pair<std::string, int>, std::set<LabelSymbol>> projections_;
};

inline std::set<LabelSymbol> intersect(const std::set<LabelSymbol>& a,
                                       const std::set<LabelSymbol>& b) {
  std::set<LabelSymbol> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.begin()));
  return out;
}

}  // namespace detail

// For every instance, intersects the per-position preimage projections of
// every bag (and position) it occurs in. Instances appearing in no bag are
// absent; an instance whose intersection is empty is a contradiction, which
// is reported, never fatal.
inline CandidateMap abduce_labels(const Dataset& d, const TransitionOp& op,
                                  long long budget = kDefaultEnumerationBudget) {
  if (!d.bags.empty() && !op.arity().accepts(static_cast<std::size_t>(d.bag_size)))
    throw Error(ErrorKind::arity_mismatch,
                "operator '" + op.name() + "' does not accept bag size " +
                    std::to_string(d.bag_size));
  CandidateMap result;
  detail::PreimageCache cache(op, d.instance_alphabet, d.bag_size, budget);

  for (const auto& bag : d.bags) {
    for (std::size_t pos = 0; pos < bag.instances.size(); ++pos) {
      const auto& proj =
          cache.projection(bag.weak_label, static_cast<int>(pos));
      auto [it, fresh] = result.per_instance.emplace(bag.instances[pos], proj);
      if (!fresh) it->second = detail::intersect(it->second, proj);
    }
  }
  for (const auto& [inst, labels] : result.per_instance)
    if (labels.empty()) result.contradictions.push_back(inst);
  return result;
}

// Independent oracle: enumerates every joint label assignment per connected
// component of the instance/bag graph and keeps the labels that occur in at
// least one globally consistent assignment. Exponential; guarded by budget.
inline CandidateMap brute_force_abduction_oracle(
    const Dataset& d, const TransitionOp& op,
    long long budget = kDefaultEnumerationBudget) {
  if (!d.bags.empty() && !op.arity().accepts(static_cast<std::size_t>(d.bag_size)))
    throw Error(ErrorKind::arity_mismatch,
                "operator '" + op.name() + "' does not accept bag size " +
                    std::to_string(d.bag_size));

  std::vector<InstanceRef> instances = referenced_instances(d);
  std::unordered_map<std::string, std::size_t> inst_index;
  for (std::size_t i = 0; i < instances.size(); ++i)
    inst_index.emplace(instances[i].id, i);

  // union-find over instances; a bag links all of its members
  std::vector<std::size_t> parent(instances.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find_root =
      [&](std::size_t x) -> std::size_t {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& bag : d.bags)
    for (std::size_t pos = 1; pos < bag.instances.size(); ++pos) {
      std::size_t a = find_root(inst_index.at(bag.instances[0].id));
      std::size_t b = find_root(inst_index.at(bag.instances[pos].id));
      if (a != b) parent[b] = a;
    }

  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < instances.size(); ++i)
    components[find_root(i)].push_back(i);

  CandidateMap result;
  for (const auto& inst : instances)
    result.per_instance.emplace(inst, std::set<LabelSymbol>{});

  for (const auto& [root, members] : components) {
    std::unordered_map<std::string, std::size_t> local;  // id -> slot
    for (std::size_t slot = 0; slot < members.size(); ++slot)
      local.emplace(instances[members[slot]].id, slot);

    std::vector<const Bag*> bags;
    for (const auto& bag : d.bags)
      if (!bag.instances.empty() &&
          find_root(inst_index.at(bag.instances[0].id)) == root)
        bags.push_back(&bag);

    long double work = std::pow(
        static_cast<long double>(d.instance_alphabet.size()),
        static_cast<long double>(members.size()));
    if (work * static_cast<long double>(std::max<std::size_t>(bags.size(), 1)) >
        static_cast<long double>(budget))
      throw Error(ErrorKind::budget_exceeded,
                  "joint enumeration over " + std::to_string(members.size()) +
                      " instances exceeds budget");

    std::vector<std::size_t> assignment(members.size(), 0);
    std::vector<std::set<std::size_t>> survivors(members.size());
    std::vector<LabelSymbol> tuple;
    do {
      bool consistent = true;
      for (const Bag* bag : bags) {
        tuple.clear();
        for (const auto& inst : bag->instances)
          tuple.push_back(d.instance_alphabet.at(assignment[local.at(inst.id)]));
        if (!(eval_operator(op, tuple) == bag->weak_label)) {
          consistent = false;
          break;
        }
      }
      if (consistent)
        for (std::size_t slot = 0; slot < members.size(); ++slot)
          survivors[slot].insert(assignment[slot]);
    } while (detail::next_index_tuple(assignment, d.instance_alphabet.size()));

    for (std::size_t slot = 0; slot < members.size(); ++slot) {
      auto& labels = result.per_instance.at(instances[members[slot]]);
      for (std::size_t idx : survivors[slot])
        labels.insert(d.instance_alphabet.at(idx));
    }
  }

  for (const auto& [inst, labels] : result.per_instance)
    if (labels.empty()) result.contradictions.push_back(inst);
  return result;
}

// A bag is consistent iff the operator maps the predicted tuple to the
// observed weak label. A violating bag's witness is the first position whose
// predicted label cannot be extended by any preimage tuple matching the
// already-accepted prefix.
inline ValidationReport validate_classifier(
    const Dataset& d, const TransitionOp& op, const PredictionSet& preds,
    long long budget = kDefaultEnumerationBudget) {
  ValidationReport report;
  detail::PreimageCache cache(op, d.instance_alphabet, d.bag_size, budget);

  for (const auto& bag : d.bags) {
    std::vector<LabelSymbol> tuple = preds.tuple_for(bag);
    bool consistent = false;
    try {
      consistent = op.eval(tuple) == bag.weak_label;
    } catch (const Error&) {
      consistent = false;
    }
    if (consistent) {
      report.consistent_bags.push_back(bag.bag_id);
      continue;
    }

    BagViolation v;
    v.bag_id = bag.bag_id;
    const auto& tuples = cache.tuples(bag.weak_label);
    if (tuples.empty()) {
      v.witness = ValidationWitness{
          bag.instances.empty() ? InstanceRef{} : bag.instances[0], 1,
          tuple.empty() ? std::optional<LabelSymbol>{} : tuple[0],
          "weak label '" + bag.weak_label.text() + "' has an empty preimage"};
    } else {
      std::vector<const std::vector<LabelSymbol>*> alive;
      for (const auto& t : tuples) alive.push_back(&t);
      for (std::size_t pos = 0; pos < tuple.size(); ++pos) {
        std::vector<const std::vector<LabelSymbol>*> next;
        for (const auto* t : alive)
          if ((*t)[pos] == tuple[pos]) next.push_back(t);
        if (next.empty()) {
          v.witness = ValidationWitness{
              bag.instances[pos], static_cast<int>(pos) + 1, tuple[pos],
              "no assignment with weak label '" + bag.weak_label.text() +
                  "' extends the predicted prefix"};
          break;
        }
        alive = std::move(next);
      }
    }
    report.violating_bags.push_back(std::move(v));
  }

  if (d.ground_truth) {
    for (const auto& [key, predicted] : preds.predictions) {
      auto it = d.ground_truth->find(key.first);
      if (it == d.ground_truth->end()) continue;
      ++report.total_items;
      if (it->second == predicted) ++report.correct_items;
    }
    if (report.total_items > 0)
      report.item_accuracy = static_cast<double>(report.correct_items) /
                             static_cast<double>(report.total_items);
  }
  return report;
}

inline nlohmann::json candidate_map_to_json(const CandidateMap& m) {
  nlohmann::json j;
  j["candidates"] = nlohmann::json::object();
  for (const auto& [inst, labels] : m.per_instance) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : labels) arr.push_back(s.text());
    j["candidates"][inst.id] = std::move(arr);
  }
  j["contradictions"] = nlohmann::json::array();
  for (const auto& inst : m.contradictions)
    j["contradictions"].push_back(inst.id);
  return j;
}

// CSV rows: instance, candidate count, whether the truth label survived.
inline std::string candidate_map_to_csv(const CandidateMap& m,
                                        const Dataset& d) {
  std::string csv = "instance,candidates,truth_in_set\n";
  for (const auto& [inst, labels] : m.per_instance) {
    csv += inst.id + "," + std::to_string(labels.size()) + ",";
    if (d.ground_truth) {
      auto it = d.ground_truth->find(inst);
      if (it != d.ground_truth->end())
        csv += labels.count(it->second) ? "1" : "0";
    }
    csv += "\n";
  }
  return csv;
}

inline nlohmann::json validation_report_to_json(const ValidationReport& r) {
  nlohmann::json j;
  j["consistent"] = r.consistent_bags;
  j["violations"] = nlohmann::json::array();
  for (const auto& v : r.violating_bags) {
    nlohmann::json jv;
    jv["bag"] = v.bag_id;
    if (v.witness) {
      jv["witness"] = v.witness->instance.id;
      jv["position"] = v.witness->position;
      if (v.witness->predicted) jv["predicted"] = v.witness->predicted->text();
      jv["constraint"] = v.witness->constraint;
    }
    j["violations"].push_back(std::move(jv));
  }
  if (r.item_accuracy) {
    j["item_accuracy"] = *r.item_accuracy;
    j["correct_items"] = r.correct_items;
    j["total_items"] = r.total_items;
  }
  return j;
}

}  // namespace baglogic
