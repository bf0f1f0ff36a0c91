#pragma once
// Relational-scene instantiation: fragments carry detected object classes
// (CP facts) and hinted relation atoms (OP cues). Relation candidates are
// ranked with the exact same ledger scoring as the digit scenarios by
// materializing each relation as a table operator over object pairs.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "baglogic/core.hpp"
#include "baglogic/cp_abduce.hpp"
#include "baglogic/examples.hpp"
#include "baglogic/factfile.hpp"
#include "baglogic/operators.hpp"
#include "baglogic/tp_infer.hpp"

#include <json.hpp>

namespace baglogic {

struct RelationAtom {
  std::string relation;
  std::string arg_a;
  std::string arg_b;

  std::string text() const {
    return relation + "(" + arg_a + "," + arg_b + ")";
  }
  bool operator==(const RelationAtom& o) const {
    return relation == o.relation && arg_a == o.arg_a && arg_b == o.arg_b;
  }
};

struct SceneFragment {
  std::string fragment_id;
  std::set<std::string> detected;    // object classes the classifier saw
  std::vector<RelationAtom> hints;   // relation cues, unconfirmed
};

struct SceneData {
  LabelAlphabet objects;
  LabelAlphabet relations;
  std::vector<SceneFragment> fragments;
};

inline SceneData make_scene(const FactFile& f) {
  SceneData scene;

  auto alphabet_or_infer = [&](const char* kind,
                               std::vector<std::string> inferred) {
    if (auto it = f.alphabets.find(kind); it != f.alphabets.end())
      return LabelAlphabet::from_texts(it->second);
    if (inferred.empty()) return LabelAlphabet{};
    return LabelAlphabet::from_texts(std::move(inferred));
  };
  auto first_seen = [](std::vector<std::string>& out, const std::string& s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };

  std::vector<std::string> seen_objects, seen_relations;
  for (const auto& d : f.detects) first_seen(seen_objects, d.object);
  for (const auto& h : f.hints) {
    first_seen(seen_relations, h.relation);
    first_seen(seen_objects, h.arg_a);
    first_seen(seen_objects, h.arg_b);
  }
  scene.objects = alphabet_or_infer("object", std::move(seen_objects));
  scene.relations = alphabet_or_infer("relation", std::move(seen_relations));

  std::map<std::string, std::size_t> index;
  for (const auto& id : f.fragments) {
    if (index.count(id))
      throw Error(ErrorKind::duplicate_name, "fragment '" + id + "' declared twice");
    index.emplace(id, scene.fragments.size());
    scene.fragments.push_back({id, {}, {}});
  }
  auto fragment_at = [&](const std::string& id) -> SceneFragment& {
    auto it = index.find(id);
    if (it == index.end())
      throw Error(ErrorKind::unknown_symbol, "fragment '" + id + "' not declared");
    return scene.fragments[it->second];
  };

  for (const auto& d : f.detects) {
    if (!scene.objects.contains(d.object))
      throw Error(ErrorKind::unknown_symbol,
                  "object '" + d.object + "' not in object alphabet");
    fragment_at(d.fragment).detected.insert(d.object);
  }
  for (const auto& h : f.hints) {
    if (!scene.relations.contains(h.relation))
      throw Error(ErrorKind::unknown_relation,
                  "relation '" + h.relation + "' not in relation alphabet");
    for (const auto& arg : {h.arg_a, h.arg_b})
      if (!scene.objects.contains(arg))
        throw Error(ErrorKind::unknown_symbol,
                    "object '" + arg + "' not in object alphabet");
    fragment_at(h.fragment).hints.push_back({h.relation, h.arg_a, h.arg_b});
  }
  return scene;
}

// A relation as a transition operator: (a, b) -> the atom "rel(a,b)". Total
// over ordered object pairs, so ledger scoring applies unchanged.
inline TransitionOp relation_op(const std::string& relation,
                                const LabelAlphabet& objects) {
  std::vector<std::pair<std::vector<LabelSymbol>, LabelSymbol>> rows;
  rows.reserve(objects.size() * objects.size());
  for (const auto& a : objects)
    for (const auto& b : objects)
      rows.emplace_back(
          std::vector<LabelSymbol>{a, b},
          LabelSymbol::from_text(RelationAtom{relation, a.text(), b.text()}.text()));
  return TransitionOp::table(relation, 2, std::move(rows));
}

// Hinted atoms become ledger entries: positive when both arguments were
// detected in the fragment, negative otherwise (the undetected argument is
// the provenance witness).
inline ExampleLedger build_scene_tp_examples(const SceneData& scene) {
  ExampleLedger ledger;
  ledger.target = Target::TP;
  for (const auto& frag : scene.fragments) {
    for (const auto& hint : frag.hints) {
      if (!scene.relations.contains(hint.relation))
        throw Error(ErrorKind::unknown_relation,
                    "relation '" + hint.relation + "' not in relation alphabet");
      LedgerEntry e;
      e.bag_id = frag.fragment_id;
      e.weak_label = LabelSymbol::from_text(hint.text());
      e.tuple = {LabelSymbol::from_text(hint.arg_a),
                 LabelSymbol::from_text(hint.arg_b)};
      std::string missing;
      for (const auto& arg : {hint.arg_a, hint.arg_b})
        if (!frag.detected.count(arg)) {
          missing = arg;
          break;
        }
      if (missing.empty()) {
        e.provenance = "co-detected";
        ledger.positives.push_back(std::move(e));
      } else {
        e.provenance = "missing:" + missing;
        ledger.negatives.push_back(std::move(e));
      }
    }
  }
  return ledger;
}

struct RelationFinding {
  std::string relation;
  HypothesisScore score;
  std::string status;  // accepted | contested | unsupported
};

struct PairInference {
  std::string arg_a;
  std::string arg_b;
  TpVerdict verdict;
  std::vector<RelationFinding> findings;  // relation-alphabet order
  std::vector<std::string> accepted;
};

struct SceneInference {
  std::vector<PairInference> pairs;

  // Accepted atoms across all pairs, e.g. "onTop(vase,table)".
  std::set<std::string> accepted_atoms() const {
    std::set<std::string> atoms;
    for (const auto& p : pairs)
      for (const auto& r : p.accepted)
        atoms.insert(RelationAtom{r, p.arg_a, p.arg_b}.text());
    return atoms;
  }
};

// Per hinted object pair, scores every relation in the vocabulary against
// that pair's ledger slice. Accepted = positive evidence and no negative
// evidence; contested = both; unsupported = no positive evidence.
inline SceneInference infer_scene_relations(const SceneData& scene,
                                            double tolerance = 1.0) {
  ExampleLedger full = build_scene_tp_examples(scene);

  std::vector<std::pair<std::string, std::string>> pair_order;
  for (const auto& frag : scene.fragments)
    for (const auto& hint : frag.hints) {
      auto key = std::make_pair(hint.arg_a, hint.arg_b);
      if (std::find(pair_order.begin(), pair_order.end(), key) ==
          pair_order.end())
        pair_order.push_back(std::move(key));
    }

  SceneInference result;
  for (const auto& [a, b] : pair_order) {
    ExampleLedger slice;
    slice.target = Target::TP;
    auto matches = [&](const LedgerEntry& e) {
      return e.tuple.size() == 2 && e.tuple[0].text() == a &&
             e.tuple[1].text() == b;
    };
    for (const auto& e : full.positives)
      if (matches(e)) slice.positives.push_back(e);
    for (const auto& e : full.negatives)
      if (matches(e)) slice.negatives.push_back(e);

    PairInference pi;
    pi.arg_a = a;
    pi.arg_b = b;
    std::vector<HypothesisScore> scores;
    for (const auto& rel : scene.relations) {
      TransitionOp op = relation_op(rel.text(), scene.objects);
      HypothesisScore h = score_hypothesis(op, slice);
      std::string status = h.covered_pos > 0
                               ? (h.covered_neg == 0 ? "accepted" : "contested")
                               : "unsupported";
      if (status == "accepted") pi.accepted.push_back(rel.text());
      pi.findings.push_back({rel.text(), h, std::move(status)});
      scores.push_back(std::move(h));
    }
    pi.verdict = rank_hypotheses(std::move(scores), tolerance);
    result.pairs.push_back(std::move(pi));
  }
  return result;
}

inline std::set<std::string> all_hinted_atoms(const SceneData& scene) {
  std::set<std::string> atoms;
  for (const auto& frag : scene.fragments)
    for (const auto& hint : frag.hints) atoms.insert(hint.text());
  return atoms;
}

// Checks detections against accepted relation atoms: every (fragment, hint)
// whose atom is accepted must have both arguments detected; an undetected
// argument is the violation witness. Report keys are "fragment:atom".
inline ValidationReport validate_scene_detections(
    const SceneData& scene, const std::set<std::string>& accepted_atoms) {
  ValidationReport report;
  for (const auto& frag : scene.fragments) {
    for (const auto& hint : frag.hints) {
      if (!accepted_atoms.count(hint.text())) continue;
      std::string key = frag.fragment_id + ":" + hint.text();
      std::string missing;
      int position = 0;
      if (!frag.detected.count(hint.arg_a)) {
        missing = hint.arg_a;
        position = 1;
      } else if (!frag.detected.count(hint.arg_b)) {
        missing = hint.arg_b;
        position = 2;
      }
      if (missing.empty()) {
        report.consistent_bags.push_back(std::move(key));
      } else {
        BagViolation v;
        v.bag_id = std::move(key);
        v.witness = ValidationWitness{
            InstanceRef{missing}, position, std::nullopt,
            "object '" + missing + "' not detected in fragment '" +
                frag.fragment_id + "'"};
        report.violating_bags.push_back(std::move(v));
      }
    }
  }
  return report;
}

// The worked tabletop example: a vase-and-books table scene seen through
// three partial fragments, the third of which hints lamp-on-table while only
// the lamp was detected.
inline SceneData table_demo_scene() {
  SceneData scene;
  scene.objects = LabelAlphabet::from_texts({"vase", "table", "books", "lamp"});
  scene.relations = LabelAlphabet::from_texts({"onTop", "nextTo", "beside"});
  scene.fragments = {
      {"ig1", {"vase", "table"}, {{"onTop", "vase", "table"}}},
      {"ig2",
       {"books", "table", "vase"},
       {{"onTop", "books", "table"}, {"onTop", "vase", "table"}}},
      {"ig3", {"lamp"}, {{"onTop", "lamp", "table"}}},
  };
  return scene;
}

inline std::string write_scene_facts(const SceneData& scene) {
  std::string out;
  if (!scene.objects.empty())
    out += "alphabet object " + detail::format_alphabet(scene.objects) + "\n";
  if (!scene.relations.empty())
    out += "alphabet relation " + detail::format_alphabet(scene.relations) +
           "\n";
  for (const auto& frag : scene.fragments) {
    out += "fragment(" + frag.fragment_id + ").\n";
    for (const auto& obj : frag.detected)
      out += "detect(" + frag.fragment_id + ", " + obj + ").\n";
    for (const auto& hint : frag.hints)
      out += "hint(" + frag.fragment_id + ", " + hint.relation + ", " +
             hint.arg_a + ", " + hint.arg_b + ").\n";
  }
  return out;
}

inline nlohmann::json scene_inference_to_json(const SceneInference& inf) {
  nlohmann::json j;
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : inf.pairs) {
    nlohmann::json jp;
    jp["args"] = {p.arg_a, p.arg_b};
    jp["accepted"] = p.accepted;
    jp["relations"] = nlohmann::json::array();
    for (const auto& f : p.findings) {
      nlohmann::json jf = hypothesis_score_to_json(f.score);
      jf["status"] = f.status;
      jp["relations"].push_back(std::move(jf));
    }
    j["pairs"].push_back(std::move(jp));
  }
  return j;
}

}  // namespace baglogic
