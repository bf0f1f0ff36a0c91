#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

#include <set>
#include <string>
#include <vector>

using namespace baglogic;

namespace {

// (bag, weak label) pairs for easy set comparison.
std::set<std::pair<std::string, std::string>> keys(
    const std::vector<LedgerEntry>& entries) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& e : entries) out.insert({e.bag_id, e.weak_label.text()});
  return out;
}

}  // namespace

TEST_CASE("the tabletop demo yields three positives and one negative") {
  SceneData scene = table_demo_scene();
  ExampleLedger ledger = build_scene_tp_examples(scene);

  REQUIRE(ledger.target == Target::TP);
  REQUIRE(keys(ledger.positives) ==
          std::set<std::pair<std::string, std::string>>{
              {"ig1", "onTop(vase,table)"},
              {"ig2", "onTop(books,table)"},
              {"ig2", "onTop(vase,table)"}});
  REQUIRE(keys(ledger.negatives) ==
          std::set<std::pair<std::string, std::string>>{
              {"ig3", "onTop(lamp,table)"}});

  for (const auto& e : ledger.positives)
    REQUIRE(e.provenance == "co-detected");
  REQUIRE(ledger.negatives[0].provenance == "missing:table");
  // The tuple mirrors the hint's argument pair.
  REQUIRE(ledger.negatives[0].tuple[0].text() == "lamp");
  REQUIRE(ledger.negatives[0].tuple[1].text() == "table");
}

TEST_CASE("every hint lands on exactly one side of the ledger") {
  SceneData scene = table_demo_scene();
  ExampleLedger ledger = build_scene_tp_examples(scene);
  std::size_t hinted = 0;
  for (const auto& frag : scene.fragments) hinted += frag.hints.size();
  REQUIRE(ledger.positives.size() + ledger.negatives.size() == hinted);
}

TEST_CASE("relation scoring accepts supported pairs and nothing else") {
  SceneInference inf = infer_scene_relations(table_demo_scene());

  REQUIRE(inf.pairs.size() == 3);  // (vase,table), (books,table), (lamp,table)
  REQUIRE(inf.pairs[0].arg_a == "vase");
  REQUIRE(inf.pairs[0].arg_b == "table");
  REQUIRE(inf.pairs[0].accepted == std::vector<std::string>{"onTop"});

  // onTop(vase,table) gathers two positives and no negatives.
  const RelationFinding& on_top = inf.pairs[0].findings[0];
  REQUIRE(on_top.relation == "onTop");
  REQUIRE(on_top.score.covered_pos == 2);
  REQUIRE(on_top.score.covered_neg == 0);
  REQUIRE(on_top.status == "accepted");

  // nextTo(vase,table) was never hinted, so it has no evidence.
  const RelationFinding& next_to = inf.pairs[0].findings[1];
  REQUIRE(next_to.status == "unsupported");

  // The lamp hint only ever appears with a missing argument.
  const PairInference& lamp = inf.pairs[2];
  REQUIRE(lamp.arg_a == "lamp");
  REQUIRE(lamp.accepted.empty());
  REQUIRE(lamp.findings[0].status == "unsupported");
  REQUIRE(lamp.findings[0].score.covered_neg == 1);

  REQUIRE(inf.accepted_atoms() ==
          std::set<std::string>{"onTop(vase,table)", "onTop(books,table)"});
}

TEST_CASE("conflicting evidence marks a relation contested") {
  SceneData scene = table_demo_scene();
  // A fourth fragment hints onTop(vase,table) but the table went undetected.
  SceneFragment frag;
  frag.fragment_id = "ig4";
  frag.detected = {"vase"};
  frag.hints.push_back({"onTop", "vase", "table"});
  scene.fragments.push_back(frag);

  SceneInference inf = infer_scene_relations(scene);
  REQUIRE(inf.pairs[0].findings[0].status == "contested");
  REQUIRE(inf.pairs[0].accepted.empty());
}

TEST_CASE("validation flags fragments whose accepted hints lack a detection") {
  SceneData scene = table_demo_scene();
  ValidationReport r =
      validate_scene_detections(scene, all_hinted_atoms(scene));

  REQUIRE(r.violating_bags.size() == 1);
  REQUIRE(r.violating_bags[0].bag_id == "ig3:onTop(lamp,table)");
  const auto& witness = r.violating_bags[0].witness;
  REQUIRE(witness.has_value());
  REQUIRE(witness->instance.id == "table");
  REQUIRE(witness->position == 2);
  REQUIRE(witness->constraint.find("not detected") != std::string::npos);

  // ig1 and ig2 hints are all confirmed.
  REQUIRE(r.consistent_bags.size() == 3);
}

TEST_CASE("validation only checks atoms the caller accepted") {
  SceneData scene = table_demo_scene();
  ValidationReport r = validate_scene_detections(scene, {});
  REQUIRE(r.violating_bags.empty());
  REQUIRE(r.consistent_bags.empty());

  ValidationReport partial =
      validate_scene_detections(scene, {"onTop(vase,table)"});
  REQUIRE(partial.violating_bags.empty());
  REQUIRE(partial.consistent_bags.size() == 2);  // ig1 and ig2
}

TEST_CASE("scene construction rejects undeclared names") {
  auto parse = [](const char* text) { return make_scene(parse_fact_file(text)); };

  SECTION("unknown relation") {
    try {
      parse(
          "alphabet object vase table\nalphabet relation onTop\n"
          "fragment(ig1).\nhint(ig1, behind, vase, table).\n");
      FAIL("expected an unknown-relation error");
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::unknown_relation);
    }
  }

  SECTION("unknown object") {
    try {
      parse(
          "alphabet object vase table\nalphabet relation onTop\n"
          "fragment(ig1).\ndetect(ig1, sofa).\n");
      FAIL("expected an unknown-symbol error");
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::unknown_symbol);
    }
  }

  SECTION("detect before fragment") {
    try {
      parse(
          "alphabet object vase\nalphabet relation onTop\n"
          "detect(ig9, vase).\n");
      FAIL("expected an unknown-symbol error");
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::unknown_symbol);
    }
  }

  SECTION("duplicate fragment") {
    try {
      parse(
          "alphabet object vase\nalphabet relation onTop\n"
          "fragment(ig1).\nfragment(ig1).\n");
      FAIL("expected a duplicate-name error");
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::duplicate_name);
    }
  }
}

TEST_CASE("scenes without alphabets infer them in first-seen order") {
  SceneData scene = make_scene(parse_fact_file(
      "fragment(ig1).\ndetect(ig1, vase).\ndetect(ig1, table).\n"
      "hint(ig1, onTop, vase, table).\n"));
  REQUIRE(scene.objects.contains("vase"));
  REQUIRE(scene.objects.contains("table"));
  REQUIRE(scene.relations.contains("onTop"));
}

TEST_CASE("scene facts round-trip through the writer") {
  SceneData scene = table_demo_scene();
  std::string text = write_scene_facts(scene);
  SceneData again = make_scene(parse_fact_file(text));

  REQUIRE(again.fragments.size() == scene.fragments.size());
  for (std::size_t i = 0; i < scene.fragments.size(); ++i) {
    REQUIRE(again.fragments[i].fragment_id == scene.fragments[i].fragment_id);
    REQUIRE(again.fragments[i].detected == scene.fragments[i].detected);
    REQUIRE(again.fragments[i].hints.size() == scene.fragments[i].hints.size());
  }
  REQUIRE(write_scene_facts(again) == text);
}

TEST_CASE("fully visible truthful scenes validate cleanly") {
  std::vector<RelationAtom> graph = {{"onTop", "vase", "table"},
                                     {"nextTo", "lamp", "books"}};
  LabelAlphabet objects =
      LabelAlphabet::from_texts({"vase", "table", "books", "lamp"});
  LabelAlphabet relations =
      LabelAlphabet::from_texts({"onTop", "nextTo", "beside"});

  SceneData scene = gen_scene_dataset(graph, objects, relations, 12, 1.0, 77);
  ExampleLedger ledger = build_scene_tp_examples(scene);
  REQUIRE(ledger.negatives.empty());
  REQUIRE_FALSE(ledger.positives.empty());

  SceneInference inf = infer_scene_relations(scene);
  REQUIRE(inf.accepted_atoms() ==
          std::set<std::string>{"onTop(vase,table)", "nextTo(lamp,books)"});

  ValidationReport r =
      validate_scene_detections(scene, inf.accepted_atoms());
  REQUIRE(r.violating_bags.empty());
}

TEST_CASE("scene inference serializes pairs with statuses") {
  nlohmann::json j = scene_inference_to_json(infer_scene_relations(table_demo_scene()));
  REQUIRE(j["pairs"].size() == 3);
  REQUIRE(j["pairs"][0]["args"] == nlohmann::json::array({"vase", "table"}));
  REQUIRE(j["pairs"][0]["accepted"] == nlohmann::json::array({"onTop"}));
  bool found_status = false;
  for (const auto& rel : j["pairs"][0]["relations"])
    if (rel.contains("status")) found_status = true;
  REQUIRE(found_status);
}
