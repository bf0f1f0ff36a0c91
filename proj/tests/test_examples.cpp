#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

using namespace baglogic;
using testutil::digits;
using testutil::num;
using testutil::ref;

namespace {

const OperatorRegistry kRegistry = OperatorRegistry::builtins();

Dataset addition_pairs() {
  return testutil::dataset_from_truth({{10, 11}, {13, 14}}, {21, 27},
                                      LabelAlphabet::numeric_range(0, 20),
                                      LabelAlphabet::numeric_range(0, 40));
}

}  // namespace

TEST_CASE("every observed bag becomes a positive example") {
  Dataset d = addition_pairs();
  ExampleLedger ledger =
      build_tp_examples(d, testutil::truth_predictions(d), kRegistry,
                        NegativePolicy::corrupt_s(), 7);

  REQUIRE(ledger.target == Target::TP);
  REQUIRE(ledger.positives.size() == 2);
  REQUIRE(ledger.positives[0].bag_id == "b1");
  REQUIRE(ledger.positives[0].weak_label == num(21));
  REQUIRE(ledger.positives[0].tuple ==
          std::vector<LabelSymbol>{num(10), num(11)});
  REQUIRE(ledger.positives[0].provenance == "observed");
  REQUIRE(ledger.positives[1].weak_label == num(27));
  REQUIRE(ledger.positives[1].tuple ==
          std::vector<LabelSymbol>{num(13), num(14)});
}

TEST_CASE("an empty dataset yields an empty ledger") {
  Dataset d;
  d.instance_alphabet = digits();
  d.weak_alphabet = digits();
  ExampleLedger ledger = build_tp_examples(d, PredictionSet{}, kRegistry,
                                           NegativePolicy::corrupt_s(), 0);
  REQUIRE(ledger.positives.empty());
  REQUIRE(ledger.negatives.empty());
}

TEST_CASE("corrupt-s negatives dodge every registered operator") {
  Dataset d = testutil::dataset_from_truth(
      {{3, 4}}, {12}, digits(), LabelAlphabet::numeric_range(0, 81));
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    ExampleLedger ledger =
        build_tp_examples(d, testutil::truth_predictions(d), kRegistry,
                          NegativePolicy::corrupt_s(), seed);
    REQUIRE(ledger.negatives.size() == 1);
    const LedgerEntry& neg = ledger.negatives[0];
    REQUIRE(neg.provenance == "corrupt-s");
    REQUIRE(neg.tuple == ledger.positives[0].tuple);
    REQUIRE(neg.weak_label != num(12));
    // Independently re-evaluate every operator on the tuple.
    for (const auto& op : kRegistry.ops()) {
      if (!op.arity().accepts(neg.tuple.size())) continue;
      REQUIRE(eval_operator(op, neg.tuple) != neg.weak_label);
    }
  }
}

TEST_CASE("corrupt-s falls back to dodging only the observed label") {
  // Weak alphabet {0, 1}: evaluations of the registered operators blanket
  // it, so the draw falls back to "anything but the observed label".
  Dataset d = testutil::dataset_from_ids({{{"a", "b"}, 1}}, digits(),
                                         LabelAlphabet::numeric_range(0, 1),
                                         {{"a", 0}, {"b", 1}});
  ExampleLedger ledger =
      build_tp_examples(d, testutil::truth_predictions(d), kRegistry,
                        NegativePolicy::corrupt_s(), 3);
  REQUIRE(ledger.negatives.size() == 1);
  REQUIRE(ledger.negatives[0].weak_label == num(0));
}

TEST_CASE("a singleton weak alphabet yields no negative") {
  Dataset d = testutil::dataset_from_ids({{{"a", "b"}, 5}}, digits(),
                                         LabelAlphabet::from_texts({"5"}),
                                         {{"a", 2}, {"b", 3}});
  ExampleLedger ledger =
      build_tp_examples(d, testutil::truth_predictions(d), kRegistry,
                        NegativePolicy::corrupt_s(), 3);
  REQUIRE(ledger.positives.size() == 1);
  REQUIRE(ledger.negatives.empty());
}

TEST_CASE("negative ratio scales the ledger") {
  Dataset d = testutil::dataset_from_truth({{1, 2}, {3, 4}, {5, 6}, {7, 8}},
                                           {3, 7, 11, 15}, digits(),
                                           LabelAlphabet::numeric_range(0, 18));
  PredictionSet p = testutil::truth_predictions(d);

  auto count = [&](double ratio) {
    return build_tp_examples(d, p, kRegistry,
                             NegativePolicy::corrupt_s(ratio), 11)
        .negatives.size();
  };
  REQUIRE(count(0.0) == 0);
  REQUIRE(count(0.5) == 2);
  REQUIRE(count(1.0) == 4);
  REQUIRE(count(2.0) == 8);
}

TEST_CASE("negatives under corrupt-vs-op dodge the named operator") {
  Dataset d = testutil::dataset_from_truth({{2, 3}}, {5}, digits(),
                                           LabelAlphabet::numeric_range(0, 18));
  ExampleLedger ledger = build_tp_examples(
      d, testutil::truth_predictions(d), kRegistry,
      parse_negative_policy("corrupt-vs-op", 1.0, "sum"), 9);
  REQUIRE(ledger.negatives.size() == 1);
  REQUIRE(ledger.negatives[0].provenance == "corrupt-vs-op");
  REQUIRE(ledger.negatives[0].weak_label != num(5));
}

TEST_CASE("policy parsing accepts both spellings") {
  REQUIRE(parse_negative_policy("corrupt-s").kind ==
          NegativePolicy::Kind::corrupt_s);
  REQUIRE(parse_negative_policy("corrupt-vs-op", 1.0, "sum").kind ==
          NegativePolicy::Kind::corrupt_vs_op);
  REQUIRE_THROWS_AS(parse_negative_policy("swap-everything"), Error);
}

TEST_CASE("positives and negatives never share a (bag, label) pair") {
  std::mt19937_64 rng(404);
  for (int round = 0; round < 50; ++round) {
    int n = 1 + static_cast<int>(rng() % 6);
    std::vector<std::vector<long long>> tuples;
    std::vector<long long> weak;
    for (int b = 0; b < n; ++b) {
      long long x = static_cast<long long>(rng() % 10);
      long long y = static_cast<long long>(rng() % 10);
      tuples.push_back({x, y});
      weak.push_back(static_cast<long long>(rng() % 19));
    }
    Dataset d = testutil::dataset_from_truth(
        tuples, weak, digits(), LabelAlphabet::numeric_range(0, 18));
    ExampleLedger ledger =
        build_tp_examples(d, testutil::truth_predictions(d), kRegistry,
                          NegativePolicy::corrupt_s(2.0), rng());
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : ledger.positives)
      seen.insert({e.bag_id, e.weak_label.text()});
    for (const auto& e : ledger.negatives)
      REQUIRE_FALSE(seen.count({e.bag_id, e.weak_label.text()}));
  }
}

TEST_CASE("ledger construction is deterministic in the seed") {
  Dataset d = addition_pairs();
  PredictionSet p = testutil::truth_predictions(d);
  auto a = ledger_to_json(
      build_tp_examples(d, p, kRegistry, NegativePolicy::corrupt_s(), 42));
  auto b = ledger_to_json(
      build_tp_examples(d, p, kRegistry, NegativePolicy::corrupt_s(), 42));
  REQUIRE(a == b);
}

TEST_CASE("missing predictions surface as coverage gaps") {
  Dataset d = addition_pairs();
  PredictionSet partial;
  partial.set(ref("x1"), num(10));
  try {
    build_tp_examples(d, partial, kRegistry, NegativePolicy::corrupt_s(), 1);
    FAIL("expected a coverage-gap error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::coverage_gap);
  }
}

TEST_CASE("classifier examples split on evaluation and ground truth") {
  const TransitionOp product = make_product_op();
  LabelAlphabet weak = LabelAlphabet::numeric_range(0, 81);

  SECTION("correct predictions are positives") {
    Dataset d = testutil::dataset_from_ids(
        {{{"i4", "i2"}, 8}, {{"i9", "i7"}, 63}}, digits(), weak,
        {{"i4", 4}, {"i2", 2}, {"i9", 9}, {"i7", 7}});
    ExampleLedger ledger =
        build_cp_examples(d, product, testutil::truth_predictions(d));
    REQUIRE(ledger.target == Target::CP);
    REQUIRE(ledger.positives.size() == 2);
    REQUIRE(ledger.negatives.empty());
    REQUIRE(ledger.positives[0].provenance == "consistent");
  }

  SECTION("a truth mismatch names the first offending instance") {
    Dataset d = testutil::dataset_from_ids({{{"i4", "i2"}, 8}}, digits(), weak,
                                           {{"i4", 4}, {"i2", 2}});
    PredictionSet p;
    p.set(ref("i4"), num(5));
    p.set(ref("i2"), num(2));
    ExampleLedger ledger = build_cp_examples(d, product, p);
    REQUIRE(ledger.positives.empty());
    REQUIRE(ledger.negatives.size() == 1);
    REQUIRE(ledger.negatives[0].provenance == "witness:i4");
  }

  SECTION("compensating errors still violate the ground truth") {
    // 1 * 8 = 8 matches the weak label, but both predictions are wrong.
    Dataset d = testutil::dataset_from_ids({{{"i4", "i2"}, 8}}, digits(), weak,
                                           {{"i4", 4}, {"i2", 2}});
    PredictionSet p;
    p.set(ref("i4"), num(1));
    p.set(ref("i2"), num(8));
    ExampleLedger ledger = build_cp_examples(d, product, p);
    REQUIRE(ledger.negatives.size() == 1);
    REQUIRE(ledger.negatives[0].provenance == "witness:i4");
  }

  SECTION("without ground truth an evaluation miss is the only signal") {
    Dataset d = testutil::dataset_from_ids({{{"i4", "i2"}, 8}}, digits(), weak);
    PredictionSet p;
    p.set(ref("i4"), num(5));
    p.set(ref("i2"), num(2));
    ExampleLedger ledger = build_cp_examples(d, product, p);
    REQUIRE(ledger.negatives.size() == 1);
    REQUIRE(ledger.negatives[0].provenance == "eval-mismatch");
  }

  SECTION("wrong bag size for the operator is an error") {
    Dataset d = testutil::dataset_from_ids({{{"i4", "i2"}, 1}}, digits(),
                                           LabelAlphabet::numeric_range(0, 1));
    PredictionSet p;
    p.set(ref("i4"), num(1));
    p.set(ref("i2"), num(1));
    REQUIRE_THROWS_AS(build_cp_examples(d, make_boolc_op(), p), Error);
  }
}

TEST_CASE("ledger serialization keeps tuples and provenance") {
  Dataset d = addition_pairs();
  ExampleLedger ledger =
      build_tp_examples(d, testutil::truth_predictions(d), kRegistry,
                        NegativePolicy::corrupt_s(), 5);
  nlohmann::json j = ledger_to_json(ledger);
  REQUIRE(j["target"] == "TP");
  REQUIRE(j["positives"].size() == 2);
  REQUIRE(j["positives"][0]["bag"] == "b1");
  REQUIRE(j["positives"][0]["tuple"] ==
          nlohmann::json::array({"10", "11"}));
  REQUIRE(j["negatives"].size() == 2);
  REQUIRE(j["negatives"][0]["provenance"] == "corrupt-s");
}
