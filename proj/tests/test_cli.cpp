#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

#include <filesystem>
#include <string>

using namespace baglogic;
using testutil::fixture;
using testutil::run_cli;
using testutil::slurp;

namespace fs = std::filesystem;

TEST_CASE("gen writes a fact file plus a checksummed manifest") {
  auto dir = testutil::temp_dir();
  auto facts = (dir / "sum.facts").string();
  auto r = run_cli("gen --op sum --bags 4 --seed 7 --out " + facts);
  REQUIRE(r.exit_code == 0);
  REQUIRE(fs::exists(facts));
  REQUIRE(fs::exists(facts + ".manifest.json"));

  nlohmann::json manifest = nlohmann::json::parse(r.out);
  REQUIRE(manifest["command"] == "gen");
  REQUIRE(manifest["params"]["op"] == "sum");
  REQUIRE(manifest["params"]["seed"] == 7);
  REQUIRE(manifest["files"].contains(facts));
  REQUIRE(manifest == nlohmann::json::parse(slurp(facts + ".manifest.json")));

  // The file itself parses and validates.
  Dataset d = make_dataset(load_fact_file(facts));
  REQUIRE(d.bags.size() == 4);
  REQUIRE(validate_dataset(d).ok());
}

TEST_CASE("gen resolves the seed from config unless a flag overrides it") {
  auto dir = testutil::temp_dir();
  auto cfg = dir / "run.json";
  testutil::spit(cfg, R"({"seed": 5})");

  auto from_cfg = run_cli("gen --op sum --bags 2 --config " + cfg.string() +
                          " --out " + (dir / "a.facts").string());
  REQUIRE(from_cfg.exit_code == 0);
  REQUIRE(nlohmann::json::parse(from_cfg.out)["params"]["seed"] == 5);

  auto flagged = run_cli("gen --op sum --bags 2 --config " + cfg.string() +
                         " --seed 9 --out " + (dir / "b.facts").string());
  REQUIRE(flagged.exit_code == 0);
  REQUIRE(nlohmann::json::parse(flagged.out)["params"]["seed"] == 9);
}

TEST_CASE("gen exit codes distinguish config from io troubles") {
  auto dir = testutil::temp_dir();

  // boolC takes exactly three instances per bag.
  auto bad_arity = run_cli("gen --op boolC --m 2 --out " +
                           (dir / "x.facts").string());
  REQUIRE(bad_arity.exit_code == 2);

  auto no_op = run_cli("gen --out " + (dir / "y.facts").string());
  REQUIRE(no_op.exit_code == 2);

  auto unknown_op = run_cli("gen --op median --out " +
                            (dir / "z.facts").string());
  REQUIRE(unknown_op.exit_code == 2);

  auto empty_cfg = run_cli("gen --op sum --config /dev/null --out " +
                           (dir / "w.facts").string());
  REQUIRE(empty_cfg.exit_code == 2);  // an empty file is not a JSON object

  auto bad_dir = run_cli("gen --op sum --out /nonexistent/dir/a.facts");
  REQUIRE(bad_dir.exit_code == 3);

  testutil::spit(dir / "bogus.json", R"({"sede": 1})");
  auto typo = run_cli("gen --op sum --config " + (dir / "bogus.json").string() +
                      " --out " + (dir / "v.facts").string());
  REQUIRE(typo.exit_code == 2);
  REQUIRE(typo.err.find("sede") != std::string::npos);
}

TEST_CASE("infer-tp recovers the operator behind the worked examples") {
  struct Case {
    const char* file;
    const char* winner;
  } cases[] = {{"addition.facts", "sum"},
               {"times.facts", "product"},
               {"xor.facts", "xor"},
               {"boolc.facts", "boolC"}};
  for (const auto& c : cases) {
    auto r = run_cli("infer-tp --data " + fixture(c.file) + " --seed 3");
    INFO(c.file << ": " << r.err);
    REQUIRE(r.exit_code == 0);
    nlohmann::json v = nlohmann::json::parse(r.out);
    REQUIRE(v["unique"] == true);
    REQUIRE(v["winners"] == nlohmann::json::array({c.winner}));
  }
}

TEST_CASE("infer-tp reports ties with exit code 4") {
  auto r = run_cli("infer-tp --data " + fixture("ambiguous.facts"));
  REQUIRE(r.exit_code == 4);
  nlohmann::json v = nlohmann::json::parse(r.out);
  REQUIRE(v["unique"] == false);
  REQUIRE(v["winners"] == nlohmann::json::array({"sum", "xor"}));
}

TEST_CASE("infer-tp reports an empty podium with exit code 5") {
  auto r = run_cli("infer-tp --data " + fixture("cp-plus-bad.facts"));
  REQUIRE(r.exit_code == 5);
  nlohmann::json v = nlohmann::json::parse(r.out);
  REQUIRE(v["winners"].empty());
  REQUIRE_FALSE(v["diagnostic"].get<std::string>().empty());
}

TEST_CASE("infer-tp relaxes with --tolerance") {
  // At tolerance 0 every operator passes, so the best scorer wins alone.
  auto r = run_cli("infer-tp --data " + fixture("cp-plus-bad.facts") +
                   " --tolerance 0");
  REQUIRE((r.exit_code == 0 || r.exit_code == 4));
}

TEST_CASE("missing data files exit with the io code") {
  auto r = run_cli("infer-tp --data /nonexistent/never.facts");
  REQUIRE(r.exit_code == 3);
  auto r2 = run_cli("abduce --data /nonexistent/never.facts --op sum");
  REQUIRE(r2.exit_code == 3);
}

TEST_CASE("malformed fact files exit with the io code and a line number") {
  auto dir = testutil::temp_dir();
  testutil::spit(dir / "broken.facts",
                 "alphabet instance 0..9\nbag(b1, [i1], 3)\n");
  auto r = run_cli("infer-tp --data " + (dir / "broken.facts").string());
  REQUIRE(r.exit_code == 3);
  REQUIRE(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("abduce narrows a shared instance across bags") {
  auto r = run_cli("abduce --data " + fixture("chained.facts") + " --op plus");
  REQUIRE(r.exit_code == 0);
  nlohmann::json m = nlohmann::json::parse(r.out);
  REQUIRE(m["candidates"]["iC"] ==
          nlohmann::json::array({"3", "4", "5", "6", "7"}));
  REQUIRE(m["candidates"]["iD"].size() == 8);  // 0..7 from the 7-bag alone
  REQUIRE(m["contradictions"].empty());

  // The joint oracle tightens iD using the other bag's constraint on iC.
  auto oracle = run_cli("abduce --data " + fixture("chained.facts") +
                        " --op plus --oracle");
  REQUIRE(oracle.exit_code == 0);
  nlohmann::json om = nlohmann::json::parse(oracle.out);
  REQUIRE(om["candidates"]["iC"] == m["candidates"]["iC"]);
  REQUIRE(om["candidates"]["iD"] ==
          nlohmann::json::array({"0", "1", "2", "3", "4"}));
  REQUIRE(om["candidates"]["iE"] ==
          nlohmann::json::array({"5", "6", "7", "8", "9"}));
}

TEST_CASE("abduce writes an optional CSV summary") {
  auto dir = testutil::temp_dir();
  auto csv = (dir / "cands.csv").string();
  auto r = run_cli("abduce --data " + fixture("cp-times.facts") +
                   " --op times --csv " + csv);
  REQUIRE(r.exit_code == 0);
  std::string content = slurp(csv);
  REQUIRE(content.find("instance,candidates,truth_in_set") !=
          std::string::npos);
  REQUIRE(content.find("i9,2,1") != std::string::npos);
}

TEST_CASE("validate accepts consistent classifier outputs") {
  auto r = run_cli("validate --data " + fixture("cp-times.facts") +
                   " --op times");
  REQUIRE(r.exit_code == 0);
  nlohmann::json report = nlohmann::json::parse(r.out);
  REQUIRE(report["violations"].empty());
  REQUIRE(report["consistent"].size() == 2);
  REQUIRE(report["item_accuracy"] == 1.0);
}

TEST_CASE("validate pins violations to a witness position") {
  auto bad_first = run_cli("validate --data " + fixture("cp-times-bad.facts") +
                           " --op times");
  REQUIRE(bad_first.exit_code == 0);  // violations are the output, not an error
  nlohmann::json r1 = nlohmann::json::parse(bad_first.out);
  REQUIRE(r1["violations"].size() == 1);
  REQUIRE(r1["violations"][0]["witness"] == "i4");
  REQUIRE(r1["violations"][0]["position"] == 1);

  auto bad_second = run_cli("validate --data " + fixture("cp-plus-bad.facts") +
                            " --op plus");
  nlohmann::json r2 = nlohmann::json::parse(bad_second.out);
  REQUIRE(r2["violations"].size() == 1);
  REQUIRE(r2["violations"][0]["witness"] == "i3");
  REQUIRE(r2["violations"][0]["position"] == 2);
}

TEST_CASE("validate requires an operator in digit mode") {
  auto r = run_cli("validate --data " + fixture("cp-times.facts"));
  REQUIRE(r.exit_code == 2);
}

TEST_CASE("scene validation flags only the fragment missing its table") {
  auto r = run_cli("validate --data " + fixture("scene-table.facts") +
                   " --scene");
  REQUIRE(r.exit_code == 0);
  nlohmann::json report = nlohmann::json::parse(r.out);
  REQUIRE(report["violations"].size() == 1);
  REQUIRE(report["violations"][0]["bag"] == "ig3:onTop(lamp,table)");
  REQUIRE(report["violations"][0]["witness"] == "table");
  REQUIRE(report["consistent"].size() == 3);

  // Restricting the accepted atoms narrows what gets checked.
  auto partial = run_cli("validate --data " + fixture("scene-table.facts") +
                         " --scene --accept 'onTop(vase,table)'");
  nlohmann::json p = nlohmann::json::parse(partial.out);
  REQUIRE(p["violations"].empty());
  REQUIRE(p["consistent"].size() == 2);
}

TEST_CASE("scene inference over the demo data accepts the supported atoms") {
  auto demo = run_cli("scene --demo");
  REQUIRE(demo.exit_code == 0);
  nlohmann::json j = nlohmann::json::parse(demo.out);
  REQUIRE(j["pairs"].size() == 3);
  REQUIRE(j["ledger"]["positives"].size() == 3);
  REQUIRE(j["ledger"]["negatives"].size() == 1);

  auto from_file = run_cli("scene --data " + fixture("scene-table.facts"));
  REQUIRE(from_file.exit_code == 0);
  REQUIRE(nlohmann::json::parse(from_file.out) == j);
}

TEST_CASE("eval writes rows and summaries to the chosen base path") {
  auto dir = testutil::temp_dir();
  auto base = (dir / "exp").string();
  auto r = run_cli(
      "eval --scenario tp --ops sum --bags 6 --seeds 1..3 --out " + base);
  REQUIRE(r.exit_code == 0);
  REQUIRE(fs::exists(base + ".csv"));
  REQUIRE(fs::exists(base + ".summary.json"));

  std::string csv = slurp(base + ".csv");
  REQUIRE(csv.rfind("op,n,rho,tau,reuse,seed,", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows

  nlohmann::json summary = nlohmann::json::parse(slurp(base + ".summary.json"));
  REQUIRE(nlohmann::json::parse(r.out) == summary);

  auto bad = run_cli("eval --scenario tp --ops sum --seeds 3,3 --out " + base);
  REQUIRE(bad.exit_code == 2);
}

TEST_CASE("unknown flags and subcommands fail fast") {
  auto r = run_cli("infer-tp --data x --frobnicate");
  REQUIRE(r.exit_code == 2);
  auto r2 = run_cli("transmogrify");
  REQUIRE(r2.exit_code == 2);
  auto r3 = run_cli("");
  REQUIRE(r3.exit_code == 2);  // a subcommand is required
}

TEST_CASE("repeated runs are byte-identical") {
  auto dir1 = testutil::temp_dir();
  auto dir2 = testutil::temp_dir();
  auto args = [](const fs::path& dir) {
    return "gen --op xor --bags 12 --seed 21 --noise 0.2 --out " +
           (dir / "n.facts").string();
  };
  auto a = run_cli(args(dir1));
  auto b = run_cli(args(dir2));
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  REQUIRE(slurp(dir1 / "n.facts") == slurp(dir2 / "n.facts"));

  auto infer1 = run_cli("infer-tp --data " + (dir1 / "n.facts").string() +
                        " --tolerance 0.5 --seed 4");
  auto infer2 = run_cli("infer-tp --data " + (dir2 / "n.facts").string() +
                        " --tolerance 0.5 --seed 4");
  REQUIRE(infer1.out == infer2.out);
  REQUIRE(infer1.exit_code == infer2.exit_code);
}
