#pragma once

#include <baglogic/baglogic.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace testutil {

using namespace baglogic;

inline LabelAlphabet digits() { return LabelAlphabet::numeric_range(0, 9); }

inline LabelSymbol num(long long v) { return LabelSymbol::from_number(v); }

inline InstanceRef ref(std::string id) { return InstanceRef{std::move(id)}; }

// One bag per truth tuple with fresh instances x1, x2, ...; the weak label is
// supplied per bag so tests control consistency explicitly.
inline Dataset dataset_from_truth(
    const std::vector<std::vector<long long>>& truth_tuples,
    const std::vector<long long>& weak_labels, const LabelAlphabet& inst_alpha,
    const LabelAlphabet& weak_alpha) {
  Dataset d;
  d.instance_alphabet = inst_alpha;
  d.weak_alphabet = weak_alpha;
  d.bag_size = truth_tuples.empty() ? 0 : static_cast<int>(truth_tuples[0].size());
  d.ground_truth.emplace();
  int next = 0;
  for (std::size_t b = 0; b < truth_tuples.size(); ++b) {
    Bag bag;
    bag.bag_id = "b" + std::to_string(b + 1);
    bag.weak_label = num(weak_labels[b]);
    for (long long v : truth_tuples[b]) {
      InstanceRef inst{"x" + std::to_string(++next)};
      d.ground_truth->emplace(inst, num(v));
      bag.instances.push_back(std::move(inst));
    }
    d.bags.push_back(std::move(bag));
  }
  return d;
}

// Bags over a caller-controlled instance pool (ids repeat across bags).
inline Dataset dataset_from_ids(
    const std::vector<std::pair<std::vector<std::string>, long long>>& bags,
    const LabelAlphabet& inst_alpha, const LabelAlphabet& weak_alpha,
    const std::map<std::string, long long>& truth = {}) {
  Dataset d;
  d.instance_alphabet = inst_alpha;
  d.weak_alphabet = weak_alpha;
  d.bag_size = bags.empty() ? 0 : static_cast<int>(bags[0].first.size());
  if (!truth.empty()) {
    d.ground_truth.emplace();
    for (const auto& [id, v] : truth) d.ground_truth->emplace(ref(id), num(v));
  }
  for (std::size_t b = 0; b < bags.size(); ++b) {
    Bag bag;
    bag.bag_id = "b" + std::to_string(b + 1);
    bag.weak_label = num(bags[b].second);
    for (const auto& id : bags[b].first) bag.instances.push_back(ref(id));
    d.bags.push_back(std::move(bag));
  }
  return d;
}

inline PredictionSet truth_predictions(const Dataset& d) {
  PredictionSet p;
  for (const auto& [inst, label] : *d.ground_truth) p.set(inst, label);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

// Fresh scratch directory per call, cleaned up by the OS tmp reaper.
inline std::filesystem::path temp_dir() {
  static int counter = 0;
  auto p = std::filesystem::temp_directory_path() /
           ("baglogic_test_" + std::to_string(static_cast<long>(::getpid())) +
            "_" + std::to_string(++counter));
  std::filesystem::create_directories(p);
  return p;
}

#ifdef BAGLOGIC_CLI_PATH

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the installed binary with shell-quoted args; stdout/stderr captured.
inline CliResult run_cli(const std::string& args) {
  auto dir = temp_dir();
  auto out_path = dir / "stdout.txt";
  auto err_path = dir / "stderr.txt";
  std::string cmd = std::string("\"") + BAGLOGIC_CLI_PATH + "\" " + args +
                    " > \"" + out_path.string() + "\" 2> \"" +
                    err_path.string() + "\"";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

inline std::string fixture(const std::string& name) {
  return std::string(BAGLOGIC_FIXTURES_DIR) + "/" + name;
}

#endif  // BAGLOGIC_CLI_PATH

}  // namespace testutil
