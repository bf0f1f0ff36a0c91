#pragma once
// Seeded synthetic data: digit bags under a chosen operator, noisy classifier
// predictions, and fragmentary scenes. Everything is a pure function of its
// parameters plus the seed; generation streams are sequential mt19937_64.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "baglogic/core.hpp"
#include "baglogic/operators.hpp"
#include "baglogic/scene.hpp"

namespace baglogic {

struct NoiseModel {
  enum class Policy { uniform, adjacent };

  double rate = 0.0;  // per-instance corruption probability
  Policy policy = Policy::uniform;
  std::uint64_t seed = 0;

  static NoiseModel uniform(double rate, std::uint64_t seed) {
    return NoiseModel{rate, Policy::uniform, seed};
  }
  static NoiseModel adjacent(double rate, std::uint64_t seed) {
    return NoiseModel{rate, Policy::adjacent, seed};
  }
};

inline NoiseModel::Policy parse_noise_policy(const std::string& name) {
  if (name == "uniform" || name == "uniform-substitution")
    return NoiseModel::Policy::uniform;
  if (name == "adjacent" || name == "adjacent-substitution")
    return NoiseModel::Policy::adjacent;
  throw Error(ErrorKind::invalid_argument, "unknown noise policy '" + name + "'");
}

// n_bags bags of m instances with uniform ground-truth labels; the weak label
// is the operator applied to the truth tuple, and the weak alphabet is the
// operator's image over Y^m. reuse_prob is the chance a position samples an
// already-created instance instead of a fresh one (what gives abduction its
// cross-bag constraints).
inline Dataset gen_digit_dataset(const TransitionOp& op, int n_bags, int m,
                                 const LabelAlphabet& alphabet,
                                 std::uint64_t seed, double reuse_prob = 0.0,
                                 long long budget = kDefaultEnumerationBudget) {
  if (!op.arity().accepts(static_cast<std::size_t>(m)))
    throw Error(ErrorKind::arity_mismatch,
                "operator '" + op.name() + "' does not accept bag size " +
                    std::to_string(m));
  if (n_bags < 0 || m < 1 || reuse_prob < 0.0 || reuse_prob > 1.0)
    throw Error(ErrorKind::invalid_argument, "bad generation parameters");
  if (alphabet.empty())
    throw Error(ErrorKind::invalid_alphabet, "empty instance alphabet");

  Dataset d;
  d.instance_alphabet = alphabet;
  d.weak_alphabet = image_alphabet(op, alphabet, m, budget);
  d.bag_size = m;
  d.ground_truth.emplace();

  std::mt19937_64 rng(detail::splitmix64(seed));
  std::uniform_int_distribution<std::size_t> pick_label(0, alphabet.size() - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::vector<InstanceRef> pool;
  long long next_id = 1;
  for (int b = 0; b < n_bags; ++b) {
    Bag bag;
    bag.bag_id = "b" + std::to_string(b + 1);
    std::vector<LabelSymbol> tuple;
    for (int pos = 0; pos < m; ++pos) {
      if (!pool.empty() && reuse_prob > 0.0 && coin(rng) < reuse_prob) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        bag.instances.push_back(pool[pick(rng)]);
      } else {
        InstanceRef inst{"x" + std::to_string(next_id++)};
        d.ground_truth->emplace(inst, alphabet.at(pick_label(rng)));
        pool.push_back(inst);
        bag.instances.push_back(std::move(inst));
      }
      tuple.push_back(d.ground_truth->at(bag.instances.back()));
    }
    bag.weak_label = eval_operator(op, tuple);
    d.bags.push_back(std::move(bag));
  }
  return d;
}

// Shared-mode predictions: each instance keeps its truth label with
// probability 1-rate, otherwise the label is substituted. Uniform policy
// draws from Y minus the truth; adjacent picks an alphabet neighbor by value
// (falling back to uniform when the label has none).
inline PredictionSet gen_noisy_predictions(const Dataset& d,
                                           const NoiseModel& noise) {
  if (!d.ground_truth)
    throw Error(ErrorKind::missing_ground_truth,
                "noisy predictions need ground-truth labels");
  if (noise.rate < 0.0 || noise.rate > 1.0)
    throw Error(ErrorKind::invalid_argument, "noise rate outside [0,1]");

  PredictionSet p;
  p.mode = PredictionMode::shared;
  std::mt19937_64 rng(detail::splitmix64(noise.seed ^ 0x6e6f697365ULL));
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const auto& alphabet = d.instance_alphabet;
  auto substitute = [&](const LabelSymbol& truth) -> LabelSymbol {
    if (noise.policy == NoiseModel::Policy::adjacent && truth.numeric()) {
      std::vector<LabelSymbol> neighbors;
      for (long long delta : {-1LL, 1LL}) {
        auto idx =
            alphabet.index_of(std::to_string(*truth.numeric_value() + delta));
        if (idx) neighbors.push_back(alphabet.at(*idx));
      }
      if (!neighbors.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, neighbors.size() - 1);
        return neighbors[pick(rng)];
      }
    }
    if (alphabet.size() < 2) return truth;  // nothing to substitute with
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 2);
    std::size_t j = pick(rng);
    std::size_t truth_idx = *alphabet.index_of(truth.text());
    return alphabet.at(j < truth_idx ? j : j + 1);
  };

  for (const auto& inst : referenced_instances(d)) {
    const LabelSymbol& truth = d.ground_truth->at(inst);
    bool corrupt = noise.rate > 0.0 && coin(rng) < noise.rate;
    p.set(inst, corrupt ? substitute(truth) : truth);
  }
  return p;
}

// Fragmentary views of a relation graph: each fragment sees every object
// independently with probability `visibility` and inherits the graph hints
// whose arguments are both visible. distractor_rate adds, per fragment, one
// spurious hint over a random pair — hints without detection backing, the
// pattern scene validation exists to flag.
inline SceneData gen_scene_dataset(const std::vector<RelationAtom>& graph,
                                   const LabelAlphabet& objects,
                                   const LabelAlphabet& relations,
                                   int n_fragments, double visibility,
                                   std::uint64_t seed,
                                   double distractor_rate = 0.0) {
  if (visibility <= 0.0 || visibility > 1.0)
    throw Error(ErrorKind::invalid_argument, "visibility outside (0,1]");
  if (n_fragments < 0 || distractor_rate < 0.0 || distractor_rate > 1.0)
    throw Error(ErrorKind::invalid_argument, "bad scene parameters");
  for (const auto& atom : graph) {
    if (!relations.contains(atom.relation))
      throw Error(ErrorKind::unknown_relation,
                  "relation '" + atom.relation + "' not in relation alphabet");
    if (!objects.contains(atom.arg_a) || !objects.contains(atom.arg_b))
      throw Error(ErrorKind::unknown_symbol,
                  "graph atom '" + atom.text() + "' uses an unknown object");
  }

  SceneData scene;
  scene.objects = objects;
  scene.relations = relations;
  std::mt19937_64 rng(detail::splitmix64(seed ^ 0x7363656e65ULL));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_obj(0, objects.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_rel(
      0, relations.empty() ? 0 : relations.size() - 1);

  for (int k = 0; k < n_fragments; ++k) {
    SceneFragment frag;
    frag.fragment_id = "ig" + std::to_string(k + 1);
    for (const auto& obj : objects)
      if (coin(rng) < visibility) frag.detected.insert(obj.text());
    for (const auto& atom : graph)
      if (frag.detected.count(atom.arg_a) && frag.detected.count(atom.arg_b))
        frag.hints.push_back(atom);
    if (!relations.empty() && distractor_rate > 0.0 &&
        coin(rng) < distractor_rate) {
      for (int attempt = 0; attempt < 3; ++attempt) {
        RelationAtom atom{relations.at(pick_rel(rng)).text(),
                          objects.at(pick_obj(rng)).text(),
                          objects.at(pick_obj(rng)).text()};
        bool in_graph =
            std::find(graph.begin(), graph.end(), atom) != graph.end();
        bool already =
            std::find(frag.hints.begin(), frag.hints.end(), atom) !=
            frag.hints.end();
        if (!in_graph && !already) {
          frag.hints.push_back(std::move(atom));
          break;
        }
      }
    }
    scene.fragments.push_back(std::move(frag));
  }
  return scene;
}

}  // namespace baglogic
