#pragma once
// Core domain types: interned label symbols, alphabets, bags, datasets and
// classifier prediction sets. Everything here is immutable after construction
// and safe to share across concurrent readers.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace baglogic {

enum class ErrorKind {
  unknown_symbol,
  arity_mismatch,
  non_numeric_label,
  budget_exceeded,
  duplicate_name,
  coverage_gap,
  missing_ground_truth,
  unknown_relation,
  unknown_operator,
  table_incomplete,
  parse_error,
  invalid_alphabet,
  invalid_argument,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// An element of a label alphabet. Identity is the text; numeric_value is
// present exactly when the text is a plain non-negative integer.
class LabelSymbol {
 public:
  LabelSymbol() = default;

  static LabelSymbol from_text(std::string text) {
    LabelSymbol s;
    s.value_ = parse_numeric(text);
    s.text_ = std::move(text);
    return s;
  }

  static LabelSymbol from_number(long long v) {
    if (v < 0) throw Error(ErrorKind::invalid_argument, "negative label value");
    LabelSymbol s;
    s.text_ = std::to_string(v);
    s.value_ = v;
    return s;
  }

  const std::string& text() const { return text_; }
  std::optional<long long> numeric_value() const { return value_; }
  bool numeric() const { return value_.has_value(); }

  bool operator==(const LabelSymbol& o) const { return text_ == o.text_; }
  bool operator!=(const LabelSymbol& o) const { return !(*this == o); }
  // Numeric symbols sort by value, ahead of symbolic ones; deterministic.
  bool operator<(const LabelSymbol& o) const {
    if (value_.has_value() != o.value_.has_value())
      return value_.has_value();
    if (value_ && o.value_ && *value_ != *o.value_) return *value_ < *o.value_;
    return text_ < o.text_;
  }

 private:
  static std::optional<long long> parse_numeric(const std::string& t) {
    if (t.empty() || t.size() > 18) return std::nullopt;
    for (char c : t)
      if (c < '0' || c > '9') return std::nullopt;
    return std::stoll(t);
  }

  std::string text_;
  std::optional<long long> value_;
};

enum class AlphabetKind { numeric, symbolic };

// Ordered, duplicate-free set of symbols. Numeric alphabets are sorted
// ascending by value; symbolic alphabets keep their given order.
class LabelAlphabet {
 public:
  LabelAlphabet() : data_(std::make_shared<Data>()) {}

  static LabelAlphabet numeric_range(long long lo, long long hi) {
    if (lo < 0 || hi < lo)
      throw Error(ErrorKind::invalid_alphabet, "bad numeric range");
    std::vector<std::string> texts;
    texts.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long long v = lo; v <= hi; ++v) texts.push_back(std::to_string(v));
    return from_texts(std::move(texts));
  }

  static LabelAlphabet from_texts(std::vector<std::string> texts) {
    if (texts.empty())
      throw Error(ErrorKind::invalid_alphabet, "empty alphabet");
    auto data = std::make_shared<Data>();
    data->symbols.reserve(texts.size());
    bool all_numeric = true;
    for (auto& t : texts) {
      auto s = LabelSymbol::from_text(std::move(t));
      all_numeric = all_numeric && s.numeric();
      data->symbols.push_back(std::move(s));
    }
    data->kind = all_numeric ? AlphabetKind::numeric : AlphabetKind::symbolic;
    if (data->kind == AlphabetKind::numeric)
      std::sort(data->symbols.begin(), data->symbols.end());
    for (std::size_t i = 0; i < data->symbols.size(); ++i) {
      auto [it, fresh] = data->index.emplace(data->symbols[i].text(), i);
      if (!fresh)
        throw Error(ErrorKind::invalid_alphabet,
                    "duplicate alphabet symbol '" + data->symbols[i].text() + "'");
    }
    LabelAlphabet a;
    a.data_ = std::move(data);
    return a;
  }

  AlphabetKind kind() const { return data_->kind; }
  std::size_t size() const { return data_->symbols.size(); }
  bool empty() const { return data_->symbols.empty(); }
  const LabelSymbol& at(std::size_t i) const { return data_->symbols.at(i); }

  std::optional<std::size_t> index_of(std::string_view text) const {
    auto it = data_->index.find(std::string(text));
    if (it == data_->index.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view text) const {
    return index_of(text).has_value();
  }
  bool contains(const LabelSymbol& s) const { return contains(s.text()); }

  // Idempotent: equal text always yields the identical symbol.
  LabelSymbol intern(std::string_view text) const {
    auto idx = index_of(text);
    if (!idx)
      throw Error(ErrorKind::unknown_symbol,
                  "symbol '" + std::string(text) + "' not in alphabet");
    return data_->symbols[*idx];
  }

  const std::vector<LabelSymbol>& symbols() const { return data_->symbols; }
  auto begin() const { return data_->symbols.begin(); }
  auto end() const { return data_->symbols.end(); }

 private:
  struct Data {
    std::vector<LabelSymbol> symbols;
    std::unordered_map<std::string, std::size_t> index;
    AlphabetKind kind = AlphabetKind::symbolic;
  };
  std::shared_ptr<const Data> data_;
};

inline LabelSymbol intern(std::string_view text, const LabelAlphabet& alphabet) {
  return alphabet.intern(text);
}

// Named instance. Position-independent; the same id may recur across bags,
// which is what lets abduction intersect constraints between bags.
struct InstanceRef {
  std::string id;

  bool operator==(const InstanceRef& o) const { return id == o.id; }
  bool operator!=(const InstanceRef& o) const { return id != o.id; }
  bool operator<(const InstanceRef& o) const { return id < o.id; }
};

struct Bag {
  std::string bag_id;
  std::vector<InstanceRef> instances;
  LabelSymbol weak_label;
};

struct Dataset {
  std::vector<Bag> bags;
  LabelAlphabet instance_alphabet;
  LabelAlphabet weak_alphabet;
  int bag_size = 0;
  std::optional<std::map<InstanceRef, LabelSymbol>> ground_truth;

  bool has_ground_truth() const { return ground_truth.has_value(); }
};

// Distinct instances in first-appearance order (deterministic).
inline std::vector<InstanceRef> referenced_instances(const Dataset& d) {
  std::vector<InstanceRef> out;
  std::set<std::string> seen;
  for (const auto& bag : d.bags)
    for (const auto& inst : bag.instances)
      if (seen.insert(inst.id).second) out.push_back(inst);
  return out;
}

enum class PredictionMode { shared, positional };

// Classifier outputs. Shared mode: one prediction per instance. Positional
// mode: one per (instance, 1-based bag position).
struct PredictionSet {
  using Key = std::pair<InstanceRef, int>;  // position -1 in shared mode

  PredictionMode mode = PredictionMode::shared;
  std::map<Key, LabelSymbol> predictions;
  std::map<Key, double> confidence;

  static PredictionSet shared_from(std::map<InstanceRef, LabelSymbol> preds) {
    PredictionSet p;
    p.mode = PredictionMode::shared;
    for (auto& [inst, label] : preds)
      p.predictions.emplace(Key{inst, -1}, label);
    return p;
  }

  void set(const InstanceRef& inst, LabelSymbol label, int position = -1) {
    predictions[Key{inst, mode == PredictionMode::shared ? -1 : position}] =
        std::move(label);
  }

  const LabelSymbol* find(const InstanceRef& inst, int position = -1) const {
    auto it = predictions.find(
        Key{inst, mode == PredictionMode::shared ? -1 : position});
    return it == predictions.end() ? nullptr : &it->second;
  }

  // Predicted labels of a bag in bag order; throws coverage_gap on a miss.
  std::vector<LabelSymbol> tuple_for(const Bag& bag) const {
    std::vector<LabelSymbol> tuple;
    tuple.reserve(bag.instances.size());
    for (std::size_t pos = 0; pos < bag.instances.size(); ++pos) {
      const LabelSymbol* p =
          find(bag.instances[pos], static_cast<int>(pos) + 1);
      if (!p)
        throw Error(ErrorKind::coverage_gap,
                    "no prediction for instance '" + bag.instances[pos].id +
                        "' (bag '" + bag.bag_id + "')");
      tuple.push_back(*p);
    }
    return tuple;
  }

  bool covers(const Dataset& d) const {
    for (const auto& bag : d.bags)
      for (std::size_t pos = 0; pos < bag.instances.size(); ++pos)
        if (!find(bag.instances[pos], static_cast<int>(pos) + 1)) return false;
    return true;
  }
};

struct Violation {
  std::string kind;
  std::string detail;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Report-style check of the Dataset invariants; never throws.
inline ValidationResult validate_dataset(const Dataset& d) {
  ValidationResult r;
  for (const auto& bag : d.bags) {
    if (static_cast<int>(bag.instances.size()) != d.bag_size)
      r.violations.push_back(
          {"bag-size mismatch",
           "bag '" + bag.bag_id + "' has " +
               std::to_string(bag.instances.size()) + " instances, expected " +
               std::to_string(d.bag_size)});
    if (!d.weak_alphabet.contains(bag.weak_label))
      r.violations.push_back(
          {"alphabet violation", "weak label '" + bag.weak_label.text() +
                                     "' of bag '" + bag.bag_id +
                                     "' not in weak alphabet"});
  }
  if (d.ground_truth) {
    std::set<std::string> referenced;
    for (const auto& bag : d.bags)
      for (const auto& inst : bag.instances) referenced.insert(inst.id);
    for (const auto& [inst, label] : *d.ground_truth) {
      if (!referenced.count(inst.id))
        r.violations.push_back(
            {"dangling ground truth",
             "truth for unreferenced instance '" + inst.id + "'"});
      if (!d.instance_alphabet.contains(label))
        r.violations.push_back(
            {"alphabet violation", "truth label '" + label.text() +
                                       "' of instance '" + inst.id +
                                       "' not in instance alphabet"});
    }
    for (const auto& id : referenced)
      if (!d.ground_truth->count(InstanceRef{id}))
        r.violations.push_back(
            {"ground-truth gap", "no truth for instance '" + id + "'"});
  }
  return r;
}

}  // namespace baglogic

template <>
struct std::hash<baglogic::InstanceRef> {
  std::size_t operator()(const baglogic::InstanceRef& r) const {
    return std::hash<std::string>{}(r.id);
  }
};

template <>
struct std::hash<baglogic::LabelSymbol> {
  std::size_t operator()(const baglogic::LabelSymbol& s) const {
    return std::hash<std::string>{}(s.text());
  }
};
