#pragma once
// Transition operators: the candidate aggregation maps from instance-label
// tuples to a weak label, plus preimage enumeration over finite alphabets.
// The registry's ordered operator list is the background knowledge available
// to hypothesis search.

#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "baglogic/core.hpp"

namespace baglogic {

struct Arity {
  bool variadic = false;  // variadic means any length >= 1
  int n = 0;

  static Arity any() { return Arity{true, 0}; }
  static Arity fixed(int n) { return Arity{false, n}; }

  bool accepts(std::size_t m) const {
    return variadic ? m >= 1 : static_cast<int>(m) == n;
  }
  std::string describe() const {
    return variadic ? "variadic" : std::to_string(n);
  }
};

constexpr long long kDefaultEnumerationBudget = 10'000'000;

// A named total function from label tuples to a single label. Numeric ops
// compute on the labels' integer values; table ops look tuples up verbatim.
class TransitionOp {
 public:
  using NumericFn = std::function<long long(std::span<const long long>)>;

  static TransitionOp numeric(std::string name, std::string symbol,
                              Arity arity, NumericFn fn) {
    TransitionOp op;
    op.name_ = std::move(name);
    op.symbol_ = std::move(symbol);
    op.arity_ = arity;
    op.numeric_fn_ = std::move(fn);
    return op;
  }

  static TransitionOp table(
      std::string name, int arity,
      std::vector<std::pair<std::vector<LabelSymbol>, LabelSymbol>> rows) {
    TransitionOp op;
    op.name_ = std::move(name);
    op.symbol_ = op.name_;
    op.arity_ = Arity::fixed(arity);
    auto tbl = std::make_shared<Table>();
    for (auto& [in, out] : rows) {
      if (static_cast<int>(in.size()) != arity)
        throw Error(ErrorKind::arity_mismatch,
                    "table row arity != " + std::to_string(arity));
      std::vector<std::string> key;
      key.reserve(in.size());
      for (const auto& s : in) key.push_back(s.text());
      auto [it, fresh] = tbl->emplace(std::move(key), std::move(out));
      if (!fresh)
        throw Error(ErrorKind::invalid_argument,
                    "duplicate table row in operator '" + op.name_ + "'");
    }
    op.table_ = std::move(tbl);
    return op;
  }

  const std::string& name() const { return name_; }
  const std::string& symbol() const { return symbol_; }
  Arity arity() const { return arity_; }
  bool is_numeric() const { return static_cast<bool>(numeric_fn_); }

  LabelSymbol eval(std::span<const LabelSymbol> labels) const {
    if (!arity_.accepts(labels.size()))
      throw Error(ErrorKind::arity_mismatch,
                  "operator '" + name_ + "' (arity " + arity_.describe() +
                      ") applied to " + std::to_string(labels.size()) +
                      " labels");
    if (numeric_fn_) {
      std::vector<long long> vals;
      vals.reserve(labels.size());
      for (const auto& s : labels) {
        auto v = s.numeric_value();
        if (!v)
          throw Error(ErrorKind::non_numeric_label,
                      "operator '" + name_ + "' needs numeric labels, got '" +
                          s.text() + "'");
        vals.push_back(*v);
      }
      return LabelSymbol::from_number(numeric_fn_(vals));
    }
    std::vector<std::string> key;
    key.reserve(labels.size());
    for (const auto& s : labels) key.push_back(s.text());
    auto it = table_->find(key);
    if (it == table_->end()) {
      std::string tup;
      for (const auto& s : labels) tup += (tup.empty() ? "" : ",") + s.text();
      throw Error(ErrorKind::table_incomplete,
                  "operator '" + name_ + "' has no entry for (" + tup + ")");
    }
    return it->second;
  }

 private:
  using Table = std::map<std::vector<std::string>, LabelSymbol>;

  std::string name_;
  std::string symbol_;
  Arity arity_;
  NumericFn numeric_fn_;
  std::shared_ptr<const Table> table_;
};

inline LabelSymbol eval_operator(const TransitionOp& op,
                                 std::span<const LabelSymbol> labels) {
  return op.eval(labels);
}

inline LabelSymbol eval_operator(const TransitionOp& op,
                                 const std::vector<LabelSymbol>& labels) {
  return op.eval(std::span<const LabelSymbol>(labels));
}

namespace detail {

// Walks all m-tuples over [0, base) in lexicographic order.
// Returns false once every tuple has been visited.
inline bool next_index_tuple(std::vector<std::size_t>& idx, std::size_t base) {
  for (std::size_t i = idx.size(); i-- > 0;) {
    if (++idx[i] < base) return true;
    idx[i] = 0;
  }
  return false;
}

inline void check_enumeration_budget(std::size_t alphabet_size, int m,
                                     long long budget) {
  long double tuples = std::pow(static_cast<long double>(alphabet_size), m);
  if (tuples > static_cast<long double>(budget))
    throw Error(ErrorKind::budget_exceeded,
                "enumeration of " + std::to_string(alphabet_size) + "^" +
                    std::to_string(m) + " tuples exceeds budget " +
                    std::to_string(budget));
}

}  // namespace detail

// Exactly the tuples in Y^m that the operator maps to s, in lexicographic
// order by alphabet position.
inline std::vector<std::vector<LabelSymbol>> preimage(
    const TransitionOp& op, const LabelSymbol& s, const LabelAlphabet& alphabet,
    int m, long long budget = kDefaultEnumerationBudget) {
  if (!op.arity().accepts(static_cast<std::size_t>(m)))
    throw Error(ErrorKind::arity_mismatch,
                "operator '" + op.name() + "' does not accept arity " +
                    std::to_string(m));
  detail::check_enumeration_budget(alphabet.size(), m, budget);

  std::vector<std::vector<LabelSymbol>> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  std::vector<LabelSymbol> tuple(static_cast<std::size_t>(m));
  do {
    for (std::size_t i = 0; i < idx.size(); ++i) tuple[i] = alphabet.at(idx[i]);
    if (op.eval(tuple) == s) out.push_back(tuple);
  } while (detail::next_index_tuple(idx, alphabet.size()));
  return out;
}

// The operator's image over Y^m, i.e. the weak-label alphabet it induces.
inline LabelAlphabet image_alphabet(const TransitionOp& op,
                                    const LabelAlphabet& alphabet, int m,
                                    long long budget = kDefaultEnumerationBudget) {
  if (!op.arity().accepts(static_cast<std::size_t>(m)))
    throw Error(ErrorKind::arity_mismatch,
                "operator '" + op.name() + "' does not accept arity " +
                    std::to_string(m));
  detail::check_enumeration_budget(alphabet.size(), m, budget);

  std::set<LabelSymbol> outputs;
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  std::vector<LabelSymbol> tuple(static_cast<std::size_t>(m));
  do {
    for (std::size_t i = 0; i < idx.size(); ++i) tuple[i] = alphabet.at(idx[i]);
    outputs.insert(op.eval(tuple));
  } while (detail::next_index_tuple(idx, alphabet.size()));

  std::vector<std::string> texts;
  texts.reserve(outputs.size());
  for (const auto& s : outputs) texts.push_back(s.text());
  return LabelAlphabet::from_texts(std::move(texts));
}

inline TransitionOp make_sum_op() {
  return TransitionOp::numeric("sum", "+", Arity::any(),
                               [](std::span<const long long> v) {
                                 long long acc = 0;
                                 for (long long x : v) acc += x;
                                 return acc;
                               });
}

inline TransitionOp make_product_op() {
  return TransitionOp::numeric("product", "\xc3\x97", Arity::any(),
                               [](std::span<const long long> v) {
                                 long long acc = 1;
                                 for (long long x : v) acc *= x;
                                 return acc;
                               });
}

inline TransitionOp make_xor_op() {
  return TransitionOp::numeric("xor", "\xe2\x8a\x95", Arity::any(),
                               [](std::span<const long long> v) {
                                 long long acc = 0;
                                 for (long long x : v) acc ^= x;
                                 return acc;
                               });
}

// Three-place boolean combination (x,y,z) -> (x AND y) OR (x AND z), each
// label read through its least-significant bit. Not permutation-invariant.
inline TransitionOp make_boolc_op() {
  return TransitionOp::numeric("boolC", "C", Arity::fixed(3),
                               [](std::span<const long long> v) -> long long {
                                 bool x = v[0] & 1, y = v[1] & 1, z = v[2] & 1;
                                 return ((x && y) || (x && z)) ? 1 : 0;
                               });
}

// Ordered operator list; order is stable and used for tie reporting.
class OperatorRegistry {
 public:
  OperatorRegistry() = default;

  static OperatorRegistry builtins() {
    OperatorRegistry reg;
    reg.ops_ = {make_sum_op(), make_product_op(), make_xor_op(),
                make_boolc_op()};
    return reg;
  }

  const std::vector<TransitionOp>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }

  const TransitionOp* find(std::string_view name_or_alias) const {
    std::string canonical = canonical_name(name_or_alias);
    for (const auto& op : ops_)
      if (op.name() == canonical) return &op;
    return nullptr;
  }

  const TransitionOp& require(std::string_view name_or_alias) const {
    const TransitionOp* op = find(name_or_alias);
    if (!op)
      throw Error(ErrorKind::unknown_operator,
                  "unknown operator '" + std::string(name_or_alias) + "'");
    return *op;
  }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < ops_.size(); ++i)
      if (ops_[i].name() == name) return i;
    return std::nullopt;
  }

  // Value-style registration: returns a new registry with op appended.
  OperatorRegistry with(TransitionOp op) const {
    if (find(op.name()))
      throw Error(ErrorKind::duplicate_name,
                  "operator '" + op.name() + "' already registered");
    OperatorRegistry next = *this;
    next.ops_.push_back(std::move(op));
    return next;
  }

  // Accepted spellings for the built-in operators.
  static std::string canonical_name(std::string_view name) {
    static const std::map<std::string, std::string, std::less<>> aliases = {
        {"sum", "sum"},         {"plus", "sum"},
        {"add", "sum"},         {"+", "sum"},
        {"product", "product"}, {"times", "product"},
        {"mul", "product"},     {"*", "product"},
        {"\xc3\x97", "product"},
        {"xor", "xor"},         {"^", "xor"},
        {"\xe2\x8a\x95", "xor"},
        {"boolC", "boolC"},     {"boolc", "boolC"},
        {"C", "boolC"},
    };
    auto it = aliases.find(name);
    return it == aliases.end() ? std::string(name) : it->second;
  }

 private:
  std::vector<TransitionOp> ops_;
};

inline OperatorRegistry register_operator(const OperatorRegistry& reg,
                                          TransitionOp op) {
  return reg.with(std::move(op));
}

}  // namespace baglogic
