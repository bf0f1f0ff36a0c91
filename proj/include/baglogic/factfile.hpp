#pragma once
// Line-oriented fact files: `%` comments, `alphabet` directives, and
// period-terminated facts (bag/cp/truth/fragment/detect/hint). Parsing keeps
// raw texts; make_dataset / make_predictions turn them into core types.
//
//   alphabet instance 0 1 2 3 4 5 6 7 8 9
//   alphabet weak 0..81
//   bag(b1, [i10, i11], 21).
//   cp(f, i10, 10).
//   truth(i10, 10).

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "baglogic/core.hpp"

namespace baglogic {

struct BagFact {
  std::string bag_id;
  std::vector<std::string> instances;
  std::string weak_label;
};

struct CpFact {
  std::string classifier;
  std::string instance;
  std::string label;
  std::optional<double> confidence;
};

struct TruthFact {
  std::string instance;
  std::string label;
};

struct DetectFact {
  std::string fragment;
  std::string object;
};

struct HintFact {
  std::string fragment;
  std::string relation;
  std::string arg_a;
  std::string arg_b;
};

struct FactFile {
  // alphabet kind ("instance", "weak", "object", "relation") -> symbol texts
  std::map<std::string, std::vector<std::string>> alphabets;
  std::vector<BagFact> bags;
  std::vector<CpFact> cps;
  std::vector<TruthFact> truths;
  std::vector<std::string> fragments;
  std::vector<DetectFact> detects;
  std::vector<HintFact> hints;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] inline void parse_fail(int line, const std::string& what) {
  throw Error(ErrorKind::parse_error,
              "line " + std::to_string(line) + ": " + what);
}

// Splits "name(arg, arg, [a, b], ...)" — the terminating period must already
// be stripped. Bracket lists come back as their own vector.
struct Statement {
  std::string functor;
  std::vector<std::string> args;
  std::vector<std::vector<std::string>> lists;  // parallel: empty if scalar
};

inline Statement parse_statement(const std::string& text, int line) {
  Statement st;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  auto read_token = [&](const char* stop) {
    std::size_t b = i;
    while (i < text.size() && !std::strchr(stop, text[i]) &&
           !std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    return text.substr(b, i - b);
  };

  skip_ws();
  st.functor = read_token("(),[]");
  if (st.functor.empty()) parse_fail(line, "expected a fact name");
  skip_ws();
  if (i >= text.size() || text[i] != '(')
    parse_fail(line, "expected '(' after '" + st.functor + "'");
  ++i;

  bool closed = false;
  while (i < text.size()) {
    skip_ws();
    if (i < text.size() && text[i] == ')') {
      ++i;
      closed = true;
      break;
    }
    if (i < text.size() && text[i] == '[') {
      ++i;
      std::vector<std::string> items;
      while (true) {
        skip_ws();
        if (i < text.size() && text[i] == ']') {
          ++i;
          break;
        }
        std::string item = read_token("(),[]");
        if (item.empty()) parse_fail(line, "expected a list element");
        items.push_back(std::move(item));
        skip_ws();
        if (i < text.size() && text[i] == ',') ++i;
      }
      st.args.emplace_back();
      st.lists.push_back(std::move(items));
    } else {
      std::string tok = read_token("(),[]");
      if (tok.empty()) parse_fail(line, "expected an argument");
      st.args.push_back(std::move(tok));
      st.lists.emplace_back();
    }
    skip_ws();
    if (i < text.size() && text[i] == ',') ++i;
  }
  if (!closed) parse_fail(line, "missing ')'");
  skip_ws();
  if (i != text.size()) parse_fail(line, "trailing text after ')'");
  return st;
}

inline void expand_alphabet_token(const std::string& tok,
                                  std::vector<std::string>& out, int line) {
  auto dots = tok.find("..");
  if (dots == std::string::npos) {
    out.push_back(tok);
    return;
  }
  auto lo = LabelSymbol::from_text(tok.substr(0, dots));
  auto hi = LabelSymbol::from_text(tok.substr(dots + 2));
  if (!lo.numeric() || !hi.numeric() ||
      *hi.numeric_value() < *lo.numeric_value())
    parse_fail(line, "bad range '" + tok + "'");
  for (long long v = *lo.numeric_value(); v <= *hi.numeric_value(); ++v)
    out.push_back(std::to_string(v));
}

inline std::optional<double> parse_confidence(const std::string& tok,
                                              int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size() || v < 0.0 || v > 1.0)
      parse_fail(line, "confidence '" + tok + "' not in [0,1]");
    return v;
  } catch (const std::invalid_argument&) {
    parse_fail(line, "confidence '" + tok + "' is not a number");
  } catch (const std::out_of_range&) {
    parse_fail(line, "confidence '" + tok + "' is not a number");
  }
}

}  // namespace detail

inline FactFile parse_fact_file(const std::string& content) {
  FactFile f;
  std::istringstream in(content);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto cut = raw.find('%'); cut != std::string::npos) raw.erase(cut);
    std::string text = detail::trim(raw);
    if (text.empty()) continue;

    if (text.rfind("alphabet", 0) == 0 &&
        (text.size() == 8 ||
         std::isspace(static_cast<unsigned char>(text[8])))) {
      if (text.back() == '.') text.pop_back();
      std::istringstream toks(text);
      std::string kw, kind, tok;
      toks >> kw >> kind;
      if (kind != "instance" && kind != "weak" && kind != "object" &&
          kind != "relation")
        detail::parse_fail(line, "unknown alphabet kind '" + kind + "'");
      auto& symbols = f.alphabets[kind];
      while (toks >> tok) detail::expand_alphabet_token(tok, symbols, line);
      if (symbols.empty())
        detail::parse_fail(line, "empty alphabet '" + kind + "'");
      continue;
    }

    if (text.back() != '.') detail::parse_fail(line, "missing '.'");
    text.pop_back();
    auto st = detail::parse_statement(text, line);
    auto scalar = [&](std::size_t idx) -> const std::string& {
      if (!st.lists[idx].empty())
        detail::parse_fail(line, "unexpected list argument");
      return st.args[idx];
    };

    if (st.functor == "bag") {
      if (st.args.size() != 3 || st.lists[1].empty())
        detail::parse_fail(line, "bag expects (id, [instances], weak_label)");
      f.bags.push_back({scalar(0), st.lists[1], scalar(2)});
    } else if (st.functor == "cp") {
      if (st.args.size() != 3 && st.args.size() != 4)
        detail::parse_fail(
            line, "cp expects (classifier, instance, label[, confidence])");
      CpFact fact{scalar(0), scalar(1), scalar(2), std::nullopt};
      if (st.args.size() == 4)
        fact.confidence = detail::parse_confidence(scalar(3), line);
      f.cps.push_back(std::move(fact));
    } else if (st.functor == "truth") {
      if (st.args.size() != 2)
        detail::parse_fail(line, "truth expects (instance, label)");
      f.truths.push_back({scalar(0), scalar(1)});
    } else if (st.functor == "fragment") {
      if (st.args.size() != 1)
        detail::parse_fail(line, "fragment expects (id)");
      f.fragments.push_back(scalar(0));
    } else if (st.functor == "detect") {
      if (st.args.size() != 2)
        detail::parse_fail(line, "detect expects (fragment, object)");
      f.detects.push_back({scalar(0), scalar(1)});
    } else if (st.functor == "hint") {
      if (st.args.size() != 4)
        detail::parse_fail(line, "hint expects (fragment, relation, a, b)");
      f.hints.push_back({scalar(0), scalar(1), scalar(2), scalar(3)});
    } else {
      detail::parse_fail(line, "unknown fact '" + st.functor + "'");
    }
  }
  return f;
}

inline FactFile load_fact_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::io_error, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_fact_file(buf.str());
}

// Labels are taken verbatim (not interned) so that out-of-alphabet values
// load fine and surface through validate_dataset instead of at parse time.
inline Dataset make_dataset(const FactFile& f) {
  Dataset d;
  if (auto it = f.alphabets.find("instance"); it != f.alphabets.end())
    d.instance_alphabet = LabelAlphabet::from_texts(it->second);
  else if (!f.bags.empty())
    throw Error(ErrorKind::invalid_alphabet, "no instance alphabet declared");
  if (auto it = f.alphabets.find("weak"); it != f.alphabets.end())
    d.weak_alphabet = LabelAlphabet::from_texts(it->second);
  else if (!f.bags.empty())
    throw Error(ErrorKind::invalid_alphabet, "no weak alphabet declared");

  for (const auto& b : f.bags) {
    Bag bag;
    bag.bag_id = b.bag_id;
    for (const auto& id : b.instances) bag.instances.push_back({id});
    bag.weak_label = LabelSymbol::from_text(b.weak_label);
    d.bags.push_back(std::move(bag));
  }
  d.bag_size = d.bags.empty() ? 0 : static_cast<int>(d.bags[0].instances.size());

  if (!f.truths.empty()) {
    std::map<InstanceRef, LabelSymbol> truth;
    for (const auto& t : f.truths)
      truth.insert_or_assign({t.instance}, LabelSymbol::from_text(t.label));
    d.ground_truth = std::move(truth);
  }
  return d;
}

// Classifier-name convention decides the mode: a single name (paper's lone f)
// means shared; names f1, f2, … mean positional with the 1-based position in
// the name.
inline PredictionSet make_predictions(const FactFile& f) {
  PredictionSet p;
  std::vector<std::string> names;
  for (const auto& c : f.cps)
    if (std::find(names.begin(), names.end(), c.classifier) == names.end())
      names.push_back(c.classifier);

  auto positional_index = [](const std::string& name) -> std::optional<int> {
    if (name.size() < 2 || name[0] != 'f') return std::nullopt;
    for (std::size_t i = 1; i < name.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(name[i])))
        return std::nullopt;
    return std::stoi(name.substr(1));
  };

  bool positional = names.size() > 1;
  if (positional)
    for (const auto& n : names)
      if (!positional_index(n))
        throw Error(ErrorKind::parse_error,
                    "cannot infer classifier mode: name '" + n +
                        "' is not positional (f<position>)");
  p.mode = positional ? PredictionMode::positional : PredictionMode::shared;

  for (const auto& c : f.cps) {
    int pos = positional ? *positional_index(c.classifier) : -1;
    InstanceRef inst{c.instance};
    p.set(inst, LabelSymbol::from_text(c.label), pos);
    if (c.confidence)
      p.confidence[PredictionSet::Key{inst, positional ? pos : -1}] =
          *c.confidence;
  }
  return p;
}

namespace detail {

// "0..9" when the numeric alphabet is contiguous, else the symbol list.
inline std::string format_alphabet(const LabelAlphabet& a) {
  if (a.kind() == AlphabetKind::numeric && a.size() >= 3) {
    bool contiguous = true;
    for (std::size_t i = 1; i < a.size(); ++i)
      if (*a.at(i).numeric_value() != *a.at(i - 1).numeric_value() + 1) {
        contiguous = false;
        break;
      }
    if (contiguous)
      return a.at(0).text() + ".." + a.at(a.size() - 1).text();
  }
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out += ' ';
    out += a.at(i).text();
  }
  return out;
}

}  // namespace detail

inline std::string write_dataset_facts(const Dataset& d,
                                       const PredictionSet* preds = nullptr) {
  std::string out;
  if (!d.instance_alphabet.empty())
    out += "alphabet instance " + detail::format_alphabet(d.instance_alphabet) +
           "\n";
  if (!d.weak_alphabet.empty())
    out += "alphabet weak " + detail::format_alphabet(d.weak_alphabet) + "\n";
  for (const auto& bag : d.bags) {
    out += "bag(" + bag.bag_id + ", [";
    for (std::size_t i = 0; i < bag.instances.size(); ++i) {
      if (i) out += ", ";
      out += bag.instances[i].id;
    }
    out += "], " + bag.weak_label.text() + ").\n";
  }
  if (d.ground_truth)
    for (const auto& [inst, label] : *d.ground_truth)
      out += "truth(" + inst.id + ", " + label.text() + ").\n";
  if (preds)
    for (const auto& [key, label] : preds->predictions) {
      std::string name = key.second < 0 ? std::string("f")
                                        : "f" + std::to_string(key.second);
      out += "cp(" + name + ", " + key.first.id + ", " + label.text() + ").\n";
    }
  return out;
}

}  // namespace baglogic
