#include "oblsynth/obligation.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace oblsynth {

const char* to_string(PrefixQuantifier q) { return q == PrefixQuantifier::Exists ? "exists" : "forall"; }

ObligationFormula::ObligationFormula(ObligationKind kind, LtlfFormula body, std::vector<ObligationFormula> children)
    : node_(std::make_shared<const Node>(Node{kind, std::move(body), std::move(children)})) {}

ObligationFormula ObligationFormula::exists(LtlfFormula body) {
  return ObligationFormula(ObligationKind::Exists, std::move(body), {});
}

ObligationFormula ObligationFormula::forall(LtlfFormula body) {
  return ObligationFormula(ObligationKind::Forall, std::move(body), {});
}

ObligationFormula ObligationFormula::quantified(PrefixQuantifier q, LtlfFormula body) {
  return q == PrefixQuantifier::Exists ? exists(std::move(body)) : forall(std::move(body));
}

ObligationFormula ObligationFormula::conjunction(std::vector<ObligationFormula> children) {
  if (children.empty()) throw std::invalid_argument("empty obligation conjunction");
  return ObligationFormula(ObligationKind::And, LtlfFormula::tt(), std::move(children));
}

ObligationFormula ObligationFormula::disjunction(std::vector<ObligationFormula> children) {
  if (children.empty()) throw std::invalid_argument("empty obligation disjunction");
  return ObligationFormula(ObligationKind::Or, LtlfFormula::tt(), std::move(children));
}

ObligationFormula ObligationFormula::negation(ObligationFormula child) {
  return ObligationFormula(ObligationKind::Not, LtlfFormula::tt(), {std::move(child)});
}

PrefixQuantifier ObligationFormula::quantifier() const {
  if (kind() == ObligationKind::Exists) return PrefixQuantifier::Exists;
  if (kind() == ObligationKind::Forall) return PrefixQuantifier::Forall;
  throw std::logic_error("quantifier() on a Boolean obligation node");
}

std::set<std::string> ObligationFormula::atoms() const {
  if (is_component()) return body().atoms();
  std::set<std::string> out;
  for (const auto& c : children()) {
    auto a = c.atoms();
    out.insert(a.begin(), a.end());
  }
  return out;
}

bool operator==(const ObligationFormula& a, const ObligationFormula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  if (a.is_component()) return a.body() == b.body();
  return a.children() == b.children();
}

namespace {

void print(const ObligationFormula& psi, std::string& out) {
  auto operand = [&](const ObligationFormula& c) {
    const bool paren = c.kind() == ObligationKind::And || c.kind() == ObligationKind::Or;
    if (paren) out += "(";
    print(c, out);
    if (paren) out += ")";
  };
  switch (psi.kind()) {
    case ObligationKind::Exists:
    case ObligationKind::Forall:
      out += to_string(psi.quantifier());
      out += "(";
      out += to_string(psi.body());
      out += ")";
      break;
    case ObligationKind::Not:
      out += "!";
      operand(psi.child(0));
      break;
    case ObligationKind::And:
    case ObligationKind::Or:
      for (std::size_t i = 0; i < psi.children().size(); ++i) {
        if (i) out += psi.kind() == ObligationKind::And ? " & " : " | ";
        operand(psi.child(i));
      }
      break;
  }
}

}  // namespace

std::string to_string(const ObligationFormula& psi) {
  std::string out;
  print(psi, out);
  return out;
}

std::vector<Component> components(const ObligationFormula& psi) {
  std::vector<Component> out;
  std::function<void(const ObligationFormula&)> walk = [&](const ObligationFormula& f) {
    if (f.is_component()) {
      out.push_back({f.quantifier(), f.body()});
      return;
    }
    for (const auto& c : f.children()) walk(c);
  };
  walk(psi);
  return out;
}

std::size_t component_count(const ObligationFormula& psi) { return components(psi).size(); }

// ---------------------------------------------------------------------------
// Partition and specification files

bool VariablePartition::is_input(const std::string& atom) const {
  return std::find(inputs.begin(), inputs.end(), atom) != inputs.end();
}

bool VariablePartition::is_output(const std::string& atom) const {
  return std::find(outputs.begin(), outputs.end(), atom) != outputs.end();
}

Alphabet VariablePartition::alphabet() const {
  std::vector<std::string> atoms(outputs);
  atoms.insert(atoms.end(), inputs.begin(), inputs.end());
  return Alphabet(std::move(atoms));
}

VariablePartition parse_partition(std::string_view text) {
  VariablePartition p;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::string directive;
    if (!(words >> directive)) continue;
    std::vector<std::string>* target = nullptr;
    if (directive == ".inputs") {
      target = &p.inputs;
    } else if (directive == ".outputs") {
      target = &p.outputs;
    } else {
      throw SyntaxError("expected .inputs or .outputs, found '" + directive + "'", lineno, line.find(directive) + 1);
    }
    std::string name;
    while (words >> name) {
      if (!seen.insert(name).second) {
        throw PartitionError("atom '" + name + "' is declared more than once (inputs and outputs must be disjoint)");
      }
      target->push_back(name);
    }
  }
  return p;
}

std::string to_string(const VariablePartition& partition) {
  std::string out = ".inputs";
  for (const auto& a : partition.inputs) out += " " + a;
  out += "\n.outputs";
  for (const auto& a : partition.outputs) out += " " + a;
  return out + "\n";
}

void validate(const Specification& spec) {
  std::set<std::string> declared;
  for (const auto* side : {&spec.partition.inputs, &spec.partition.outputs}) {
    for (const auto& a : *side) {
      if (!declared.insert(a).second) throw PartitionError("atom '" + a + "' is both an input and an output");
    }
  }
  for (const auto& a : spec.formula.atoms()) {
    if (!declared.count(a)) throw PartitionError("atom '" + a + "' is not covered by the partition");
  }
  if (declared.size() > Alphabet::kMaxAtoms) {
    throw PartitionError("more than " + std::to_string(Alphabet::kMaxAtoms) + " atoms are not supported");
  }
}

Specification parse_spec(std::string_view formula_text, std::string_view partition_text) {
  Specification spec{parse_obligation(formula_text), parse_partition(partition_text)};
  validate(spec);
  return spec;
}

// ---------------------------------------------------------------------------
// Normal forms

namespace {

ObligationFormula make_flat(ObligationKind kind, const std::vector<ObligationFormula>& kids) {
  std::vector<ObligationFormula> flat;
  for (const auto& k : kids) {
    if (k.kind() == kind) {
      flat.insert(flat.end(), k.children().begin(), k.children().end());
    } else {
      flat.push_back(k);
    }
  }
  if (flat.size() == 1) return flat.front();
  return kind == ObligationKind::And ? ObligationFormula::conjunction(std::move(flat))
                                     : ObligationFormula::disjunction(std::move(flat));
}

ObligationFormula pnf(const ObligationFormula& psi, bool negate) {
  switch (psi.kind()) {
    case ObligationKind::Exists:
      return negate ? ObligationFormula::forall(!psi.body()) : psi;
    case ObligationKind::Forall:
      return negate ? ObligationFormula::exists(!psi.body()) : psi;
    case ObligationKind::Not:
      return pnf(psi.child(0), !negate);
    case ObligationKind::And:
    case ObligationKind::Or: {
      std::vector<ObligationFormula> kids;
      bool changed = negate;
      for (const auto& c : psi.children()) {
        kids.push_back(pnf(c, negate));
        changed = changed || kids.back() != c;
      }
      if (!changed) return psi;
      const bool is_and = psi.kind() == ObligationKind::And;
      return make_flat((is_and != negate) ? ObligationKind::And : ObligationKind::Or, kids);
    }
  }
  return psi;
}

}  // namespace

ObligationFormula to_pnf(const ObligationFormula& psi) { return pnf(psi, false); }

bool is_pnf(const ObligationFormula& psi) {
  if (psi.kind() == ObligationKind::Not) return false;
  for (const auto& c : psi.children()) {
    if (!is_pnf(c)) return false;
  }
  return true;
}

namespace {

ObligationFormula simplify_once(const ObligationFormula& psi) {
  if (psi.is_component() || psi.kind() == ObligationKind::Not) {
    if (psi.kind() == ObligationKind::Not) return ObligationFormula::negation(simplify_once(psi.child(0)));
    return psi;
  }
  std::vector<ObligationFormula> kids;
  for (const auto& c : psi.children()) kids.push_back(simplify_once(c));
  const ObligationFormula flat = make_flat(psi.kind(), kids);
  if (flat.is_component() || flat.kind() != psi.kind()) return flat;

  // forall p & forall q == forall(p & q); exists p | exists q == exists(p | q)
  const ObligationKind mergeable = psi.kind() == ObligationKind::And ? ObligationKind::Forall : ObligationKind::Exists;
  std::vector<ObligationFormula> out;
  std::optional<std::size_t> merged_at;
  for (const auto& c : flat.children()) {
    if (c.kind() != mergeable) {
      out.push_back(c);
      continue;
    }
    if (!merged_at) {
      merged_at = out.size();
      out.push_back(c);
      continue;
    }
    const ObligationFormula& prev = out[*merged_at];
    LtlfFormula body = mergeable == ObligationKind::Forall ? (prev.body() & c.body()) : (prev.body() | c.body());
    out[*merged_at] = ObligationFormula::quantified(prev.quantifier(), std::move(body));
  }
  return make_flat(psi.kind(), out);
}

}  // namespace

ObligationFormula simplify_obligation(const ObligationFormula& psi) {
  ObligationFormula cur = psi;
  for (;;) {
    ObligationFormula next = simplify_once(cur);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// Lasso semantics

namespace {

bool eval_component(PrefixQuantifier q, std::size_t index, const Lasso& lasso, const PrefixClassifier& cls) {
  const bool want = q == PrefixQuantifier::Exists;  // verdict when a prefix is accepted (exists) / rejected (forall)
  auto decisive = [&](PrefixClassifier::State s) { return cls.accepting(index, s) == want; };
  PrefixClassifier::State s = cls.initial(index);
  for (Letter a : lasso.stem.letters) {
    s = cls.step(index, s, a);
    if (decisive(s)) return want;
  }
  std::map<PrefixClassifier::State, bool> boundaries;
  while (boundaries.emplace(s, true).second) {
    for (Letter a : lasso.loop.letters) {
      s = cls.step(index, s, a);
      if (decisive(s)) return want;
    }
  }
  return !want;
}

bool eval_rec(const ObligationFormula& psi, const Lasso& lasso, const PrefixClassifier& cls, std::size_t& next) {
  switch (psi.kind()) {
    case ObligationKind::Exists:
    case ObligationKind::Forall:
      return eval_component(psi.quantifier(), next++, lasso, cls);
    case ObligationKind::Not:
      return !eval_rec(psi.child(0), lasso, cls, next);
    case ObligationKind::And: {
      bool all = true;
      for (const auto& c : psi.children()) all = eval_rec(c, lasso, cls, next) && all;
      return all;
    }
    case ObligationKind::Or: {
      bool any = false;
      for (const auto& c : psi.children()) any = eval_rec(c, lasso, cls, next) || any;
      return any;
    }
  }
  return false;
}

}  // namespace

bool eval_obligation_on_lasso(const ObligationFormula& psi, const Lasso& lasso, const PrefixClassifier& classifier) {
  std::size_t next = 0;
  return eval_rec(psi, lasso, classifier, next);
}

}  // namespace oblsynth
