#include "oblsynth/ltlf.hpp"

#include <algorithm>
#include <functional>

namespace oblsynth {

SyntaxError::SyntaxError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

UndeclaredAtomError::UndeclaredAtomError(const std::string& atom)
    : std::runtime_error("undeclared atom '" + atom + "'"), atom_(atom) {}

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.size() > kMaxAtoms) {
    throw std::invalid_argument("alphabet exceeds " + std::to_string(kMaxAtoms) + " atoms");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!index_.emplace(atoms_[i], i).second) throw std::invalid_argument("duplicate atom '" + atoms_[i] + "'");
  }
}

std::optional<std::size_t> Alphabet::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Alphabet::index_of(const std::string& name) const {
  auto i = find(name);
  if (!i) throw UndeclaredAtomError(name);
  return *i;
}

Letter Alphabet::letter(const std::set<std::string>& true_atoms) const {
  Letter l = 0;
  for (const auto& a : true_atoms) l |= Letter{1} << index_of(a);
  return l;
}

std::set<std::string> Alphabet::atoms_of(Letter letter) const {
  std::set<std::string> out;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (letter >> i & 1) out.insert(atoms_[i]);
  }
  return out;
}

std::string Alphabet::letter_to_string(Letter letter) const {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (letter >> i & 1) {
      if (!first) s += ",";
      s += atoms_[i];
      first = false;
    }
  }
  return s + "}";
}

std::uint64_t Alphabet::letter_count() const {
  if (atoms_.size() >= 64) throw std::overflow_error("letter count does not fit in 64 bits");
  return std::uint64_t{1} << atoms_.size();
}

Lasso::Lasso(FiniteTrace u, FiniteTrace v) : stem(std::move(u)), loop(std::move(v)) {
  if (loop.empty()) throw std::invalid_argument("lasso loop must be nonempty");
}

Letter Lasso::at(std::size_t position) const {
  if (position < stem.size()) return stem.letters[position];
  return loop.letters[(position - stem.size()) % loop.size()];
}

// ---------------------------------------------------------------------------
// LtlfFormula

namespace {

std::size_t combine(std::size_t seed, std::size_t v) { return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2)); }

}  // namespace

LtlfFormula::LtlfFormula(LtlfKind kind, std::string name, std::vector<LtlfFormula> children) {
  std::size_t h = combine(std::hash<int>{}(static_cast<int>(kind)), std::hash<std::string>{}(name));
  std::size_t size = 1;
  for (const auto& c : children) {
    h = combine(h, c.hash());
    size += c.size();
  }
  node_ = std::make_shared<const Node>(Node{kind, std::move(name), std::move(children), h, size});
}

LtlfFormula::LtlfFormula() : LtlfFormula(tt()) {}

LtlfFormula LtlfFormula::tt() {
  static const LtlfFormula t(LtlfKind::True, "", {});
  return t;
}

LtlfFormula LtlfFormula::ff() {
  static const LtlfFormula f(LtlfKind::False, "", {});
  return f;
}

LtlfFormula LtlfFormula::atom(std::string name) { return LtlfFormula(LtlfKind::Atom, std::move(name), {}); }
LtlfFormula LtlfFormula::negation(LtlfFormula f) { return LtlfFormula(LtlfKind::Not, "", {std::move(f)}); }
LtlfFormula LtlfFormula::conjunction(LtlfFormula l, LtlfFormula r) {
  return LtlfFormula(LtlfKind::And, "", {std::move(l), std::move(r)});
}
LtlfFormula LtlfFormula::disjunction(LtlfFormula l, LtlfFormula r) {
  return LtlfFormula(LtlfKind::Or, "", {std::move(l), std::move(r)});
}
LtlfFormula LtlfFormula::strong_next(LtlfFormula f) { return LtlfFormula(LtlfKind::StrongNext, "", {std::move(f)}); }
LtlfFormula LtlfFormula::weak_next(LtlfFormula f) { return LtlfFormula(LtlfKind::WeakNext, "", {std::move(f)}); }
LtlfFormula LtlfFormula::until(LtlfFormula l, LtlfFormula r) {
  return LtlfFormula(LtlfKind::Until, "", {std::move(l), std::move(r)});
}
LtlfFormula LtlfFormula::eventually(LtlfFormula f) { return LtlfFormula(LtlfKind::Eventually, "", {std::move(f)}); }
LtlfFormula LtlfFormula::always(LtlfFormula f) { return LtlfFormula(LtlfKind::Always, "", {std::move(f)}); }

LtlfFormula LtlfFormula::conjunction(const std::vector<LtlfFormula>& fs) {
  if (fs.empty()) return tt();
  LtlfFormula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = conjunction(acc, fs[i]);
  return acc;
}

LtlfFormula LtlfFormula::disjunction(const std::vector<LtlfFormula>& fs) {
  if (fs.empty()) return ff();
  LtlfFormula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = disjunction(acc, fs[i]);
  return acc;
}

bool LtlfFormula::is_temporal() const {
  switch (kind()) {
    case LtlfKind::StrongNext:
    case LtlfKind::WeakNext:
    case LtlfKind::Until:
    case LtlfKind::Eventually:
    case LtlfKind::Always:
      return true;
    default:
      return false;
  }
}

std::set<std::string> LtlfFormula::atoms() const {
  std::set<std::string> out;
  std::function<void(const LtlfFormula&)> walk = [&](const LtlfFormula& f) {
    if (f.kind() == LtlfKind::Atom) out.insert(f.name());
    for (const auto& c : f.children()) walk(c);
  };
  walk(*this);
  return out;
}

bool operator==(const LtlfFormula& a, const LtlfFormula& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.name() != b.name() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!(a.child(i) == b.child(i))) return false;
  }
  return true;
}

bool operator<(const LtlfFormula& a, const LtlfFormula& b) {
  if (a.node_ == b.node_) return false;
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  if (a.name() != b.name()) return a.name() < b.name();
  if (a.arity() != b.arity()) return a.arity() < b.arity();
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (a.child(i) < b.child(i)) return true;
    if (b.child(i) < a.child(i)) return false;
  }
  return false;
}

LtlfFormula operator!(const LtlfFormula& f) { return LtlfFormula::negation(f); }
LtlfFormula operator&(const LtlfFormula& l, const LtlfFormula& r) { return LtlfFormula::conjunction(l, r); }
LtlfFormula operator|(const LtlfFormula& l, const LtlfFormula& r) { return LtlfFormula::disjunction(l, r); }

namespace {

bool is_binary(LtlfKind k) { return k == LtlfKind::And || k == LtlfKind::Or || k == LtlfKind::Until; }

void print(const LtlfFormula& f, std::string& out) {
  auto operand = [&](const LtlfFormula& c) {
    if (is_binary(c.kind())) {
      out += "(";
      print(c, out);
      out += ")";
    } else {
      print(c, out);
    }
  };
  auto unary = [&](const char* op, const LtlfFormula& c) {
    out += op;
    out += "(";
    print(c, out);
    out += ")";
  };
  switch (f.kind()) {
    case LtlfKind::True: out += "true"; break;
    case LtlfKind::False: out += "false"; break;
    case LtlfKind::Atom: out += f.name(); break;
    case LtlfKind::Not:
      out += "!";
      operand(f.child(0));
      break;
    case LtlfKind::And:
      operand(f.child(0));
      out += " & ";
      operand(f.child(1));
      break;
    case LtlfKind::Or:
      operand(f.child(0));
      out += " | ";
      operand(f.child(1));
      break;
    case LtlfKind::Until:
      operand(f.child(0));
      out += " U ";
      operand(f.child(1));
      break;
    case LtlfKind::StrongNext: unary("X!", f.child(0)); break;
    case LtlfKind::WeakNext: unary("X", f.child(0)); break;
    case LtlfKind::Eventually: unary("F", f.child(0)); break;
    case LtlfKind::Always: unary("G", f.child(0)); break;
  }
}

}  // namespace

std::string to_string(const LtlfFormula& f) {
  std::string out;
  print(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Semantics

SuffixEvaluator::SuffixEvaluator(const LtlfFormula& phi, const Alphabet& alphabet) {
  root_ = add(phi, alphabet);
  empty_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Entry& e = nodes_[i];
    char v = 0;
    switch (e.kind) {
      case LtlfKind::True: v = 1; break;
      case LtlfKind::False: v = 0; break;
      case LtlfKind::Atom: v = 0; break;
      case LtlfKind::Not: v = !empty_[e.left]; break;
      case LtlfKind::And: v = empty_[e.left] && empty_[e.right]; break;
      case LtlfKind::Or: v = empty_[e.left] || empty_[e.right]; break;
      case LtlfKind::StrongNext: v = 0; break;
      case LtlfKind::WeakNext: v = 1; break;
      case LtlfKind::Until: v = 0; break;
      case LtlfKind::Eventually: v = 0; break;
      case LtlfKind::Always: v = 1; break;
    }
    empty_[i] = v;
  }
}

std::size_t SuffixEvaluator::add(const LtlfFormula& f, const Alphabet& alphabet) {
  Entry e{f.kind()};
  if (f.kind() == LtlfKind::Atom) e.atom_bit = alphabet.index_of(f.name());
  if (f.arity() >= 1) e.left = add(f.child(0), alphabet);
  if (f.arity() >= 2) e.right = add(f.child(1), alphabet);
  nodes_.push_back(e);
  return nodes_.size() - 1;
}

void SuffixEvaluator::step(Letter a, const std::vector<char>& tail, bool tail_empty, std::vector<char>& out) const {
  out.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Entry& e = nodes_[i];
    char v = 0;
    switch (e.kind) {
      case LtlfKind::True: v = 1; break;
      case LtlfKind::False: v = 0; break;
      case LtlfKind::Atom: v = (a >> e.atom_bit) & 1; break;
      case LtlfKind::Not: v = !out[e.left]; break;
      case LtlfKind::And: v = out[e.left] && out[e.right]; break;
      case LtlfKind::Or: v = out[e.left] || out[e.right]; break;
      case LtlfKind::StrongNext: v = !tail_empty && tail[e.left]; break;
      case LtlfKind::WeakNext: v = tail_empty || tail[e.left]; break;
      case LtlfKind::Until: v = out[e.right] || (out[e.left] && !tail_empty && tail[i]); break;
      case LtlfKind::Eventually: v = out[e.left] || (!tail_empty && tail[i]); break;
      case LtlfKind::Always: v = out[e.left] && (tail_empty || tail[i]); break;
    }
    out[i] = v;
  }
}

bool eval_ltlf(const LtlfFormula& phi, const Alphabet& alphabet, const FiniteTrace& trace, std::size_t i) {
  if (i > trace.size()) throw std::out_of_range("eval_ltlf: position beyond the end of the trace");
  const SuffixEvaluator ev(phi, alphabet);
  std::vector<char> cur = ev.empty_values();
  std::vector<char> next;
  bool tail_empty = true;
  for (std::size_t pos = trace.size(); pos-- > i;) {
    ev.step(trace.letters[pos], cur, tail_empty, next);
    std::swap(cur, next);
    tail_empty = false;
  }
  return ev.root_value(cur);
}

}  // namespace oblsynth
