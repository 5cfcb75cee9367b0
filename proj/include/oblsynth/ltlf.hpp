#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oblsynth {

// ---------------------------------------------------------------------------
// Errors shared by every parser in the library.

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UndeclaredAtomError : public std::runtime_error {
 public:
  explicit UndeclaredAtomError(const std::string& atom);
  const std::string& atom() const { return atom_; }

 private:
  std::string atom_;
};

// ---------------------------------------------------------------------------
// Alphabet and traces. A letter is the set of atoms true at one position,
// stored as a bitmask over an Alphabet's atom order.

using Letter = std::uint64_t;

class Alphabet {
 public:
  static constexpr std::size_t kMaxAtoms = 64;

  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> atoms);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<std::string>& atoms() const { return atoms_; }
  const std::string& atom(std::size_t i) const { return atoms_.at(i); }
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name).has_value(); }

  Letter letter(const std::set<std::string>& true_atoms) const;
  std::set<std::string> atoms_of(Letter letter) const;
  std::string letter_to_string(Letter letter) const;
  /// Number of distinct letters, 2^size(); only meaningful for small alphabets.
  std::uint64_t letter_count() const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.atoms_ == b.atoms_; }

 private:
  std::vector<std::string> atoms_;
  std::map<std::string, std::size_t> index_;
};

struct FiniteTrace {
  std::vector<Letter> letters;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  friend bool operator==(const FiniteTrace&, const FiniteTrace&) = default;
};

/// The infinite trace stem . loop^omega. The loop is never empty.
struct Lasso {
  FiniteTrace stem;
  FiniteTrace loop;

  Lasso() = default;
  Lasso(FiniteTrace u, FiniteTrace v);
  Letter at(std::size_t position) const;
};

// ---------------------------------------------------------------------------
// LTLf formulas

enum class LtlfKind { True, False, Atom, Not, And, Or, StrongNext, WeakNext, Until, Eventually, Always };

class LtlfFormula {
 public:
  LtlfFormula();  // true

  static LtlfFormula tt();
  static LtlfFormula ff();
  static LtlfFormula atom(std::string name);
  static LtlfFormula negation(LtlfFormula f);
  static LtlfFormula conjunction(LtlfFormula l, LtlfFormula r);
  static LtlfFormula disjunction(LtlfFormula l, LtlfFormula r);
  static LtlfFormula strong_next(LtlfFormula f);
  static LtlfFormula weak_next(LtlfFormula f);
  static LtlfFormula until(LtlfFormula l, LtlfFormula r);
  static LtlfFormula eventually(LtlfFormula f);
  static LtlfFormula always(LtlfFormula f);
  /// Conjunction/disjunction of a list, nested to the left; empty lists give true/false.
  static LtlfFormula conjunction(const std::vector<LtlfFormula>& fs);
  static LtlfFormula disjunction(const std::vector<LtlfFormula>& fs);

  LtlfKind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  std::size_t arity() const { return node_->children.size(); }
  const LtlfFormula& child(std::size_t i) const { return node_->children.at(i); }
  const std::vector<LtlfFormula>& children() const { return node_->children; }
  std::size_t hash() const { return node_->hash; }
  /// Number of AST nodes.
  std::size_t size() const { return node_->size; }
  bool is_temporal() const;

  std::set<std::string> atoms() const;

  friend bool operator==(const LtlfFormula& a, const LtlfFormula& b);
  friend bool operator!=(const LtlfFormula& a, const LtlfFormula& b) { return !(a == b); }
  /// Total structural order, used for deterministic containers.
  friend bool operator<(const LtlfFormula& a, const LtlfFormula& b);

 private:
  struct Node {
    LtlfKind kind;
    std::string name;
    std::vector<LtlfFormula> children;
    std::size_t hash;
    std::size_t size;
  };

  LtlfFormula(LtlfKind kind, std::string name, std::vector<LtlfFormula> children);

  std::shared_ptr<const Node> node_;
};

struct LtlfHash {
  std::size_t operator()(const LtlfFormula& f) const { return f.hash(); }
};

LtlfFormula operator!(const LtlfFormula& f);
LtlfFormula operator&(const LtlfFormula& l, const LtlfFormula& r);
LtlfFormula operator|(const LtlfFormula& l, const LtlfFormula& r);

/// Prints in the concrete syntax accepted by parse_ltlf; parse(to_string(f)) == f.
std::string to_string(const LtlfFormula& f);

/// Parses the LTLf concrete syntax. When `declared` is given, every atom must be in it.
LtlfFormula parse_ltlf(std::string_view text, const std::set<std::string>* declared = nullptr);

// ---------------------------------------------------------------------------
// Trace semantics

/// One-step evaluator: the truth of every subformula at the first position of a.t,
/// computed from the letter a and the values at the first position of t.
/// The empty suffix uses the end-of-trace rules: atoms, X!, U, F false; X, G true.
class SuffixEvaluator {
 public:
  SuffixEvaluator(const LtlfFormula& phi, const Alphabet& alphabet);

  std::size_t node_count() const { return nodes_.size(); }
  /// Values on the empty suffix.
  const std::vector<char>& empty_values() const { return empty_; }
  /// Values at a.t given values at t; `tail_empty` tells whether t is the empty suffix.
  void step(Letter a, const std::vector<char>& tail, bool tail_empty, std::vector<char>& out) const;
  bool root_value(const std::vector<char>& values) const { return values[root_] != 0; }

 private:
  struct Entry {
    LtlfKind kind;
    std::size_t atom_bit = 0;
    std::size_t left = 0;
    std::size_t right = 0;
  };
  std::size_t add(const LtlfFormula& f, const Alphabet& alphabet);

  std::vector<Entry> nodes_;  // children precede parents
  std::vector<char> empty_;
  std::size_t root_ = 0;
};

/// trace, i |= phi for 0 <= i <= |trace|; i == |trace| evaluates the empty suffix.
bool eval_ltlf(const LtlfFormula& phi, const Alphabet& alphabet, const FiniteTrace& trace, std::size_t i = 0);

}  // namespace oblsynth
