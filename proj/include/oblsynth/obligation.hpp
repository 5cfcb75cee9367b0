#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oblsynth/ltlf.hpp"

namespace oblsynth {

/// Raised for formulas outside the obligation fragment (recurrence/persistence quantifiers).
class FragmentError : public std::runtime_error {
 public:
  explicit FragmentError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when the variable partition is malformed or does not cover the formula.
class PartitionError : public std::runtime_error {
 public:
  explicit PartitionError(const std::string& what) : std::runtime_error(what) {}
};

enum class PrefixQuantifier { Exists, Forall };

const char* to_string(PrefixQuantifier q);

enum class ObligationKind { Exists, Forall, And, Or, Not };

/// Boolean combination of exists(phi) / forall(phi) components. And/Or are n-ary.
class ObligationFormula {
 public:
  static ObligationFormula exists(LtlfFormula body);
  static ObligationFormula forall(LtlfFormula body);
  static ObligationFormula quantified(PrefixQuantifier q, LtlfFormula body);
  static ObligationFormula conjunction(std::vector<ObligationFormula> children);
  static ObligationFormula disjunction(std::vector<ObligationFormula> children);
  static ObligationFormula negation(ObligationFormula child);

  ObligationKind kind() const { return node_->kind; }
  bool is_component() const { return kind() == ObligationKind::Exists || kind() == ObligationKind::Forall; }
  PrefixQuantifier quantifier() const;
  const LtlfFormula& body() const { return node_->body; }
  const std::vector<ObligationFormula>& children() const { return node_->children; }
  const ObligationFormula& child(std::size_t i) const { return node_->children.at(i); }

  std::set<std::string> atoms() const;

  friend bool operator==(const ObligationFormula& a, const ObligationFormula& b);
  friend bool operator!=(const ObligationFormula& a, const ObligationFormula& b) { return !(a == b); }

 private:
  struct Node {
    ObligationKind kind;
    LtlfFormula body;
    std::vector<ObligationFormula> children;
  };
  ObligationFormula(ObligationKind kind, LtlfFormula body, std::vector<ObligationFormula> children);

  std::shared_ptr<const Node> node_;
};

std::string to_string(const ObligationFormula& psi);

struct Component {
  PrefixQuantifier quantifier;
  LtlfFormula body;
};

/// Finite-trace components in left-to-right order; component i is the i-th leaf.
std::vector<Component> components(const ObligationFormula& psi);
std::size_t component_count(const ObligationFormula& psi);

struct VariablePartition {
  std::vector<std::string> inputs;   // environment
  std::vector<std::string> outputs;  // system

  bool is_input(const std::string& atom) const;
  bool is_output(const std::string& atom) const;
  /// Outputs first, then inputs, each in declaration order.
  Alphabet alphabet() const;
};

struct Specification {
  ObligationFormula formula;
  VariablePartition partition;
};

ObligationFormula parse_obligation(std::string_view text);
/// `.inputs a b` / `.outputs c d`; blank lines and `#` comments are ignored.
VariablePartition parse_partition(std::string_view text);
std::string to_string(const VariablePartition& partition);
/// Parses both parts and checks disjointness and coverage.
Specification parse_spec(std::string_view formula_text, std::string_view partition_text);
void validate(const Specification& spec);

/// Pushes negations into the finite-trace payloads: !exists(p) = forall(!p), !forall(p) = exists(!p).
ObligationFormula to_pnf(const ObligationFormula& psi);
bool is_pnf(const ObligationFormula& psi);

/// Merges sibling forall-components under And and sibling exists-components under Or, to fixpoint.
ObligationFormula simplify_obligation(const ObligationFormula& psi);

/// Incremental membership test for the finite-trace component languages, driven letter by
/// letter. States must be finite so that loop iteration terminates.
class PrefixClassifier {
 public:
  using State = std::uint32_t;
  virtual ~PrefixClassifier() = default;
  virtual State initial(std::size_t component) const = 0;
  virtual State step(std::size_t component, State state, Letter letter) const = 0;
  virtual bool accepting(std::size_t component, State state) const = 0;
};

/// Decides u.v^omega in [psi]: each component is run over u and then v repeatedly until its
/// state at a loop boundary repeats, which covers every nonempty prefix.
bool eval_obligation_on_lasso(const ObligationFormula& psi, const Lasso& lasso, const PrefixClassifier& classifier);

}  // namespace oblsynth
