#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "oblsynth/automaton.hpp"
#include "oblsynth/ltlf.hpp"
#include "oblsynth/obligation.hpp"

namespace oblsynth {

class StateBudgetError : public std::runtime_error {
 public:
  StateBudgetError(const std::string& what, std::size_t closure_size)
      : std::runtime_error(what), closure_size_(closure_size) {}
  std::size_t closure_size() const { return closure_size_; }

 private:
  std::size_t closure_size_;
};

struct CompileOptions {
  std::size_t max_states = 1000000;
};

/// Progression of LTLf obligations with an END marker.
///
/// A state formula is a BDD over one variable per non-Boolean subformula (atoms and temporal
/// operators) plus END, so equal Boolean shells share one node. The letter variables sit
/// above the state variables in the session store; progressing a state substitutes every
/// state variable by its one-step unfolding.
class ProgressionSession {
 public:
  ProgressionSession(const LtlfFormula& phi, const Alphabet& alphabet);

  using StateFormula = bdd::Bdd;

  StateFormula initial() { return encode(phi_); }
  StateFormula encode(const LtlfFormula& f);
  StateFormula end_marker() { return store_.var(end_var_); }

  /// Successor obligation as a function of the letter variables and the state variables.
  bdd::Bdd progress_symbolic(const StateFormula& xi);
  StateFormula progress(const StateFormula& xi, Letter a);
  bool eps_accepts(const StateFormula& xi) const;
  std::string to_string(const StateFormula& xi) const { return store_.to_formula(xi); }

  /// Successor states of xi with their guards, imported into `letters` (a make_letter_store
  /// store for the session alphabet). Destinations are distinct.
  std::vector<std::pair<bdd::Bdd, StateFormula>> transitions(const StateFormula& xi, bdd::Store& letters);

  std::size_t closure_size() const { return closure_.size(); }
  bdd::Store& store() { return store_; }

 private:
  bdd::Var closure_var(const LtlfFormula& f);
  bdd::Bdd prog(const LtlfFormula& f);

  bdd::Store store_;
  LtlfFormula phi_;
  Alphabet alphabet_;
  std::vector<bdd::Var> letter_vars_;             // session letter vars, alphabet order
  std::vector<std::size_t> letter_atom_;          // alphabet index of each letter var
  std::map<std::string, bdd::Var> letter_of_atom_;
  bdd::Var end_var_ = 0;
  std::map<LtlfFormula, bdd::Var> closure_;
  std::vector<LtlfKind> var_kind_;                // indexed by state var - first state var
  bdd::Var first_state_var_ = 0;
  std::map<LtlfFormula, bdd::Bdd> encode_memo_;
  std::map<LtlfFormula, bdd::Bdd> prog_memo_;
  std::map<bdd::Var, bdd::Bdd> substitution_;
};

/// Complete deterministic automaton for phi over `alphabet`. Guards live in `letters`,
/// which is created when null. The initial state accepts iff the empty suffix satisfies phi.
Dfa compile_dfa(const LtlfFormula& phi, const Alphabet& alphabet, std::shared_ptr<bdd::Store> letters = nullptr,
                const CompileOptions& options = {});

bool dfa_accepts(const Automaton& dfa, const FiniteTrace& trace);

/// Partition refinement with symbolic splitters; the result is in canonical form.
Dfa minimize_dfa(const Dfa& dfa);

/// Quotient of `a` by the coarsest bisimulation respecting `accepting`.
template <class A>
A minimize_automaton(const A& a);

/// Prefix classifier backed by one DFA per component.
class DfaClassifier : public PrefixClassifier {
 public:
  explicit DfaClassifier(std::vector<Dfa> dfas);
  State initial(std::size_t component) const override { return dfas_.at(component).initial; }
  State step(std::size_t component, State state, Letter letter) const override;
  bool accepting(std::size_t component, State state) const override { return dfas_[component].accepting[state]; }

  const std::vector<Dfa>& dfas() const { return dfas_; }

 private:
  std::vector<Dfa> dfas_;
  std::vector<std::vector<StateId>> tables_;
};

/// DFAs for every component of psi over one shared letter store.
DfaClassifier make_classifier(const ObligationFormula& psi, const Alphabet& alphabet);

}  // namespace oblsynth
