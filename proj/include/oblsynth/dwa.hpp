#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oblsynth/automaton.hpp"
#include "oblsynth/dfa.hpp"
#include "oblsynth/obligation.hpp"

namespace oblsynth {

/// Lemma-4 style construction: exists turns accepting states into a merged accepting sink,
/// forall turns rejecting states into a merged rejecting sink. The initial state is forced
/// rejecting (exists) or accepting (forall), so only nonempty prefixes count.
Dwa build_component(PrefixQuantifier q, const Dfa& dfa);

Dwa dwa_and(const Dwa& a, const Dwa& b);
Dwa dwa_or(const Dwa& a, const Dwa& b);
Dwa dwa_not(const Dwa& a);

/// Fills scc and rank: bottom accepting SCCs get 0, bottom rejecting 1, transient SCCs
/// the maximum successor rank l, recurrent SCCs l or l+1 so that parity matches acceptance.
void compute_ranks(Dwa& a);

/// Re-marks acceptance by rank parity, then minimizes; canonical form, no provenance.
Dwa minimize_dwa(const Dwa& a);

struct WeaknessReport {
  bool weak = true;
  int scc = -1;
  StateId accepting_state = 0;
  StateId rejecting_state = 0;
  std::string message;
};
WeaknessReport check_weak(const Dwa& a);

struct SigmaPartition {
  std::map<std::vector<bool>, std::vector<StateId>> blocks;
  std::map<std::vector<bool>, bool> accepting;
  bool valid = true;
  std::string violation;
};
/// Requires provenance. Checks homogeneity, SCC containment and one-directional reachability.
SigmaPartition check_sigma_partition(const Dwa& a);

/// Accepts iff the unique run on the lasso visits accepting states infinitely often.
bool dwa_accepts_lasso(const Dwa& a, const Lasso& lasso);

enum class MinMode { Component, Incremental };
const char* to_string(MinMode m);
MinMode parse_min_mode(const std::string& s);

/// A positive Boolean formula over component acceptance bits: the PNF obligation shape.
class Combiner {
 public:
  Combiner() = default;
  explicit Combiner(ObligationFormula shape);
  const ObligationFormula& shape() const { return *shape_; }
  bool eval(const std::vector<bool>& bits) const;
  /// Folds the shape with leaf(i), and_(x, y), or_(x, y).
  template <class T, class Leaf, class AndF, class OrF>
  T fold(Leaf leaf, AndF and_, OrF or_) const {
    std::size_t next = 0;
    return fold_rec<T>(*shape_, next, leaf, and_, or_);
  }

 private:
  template <class T, class Leaf, class AndF, class OrF>
  static T fold_rec(const ObligationFormula& f, std::size_t& next, Leaf& leaf, AndF& and_, OrF& or_) {
    if (f.is_component()) return leaf(next++);
    T acc = fold_rec<T>(f.child(0), next, leaf, and_, or_);
    for (std::size_t i = 1; i < f.children().size(); ++i) {
      T rhs = fold_rec<T>(f.child(i), next, leaf, and_, or_);
      acc = f.kind() == ObligationKind::And ? and_(acc, rhs) : or_(acc, rhs);
    }
    return acc;
  }

  std::optional<ObligationFormula> shape_;
};

struct ComponentList {
  std::vector<Dwa> components;
  Combiner combiner;
};

struct PipelineOptions {
  MinMode mode = MinMode::Incremental;
  std::size_t tau = 256;
  CompileOptions compile;
  std::size_t max_product_states = 4000000;
};

struct PipelineResult {
  MinMode mode = MinMode::Incremental;
  ComponentList components;      // always filled (minimized components)
  std::optional<Dwa> automaton;  // incremental mode only
  std::size_t products = 0;
  std::size_t minimizations = 0;
};

/// Steps 1-2: one DWA per component, then (incremental) balanced products minimized while
/// their size stays within tau. psi must be in PNF.
PipelineResult compile_obligation(const ObligationFormula& psi, const Alphabet& alphabet,
                                  const PipelineOptions& options = {});

/// Explicit product of a component list under its combiner, with provenance.
Dwa explicit_product(const ComponentList& list, std::size_t max_states = 4000000);

std::string export_hoa(const Dwa& a, const std::string& name = "", const std::vector<std::string>& comments = {});
/// Parses HOA produced by export_hoa (and simple state- or transition-based Buchi files).
Dwa parse_hoa(const std::string& text);

}  // namespace oblsynth
