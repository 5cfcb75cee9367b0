#pragma once

#include <optional>
#include <string>

#include "oblsynth/arena.hpp"
#include "oblsynth/dwa.hpp"
#include "oblsynth/solvers.hpp"
#include "oblsynth/strategy.hpp"

namespace oblsynth {

struct SynthConfig {
  SolverKind solver = SolverKind::SafeReach;
  MinMode mode = MinMode::Incremental;
  std::size_t tau = 256;
  bool simplify = true;
  bool verify = true;
  std::size_t max_dfa_states = 1000000;
  std::size_t max_product_states = 4000000;
  std::size_t max_bdd_nodes = 0;  // 0: store default
  std::size_t max_state_bits = 48;
  std::size_t verify_cap = std::size_t{1} << 20;
};

struct SynthOutcome {
  ObligationFormula pnf;
  PipelineResult pipeline;
  Arena arena;
  SolveResult result;
  bool realizable = false;
  std::optional<MooreStrategy> strategy;
  std::optional<VerifyResult> verification;
  std::size_t dwa_states = 0;  // product automaton size (incremental), else sum of components
};

/// Steps 1-3 plus extraction and verification against the component automata.
SynthOutcome synthesize(const Specification& spec, const SynthConfig& config = {});

/// PNF (and optional simplification) of a specification's formula.
ObligationFormula normalize(const ObligationFormula& psi, bool simplify = true);

}  // namespace oblsynth
