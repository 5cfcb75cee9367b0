#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oblsynth/arena.hpp"
#include "oblsynth/ltlf.hpp"

namespace oblsynth {

enum class SolverKind { Buchi, CoBuchi, SafeReach, Scc, Explicit };
const char* to_string(SolverKind k);
SolverKind parse_solver(const std::string& name);

class WeaknessViolation : public std::runtime_error {
 public:
  explicit WeaknessViolation(const std::string& what) : std::runtime_error(what) {}
};

enum class LayerKind { Safety, Reachability };

/// Cumulative layer L_j. In a reachability layer every new state has an output forcing
/// the successor into L_{j-1}; in a safety layer new states are accepting and can keep
/// the successor inside L_j.
struct Layer {
  bdd::Bdd set;
  LayerKind kind;
};

struct SolveCounters {
  std::size_t outer_iters = 0;
  /// Fixpoint rounds that changed the iterate (confirming rounds are not counted).
  std::size_t inner_iters = 0;
  std::size_t cpre_calls = 0;
  std::uint64_t bdd_ops = 0;
};

struct SolveResult {
  SolverKind solver = SolverKind::Buchi;
  bdd::Bdd region;
  bool realizable = false;
  std::vector<Layer> layers;
  /// SafeReach only: W_0, W_1, W_2, ...
  std::vector<bdd::Bdd> chain;
  SolveCounters counters;
  std::size_t scc_count = 0;
};

/// mu X. T | (W & CPre_s(X)). Appends one reachability layer per productive round when
/// `layers` is given.
bdd::Bdd reach(const Arena& arena, const bdd::Bdd& w, const bdd::Bdd& t, SolveCounters* counters = nullptr,
               std::vector<Layer>* layers = nullptr);
/// nu X. T | (W & CPre_s(X)).
bdd::Bdd safe(const Arena& arena, const bdd::Bdd& w, const bdd::Bdd& t, SolveCounters* counters = nullptr);

SolveResult solve_buchi(const Arena& arena);
SolveResult solve_cobuchi(const Arena& arena);
SolveResult solve_safereach(const Arena& arena);

struct SymbolicSccSet {
  /// Bottom-up: every SCC appears after all SCCs it can reach.
  std::vector<bdd::Bdd> sccs;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (from, to), from reaches to
};
/// Pivot-based forward/backward decomposition of the states in `domain` (default: reachable).
/// The edge list costs one image per SCC plus intersections and is optional.
SymbolicSccSet sym_scc_decompose(const Arena& arena, std::optional<bdd::Bdd> domain = std::nullopt,
                                 bool with_edges = true);
SolveResult solve_weak_scc(const Arena& arena, const SymbolicSccSet& sccs);

SolveResult solve(const Arena& arena, SolverKind kind);

enum class Objective { Buchi, CoBuchi, Weak };

struct ExplicitSolution {
  std::vector<char> system_wins;  // per node
  std::vector<std::int64_t> strategy;  // successor for winning system nodes, -1 otherwise
};
ExplicitSolution explicit_oracle_solve(const ExplicitGame& game, Objective objective);

/// Region of `set` over the state nodes of an explicit game, as a per-state flag vector.
std::vector<char> project_region(const Arena& arena, const ExplicitGame& game, const bdd::Bdd& set);

/// LTLf synthesis baseline: reachability of the accepting sink of the exists-automaton.
struct LtlfSynthesis {
  Arena arena;
  SolveResult result;
};
LtlfSynthesis synth_ltlf(const LtlfFormula& phi, const VariablePartition& partition);

}  // namespace oblsynth
