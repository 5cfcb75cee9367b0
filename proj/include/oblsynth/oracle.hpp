#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oblsynth/arena.hpp"
#include "oblsynth/random.hpp"
#include "oblsynth/solvers.hpp"

namespace oblsynth {

enum class Fault { None, FlipAccepting };
Fault parse_fault(const std::string& name);
const char* to_string(Fault f);

/// Compares a DFA with the trace semantics on every trace of length <= max_len.
/// Returns a description of the first disagreement.
std::optional<std::string> check_dfa_against_semantics(const Dfa& dfa, const LtlfFormula& phi, std::size_t max_len,
                                                       std::size_t* traces = nullptr);

/// Compares a DWA with the quantifier semantics on every lasso u.v^omega with |u| <= max_u,
/// 1 <= |v| <= max_v.
std::optional<std::string> check_dwa_against_lassos(const Dwa& dwa, const ObligationFormula& psi, std::size_t max_u,
                                                    std::size_t max_v, std::size_t* lassos = nullptr);

/// Iteration bounds of the layered solvers on one arena.
struct StructureCheck {
  std::size_t safereach_outer = 0;
  std::size_t scc_count = 0;  // over all state codes
  std::size_t scc_inner = 0;
  std::size_t states = 0;  // all state codes
  bool chain_monotone = true;
  bool ok() const { return chain_monotone && safereach_outer <= scc_count + 1 && scc_inner <= states; }
};
StructureCheck check_structure(const Arena& arena);

struct GameCheck {
  bool ok = true;
  std::string detail;
  bool realizable = false;
  bool buchi_equals_cobuchi = true;
  StructureCheck structure;
  std::optional<std::string> strategy_verdict;
};

/// All four symbolic solvers and the explicit oracle on one game; regions are compared on
/// reachable states. With a fault, the symbolic side sees one flipped accepting state.
GameCheck check_game(const RandomGame& game, Fault fault = Fault::None, std::uint64_t fault_seed = 0,
                     bool strategies = true);

struct OracleOptions {
  std::uint64_t seed = 1;
  std::size_t games = 1000;
  std::size_t max_states = 64;
  std::size_t formulas = 500;
  std::size_t formula_size = 8;
  std::size_t formula_atoms = 3;
  std::size_t trace_len = 6;
  std::size_t obligations = 200;
  std::size_t lasso_atoms = 2;
  std::size_t lasso_len = 4;
  Fault fault = Fault::None;
};

struct SuiteStats {
  std::string name;
  std::size_t cases = 0;
  std::size_t checks = 0;
  std::size_t mismatches = 0;
};

struct OracleMismatch {
  std::string suite;
  std::size_t index = 0;
  std::string instance;  // minimized where possible
  std::string detail;
};

struct OracleReport {
  std::vector<SuiteStats> suites;
  std::vector<OracleMismatch> mismatches;
  std::size_t strategies_checked = 0;
  std::size_t strategies_verified = 0;
  std::size_t buchi_cobuchi_differences = 0;
  std::size_t structure_violations = 0;

  bool ok() const { return mismatches.empty(); }
  /// Deterministic for fixed options (no timings).
  std::string text() const;
};

OracleReport run_oracle_check(const OracleOptions& options);

/// Serialized game: partition, combiner and HOA of every component.
std::string describe_game(const RandomGame& game);

}  // namespace oblsynth
