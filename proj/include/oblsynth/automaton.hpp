#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oblsynth/bdd.hpp"
#include "oblsynth/ltlf.hpp"

namespace oblsynth {

using StateId = std::uint32_t;

/// A store whose first variables are the alphabet atoms, in alphabet order.
std::shared_ptr<bdd::Store> make_letter_store(const Alphabet& alphabet);

/// Evaluates a guard on a letter; variable i of the store reads bit i of the letter.
bool eval_letter(const bdd::Store& store, bdd::NodeId guard, Letter letter);

struct Edge {
  bdd::Bdd guard;
  StateId dst;
};

/// Explicit states with propositional guards over the letter variables of `store`.
/// Used for DFAs (finite words) and DWAs (infinite words).
class Automaton {
 public:
  Automaton() = default;
  Automaton(const Automaton&) = default;
  Automaton(Automaton&&) noexcept = default;
  /// Swaps, so guards are released before the store they live in.
  Automaton& operator=(Automaton other) noexcept;

  std::shared_ptr<bdd::Store> store;
  Alphabet alphabet;
  StateId initial = 0;
  std::vector<std::vector<Edge>> edges;
  std::vector<char> accepting;

  std::size_t size() const { return edges.size(); }
  std::size_t edge_count() const;
  StateId add_state(bool is_accepting);
  /// Adds an edge, or widens the existing edge to the same destination.
  void add_edge(StateId src, const bdd::Bdd& guard, StateId dst);
  StateId step(StateId q, Letter a) const;
  std::vector<StateId> successors(StateId q) const;
  std::vector<bdd::Var> letter_vars() const;
  bdd::Bdd letter_bdd(Letter a) const;
  std::string guard_to_string(const bdd::Bdd& guard) const;
};

struct Dfa : Automaton {};

/// Deterministic weak automaton with optional annotations.
struct Dwa : Automaton {
  std::vector<int> scc;   // Tarjan order: successors' SCCs have smaller ids
  std::vector<int> rank;
  /// Per state, the acceptance bit of every original component (composed automata only).
  std::vector<std::vector<bool>> provenance;

  void clear_annotations();
};

/// Empty on success, else a description naming the offending state.
std::optional<std::string> check_deterministic_complete(const Automaton& a);

/// Keeps states reachable from the initial state, preserving relative order.
template <class A>
A trim(const A& a);

/// BFS renumbering from the initial state; edges of each state sorted by the smallest
/// letter satisfying their guard. Annotations are dropped.
template <class A>
A canonical_form(const A& a);

/// Structural equality of canonical forms (guards compared as functions).
bool isomorphic(const Automaton& a, const Automaton& b);

/// Dense successor table indexed by q * 2^|alphabet| + letter. Alphabet must be small.
std::vector<StateId> transition_table(const Automaton& a);

std::string to_dot(const Automaton& a, const std::string& name = "A");

/// Tarjan SCC ids (iterative); successors' SCCs get smaller ids. Returns the SCC count.
std::size_t tarjan_scc(const std::vector<std::vector<StateId>>& succ, std::vector<int>& scc_of);

}  // namespace oblsynth
