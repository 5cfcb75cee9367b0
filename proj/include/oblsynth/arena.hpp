#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oblsynth/bdd.hpp"
#include "oblsynth/dwa.hpp"
#include "oblsynth/obligation.hpp"

namespace oblsynth {

class EncodingOverflowError : public std::runtime_error {
 public:
  explicit EncodingOverflowError(const std::string& what) : std::runtime_error(what) {}
};

/// The node cap was hit while building the monolithic transition relation.
class RelationCapacityError : public bdd::CapacityError {
 public:
  explicit RelationCapacityError(const std::string& what) : bdd::CapacityError(what) {}
};

struct ArenaOptions {
  std::size_t max_state_bits = 48;
  bdd::StoreOptions store;
};

struct ComponentEncoding {
  std::size_t first_bit = 0;
  std::size_t bits = 0;
  std::size_t states = 0;
};

/// Symbolic game: state bits z (with primed copies z'), system outputs x, environment
/// inputs y, one next-state function per bit, and the acceptance set.
/// Codes beyond a component's state count are rejecting self-loops.
class Arena {
 public:
  Arena() = default;
  Arena(const Arena&) = default;
  Arena(Arena&&) noexcept = default;
  Arena& operator=(Arena other) noexcept;

  std::shared_ptr<bdd::Store> store;
  VariablePartition partition;
  std::vector<bdd::Var> z, zp, x, y;
  std::vector<bdd::Bdd> next;
  std::map<bdd::Var, bdd::Bdd> next_map;
  bdd::Bdd acc;
  std::vector<bdd::Bdd> component_acc;
  std::vector<bool> init;
  std::vector<ComponentEncoding> encodings;

  std::size_t state_bits() const { return z.size(); }
  bdd::Bdd all() const { return store->bdd_true(); }
  bdd::Bdd none() const { return store->bdd_false(); }
  bdd::Bdd state(const std::vector<bool>& code) const;
  bdd::Bdd initial_state() const { return state(init); }
  bool contains(const bdd::Bdd& set, const std::vector<bool>& code) const;

  std::vector<bool> encode(const std::vector<StateId>& tuple) const;
  std::vector<StateId> decode(const std::vector<bool>& code) const;

  /// W composed with the next-state functions: a predicate over z, x, y.
  bdd::Bdd compose_next(const bdd::Bdd& w) const;
  /// Successor code for a concrete (z, x, y).
  std::vector<bool> successor(const std::vector<bool>& code, Letter outputs, Letter inputs) const;

  /// Monolithic relation over z, z' (built on first use).
  const bdd::Bdd& relation() const;
  bdd::Bdd image(const bdd::Bdd& s) const;
  /// Predecessors: exists x, y with a successor in s.
  bdd::Bdd preimage(const bdd::Bdd& s) const;
  bdd::Bdd reachable() const;
  double count_states(const bdd::Bdd& s) const;

  std::string dump() const;

 private:
  mutable std::optional<bdd::Bdd> relation_;
  mutable std::optional<bdd::Bdd> reachable_;
};

Arena build_arena(const Dwa& dwa, const VariablePartition& partition, const ArenaOptions& options = {});
Arena build_arena(const ComponentList& list, const VariablePartition& partition, const ArenaOptions& options = {});

/// exists x forall y. W(delta(z, x, y)): the system commits to x before seeing y.
bdd::Bdd cpre_s(const Arena& arena, const bdd::Bdd& w);
/// forall x exists y. W(delta(z, x, y)).
bdd::Bdd cpre_e(const Arena& arena, const bdd::Bdd& w);

/// Three-layer game graph: state nodes (system), (q, x) nodes (environment),
/// (q, x, y) nodes with the single successor delta(q, x + y).
struct ExplicitGame {
  std::size_t state_nodes = 0;
  std::size_t choice_nodes = 0;
  std::size_t response_nodes = 0;
  std::vector<std::vector<bool>> codes;  // per state node
  std::vector<std::vector<std::uint32_t>> succ;
  std::vector<char> owner;      // 0 system, 1 environment
  std::vector<char> accepting;  // inherited from the state
  std::uint32_t initial = 0;

  std::size_t size() const { return succ.size(); }
};

struct ExplicitOptions {
  std::size_t max_states = std::size_t{1} << 16;
  std::size_t max_letter_bits = 16;
  bool reachable_only = true;
};

ExplicitGame to_explicit(const Arena& arena, const ExplicitOptions& options = {});

}  // namespace oblsynth
