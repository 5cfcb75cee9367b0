#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oblsynth::bdd {

using Var = std::uint32_t;
using NodeId = std::uint32_t;

inline constexpr NodeId kFalse = 0;
inline constexpr NodeId kTrue = 1;

enum class VarRole { StateBit, NextStateBit, SystemOutput, EnvironmentInput, LetterAtom, Auxiliary };

const char* to_string(VarRole role);

/// Thrown when an operation would grow the node table past the configured cap.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

class Store;

/// Reference-counted handle on a node of a Store. The store must outlive every handle.
class Bdd {
 public:
  Bdd() = default;
  Bdd(Store* store, NodeId id);
  Bdd(const Bdd& other);
  Bdd(Bdd&& other) noexcept;
  Bdd& operator=(const Bdd& other);
  Bdd& operator=(Bdd&& other) noexcept;
  ~Bdd();

  NodeId id() const { return id_; }
  Store* store() const { return store_; }
  bool valid() const { return store_ != nullptr; }

  bool is_false() const { return id_ == kFalse; }
  bool is_true() const { return id_ == kTrue; }
  bool is_constant() const { return id_ <= kTrue; }

  Bdd operator&(const Bdd& g) const;
  Bdd operator|(const Bdd& g) const;
  Bdd operator^(const Bdd& g) const;
  Bdd operator!() const;
  Bdd operator-(const Bdd& g) const;  // f & !g
  Bdd& operator&=(const Bdd& g);
  Bdd& operator|=(const Bdd& g);

  /// f => g
  bool implies(const Bdd& g) const;

  friend bool operator==(const Bdd& a, const Bdd& b) { return a.store_ == b.store_ && a.id_ == b.id_; }
  friend bool operator!=(const Bdd& a, const Bdd& b) { return !(a == b); }
  friend bool operator<(const Bdd& a, const Bdd& b) { return a.id_ < b.id_; }

 private:
  void release();

  Store* store_ = nullptr;
  NodeId id_ = kFalse;
};

enum class BinaryOp : std::uint32_t { And = 1, Or, Xor, Diff };
enum class Quantifier { Exists, Forall };

struct StoreOptions {
  std::size_t max_nodes = std::size_t{1} << 25;
  std::size_t gc_threshold = std::size_t{1} << 20;
  bool use_cache = true;
};

struct StoreStats {
  std::size_t live_nodes = 0;
  std::size_t peak_nodes = 0;
  std::size_t gc_runs = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::uint64_t top_level_ops = 0;
  std::map<std::string, std::uint64_t> ops_by_kind;
};

/// Shared reduced ordered BDD store. Variable order equals creation order; no reordering.
///
/// Garbage collection runs at the entry of a top-level operation once the node table
/// passes gc_threshold and keeps everything reachable from live handles.
class Store {
 public:
  explicit Store(StoreOptions options = {});
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;
  ~Store();

  Var new_var(std::string name, VarRole role);
  std::size_t var_count() const { return var_names_.size(); }
  const std::string& var_name(Var v) const { return var_names_.at(v); }
  VarRole var_role(Var v) const { return var_roles_.at(v); }
  std::optional<Var> find_var(const std::string& name) const;

  Bdd constant(bool value) { return Bdd(this, value ? kTrue : kFalse); }
  Bdd bdd_false() { return constant(false); }
  Bdd bdd_true() { return constant(true); }
  Bdd var(Var v);
  Bdd nvar(Var v);
  Bdd literal(Var v, bool positive) { return positive ? var(v) : nvar(v); }

  Bdd apply(BinaryOp op, const Bdd& f, const Bdd& g);
  Bdd negate(const Bdd& f);
  Bdd ite(const Bdd& f, const Bdd& g, const Bdd& h);

  Bdd cube(const std::vector<Var>& vars);
  /// Conjunction of literals, one per var.
  Bdd minterm(const std::vector<Var>& vars, const std::vector<bool>& values);

  Bdd quantify(Quantifier kind, const std::vector<Var>& vars, const Bdd& f);
  Bdd exists(const std::vector<Var>& vars, const Bdd& f) { return quantify(Quantifier::Exists, vars, f); }
  Bdd forall(const std::vector<Var>& vars, const Bdd& f) { return quantify(Quantifier::Forall, vars, f); }
  /// exists vars. (f & g) without building f & g.
  Bdd and_exists(const Bdd& f, const Bdd& g, const std::vector<Var>& vars);

  /// Simultaneous substitution; variables absent from the map are left alone.
  Bdd vector_compose(const Bdd& f, const std::map<Var, Bdd>& substitution);
  Bdd restrict(const Bdd& f, Var v, bool value);
  /// Cofactor w.r.t. a partial assignment.
  Bdd restrict(const Bdd& f, const std::vector<Var>& vars, const std::vector<bool>& values);
  /// Renames variables. The map does not need to preserve order.
  Bdd rename(const Bdd& f, const std::map<Var, Var>& renaming);

  bool eval(const Bdd& f, const std::function<bool(Var)>& assignment) const;
  bool eval(const Bdd& f, const std::vector<bool>& assignment) const;

  /// Lexicographically smallest assignment of vars (false < true) that extends to a model of f.
  std::optional<std::vector<bool>> pick_min_witness(const Bdd& f, const std::vector<Var>& vars);

  std::vector<Var> support(const Bdd& f) const;
  std::size_t dag_size(const Bdd& f) const;
  /// Number of satisfying assignments over the given variable count (support must be inside).
  double sat_count(const Bdd& f, const std::vector<Var>& vars) const;
  /// Disjoint cubes covering f, in deterministic order. Each cube lists (var, value) pairs.
  std::vector<std::vector<std::pair<Var, bool>>> cubes(const Bdd& f) const;

  /// Rebuilds f (owned by `source`) inside this store with variables mapped through var_map.
  Bdd import(const Store& source, const Bdd& f, const std::map<Var, Var>& var_map);

  Var node_var(NodeId id) const { return nodes_[id].var; }
  NodeId node_low(NodeId id) const { return nodes_[id].lo; }
  NodeId node_high(NodeId id) const { return nodes_[id].hi; }

  void collect_garbage();
  const StoreStats& stats() const { return stats_; }
  const StoreOptions& options() const { return options_; }
  void set_use_cache(bool on);
  void reset_op_counters();
  std::uint64_t op_count() const { return stats_.top_level_ops; }
  std::string dump_stats() const;

  /// Human-readable formula (names from the store), disjunction of cubes.
  std::string to_formula(const Bdd& f) const;

  /// Checks reducedness and orderedness of every live node. For tests.
  bool check_invariants() const;

 private:
  friend class Bdd;

  struct Node {
    Var var;
    NodeId lo;
    NodeId hi;
    NodeId next;
  };

  struct CacheEntry {
    std::uint32_t op = 0;
    NodeId a = 0;
    NodeId b = 0;
    NodeId c = 0;
    NodeId result = 0;
  };

  static constexpr Var kTerminalVar = 0xffffffffu;
  static constexpr NodeId kNil = 0xffffffffu;

  void ref(NodeId id) { ++refs_[id]; }
  void deref(NodeId id) { --refs_[id]; }

  void enter(const char* kind);
  NodeId mk(Var v, NodeId lo, NodeId hi);
  void grow_unique();
  bool cache_lookup(std::uint32_t op, NodeId a, NodeId b, NodeId c, NodeId& out);
  void cache_store(std::uint32_t op, NodeId a, NodeId b, NodeId c, NodeId result);
  void maybe_grow_cache();
  Var top_var(NodeId id) const { return nodes_[id].var; }

  NodeId and_rec(NodeId f, NodeId g);
  NodeId or_rec(NodeId f, NodeId g);
  NodeId xor_rec(NodeId f, NodeId g);
  NodeId not_rec(NodeId f);
  NodeId ite_rec(NodeId f, NodeId g, NodeId h);
  NodeId exists_rec(NodeId f, NodeId cube);
  NodeId forall_rec(NodeId f, NodeId cube);
  NodeId and_exists_rec(NodeId f, NodeId g, NodeId cube);
  NodeId cube_rec(const std::vector<Var>& sorted);
  NodeId apply_rec(BinaryOp op, NodeId f, NodeId g);

  StoreOptions options_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> refs_;
  std::vector<NodeId> buckets_;
  std::vector<NodeId> free_list_;
  std::vector<CacheEntry> cache_;
  std::size_t live_ = 2;
  std::vector<std::string> var_names_;
  std::vector<VarRole> var_roles_;
  std::map<std::string, Var> var_index_;
  StoreStats stats_;
};

}  // namespace oblsynth::bdd
