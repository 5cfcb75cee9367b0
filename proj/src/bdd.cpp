#include "oblsynth/bdd.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace oblsynth::bdd {

namespace {

enum CacheOp : std::uint32_t {
  kOpAnd = 1,
  kOpOr,
  kOpXor,
  kOpNot,
  kOpIte,
  kOpExists,
  kOpForall,
  kOpAndExists,
};

constexpr Var kFreeVar = 0xfffffffeu;

inline std::size_t hash3(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  std::uint64_t h = a;
  h = h * 0x9E3779B97F4A7C15ull + b;
  h ^= h >> 29;
  h = h * 0xBF58476D1CE4E5B9ull + c;
  h ^= h >> 32;
  return static_cast<std::size_t>(h);
}

}  // namespace

const char* to_string(VarRole role) {
  switch (role) {
    case VarRole::StateBit: return "state";
    case VarRole::NextStateBit: return "state'";
    case VarRole::SystemOutput: return "output";
    case VarRole::EnvironmentInput: return "input";
    case VarRole::LetterAtom: return "atom";
    case VarRole::Auxiliary: return "aux";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Bdd handle

Bdd::Bdd(Store* store, NodeId id) : store_(store), id_(id) {
  if (store_) store_->ref(id_);
}

Bdd::Bdd(const Bdd& other) : store_(other.store_), id_(other.id_) {
  if (store_) store_->ref(id_);
}

Bdd::Bdd(Bdd&& other) noexcept : store_(other.store_), id_(other.id_) {
  other.store_ = nullptr;
  other.id_ = kFalse;
}

Bdd& Bdd::operator=(const Bdd& other) {
  if (this != &other) {
    if (other.store_) other.store_->ref(other.id_);
    release();
    store_ = other.store_;
    id_ = other.id_;
  }
  return *this;
}

Bdd& Bdd::operator=(Bdd&& other) noexcept {
  if (this != &other) {
    release();
    store_ = other.store_;
    id_ = other.id_;
    other.store_ = nullptr;
    other.id_ = kFalse;
  }
  return *this;
}

Bdd::~Bdd() { release(); }

void Bdd::release() {
  if (store_) store_->deref(id_);
  store_ = nullptr;
}

Bdd Bdd::operator&(const Bdd& g) const { return store_->apply(BinaryOp::And, *this, g); }
Bdd Bdd::operator|(const Bdd& g) const { return store_->apply(BinaryOp::Or, *this, g); }
Bdd Bdd::operator^(const Bdd& g) const { return store_->apply(BinaryOp::Xor, *this, g); }
Bdd Bdd::operator-(const Bdd& g) const { return store_->apply(BinaryOp::Diff, *this, g); }
Bdd Bdd::operator!() const { return store_->negate(*this); }

Bdd& Bdd::operator&=(const Bdd& g) {
  *this = *this & g;
  return *this;
}

Bdd& Bdd::operator|=(const Bdd& g) {
  *this = *this | g;
  return *this;
}

bool Bdd::implies(const Bdd& g) const { return (*this - g).is_false(); }

// ---------------------------------------------------------------------------
// Store

Store::Store(StoreOptions options) : options_(options) {
  nodes_.push_back({kTerminalVar, kFalse, kFalse, kNil});
  nodes_.push_back({kTerminalVar, kTrue, kTrue, kNil});
  refs_.assign(2, 1);
  buckets_.assign(1024, kNil);
  cache_.resize(options_.use_cache ? 4096 : 0);
  stats_.live_nodes = live_;
  stats_.peak_nodes = live_;
}

Store::~Store() = default;

Var Store::new_var(std::string name, VarRole role) {
  if (var_index_.count(name)) throw std::invalid_argument("duplicate BDD variable name: " + name);
  const Var v = static_cast<Var>(var_names_.size());
  var_index_[name] = v;
  var_names_.push_back(std::move(name));
  var_roles_.push_back(role);
  return v;
}

std::optional<Var> Store::find_var(const std::string& name) const {
  auto it = var_index_.find(name);
  if (it == var_index_.end()) return std::nullopt;
  return it->second;
}

void Store::enter(const char* kind) {
  ++stats_.top_level_ops;
  ++stats_.ops_by_kind[kind];
  if (live_ > options_.gc_threshold) {
    collect_garbage();
    if (live_ * 2 > options_.gc_threshold) options_.gc_threshold = std::min(options_.gc_threshold * 2, options_.max_nodes);
  }
}

void Store::set_use_cache(bool on) {
  options_.use_cache = on;
  cache_.assign(on ? 4096 : 0, CacheEntry{});
}

void Store::reset_op_counters() {
  stats_.top_level_ops = 0;
  stats_.ops_by_kind.clear();
}

NodeId Store::mk(Var v, NodeId lo, NodeId hi) {
  if (lo == hi) return lo;
  const std::size_t mask = buckets_.size() - 1;
  const std::size_t slot = hash3(v, lo, hi) & mask;
  for (NodeId n = buckets_[slot]; n != kNil; n = nodes_[n].next) {
    const Node& node = nodes_[n];
    if (node.var == v && node.lo == lo && node.hi == hi) return n;
  }
  if (live_ >= options_.max_nodes) {
    throw CapacityError("BDD node cap of " + std::to_string(options_.max_nodes) + " exceeded");
  }
  NodeId id;
  if (!free_list_.empty()) {
    id = free_list_.back();
    free_list_.pop_back();
    nodes_[id] = {v, lo, hi, buckets_[slot]};
    refs_[id] = 0;
  } else {
    id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({v, lo, hi, buckets_[slot]});
    refs_.push_back(0);
  }
  buckets_[slot] = id;
  ++live_;
  stats_.live_nodes = live_;
  stats_.peak_nodes = std::max(stats_.peak_nodes, live_);
  if (live_ > buckets_.size()) grow_unique();
  maybe_grow_cache();
  return id;
}

void Store::grow_unique() {
  buckets_.assign(buckets_.size() * 2, kNil);
  const std::size_t mask = buckets_.size() - 1;
  for (NodeId id = 2; id < nodes_.size(); ++id) {
    Node& n = nodes_[id];
    if (n.var == kFreeVar) continue;
    const std::size_t slot = hash3(n.var, n.lo, n.hi) & mask;
    n.next = buckets_[slot];
    buckets_[slot] = id;
  }
}

void Store::maybe_grow_cache() {
  if (!options_.use_cache) return;
  if (cache_.size() < (std::size_t{1} << 22) && live_ > cache_.size() * 2) {
    cache_.assign(cache_.size() * 4, CacheEntry{});
  }
}

bool Store::cache_lookup(std::uint32_t op, NodeId a, NodeId b, NodeId c, NodeId& out) {
  if (cache_.empty()) return false;
  const CacheEntry& e = cache_[hash3(op * 0x1000193u ^ a, b, c) & (cache_.size() - 1)];
  if (e.op == op && e.a == a && e.b == b && e.c == c) {
    out = e.result;
    ++stats_.cache_hits;
    return true;
  }
  ++stats_.cache_misses;
  return false;
}

void Store::cache_store(std::uint32_t op, NodeId a, NodeId b, NodeId c, NodeId result) {
  if (cache_.empty()) return;
  cache_[hash3(op * 0x1000193u ^ a, b, c) & (cache_.size() - 1)] = {op, a, b, c, result};
}

void Store::collect_garbage() {
  std::vector<char> marked(nodes_.size(), 0);
  marked[kFalse] = marked[kTrue] = 1;
  std::vector<NodeId> stack;
  for (NodeId id = 2; id < nodes_.size(); ++id) {
    if (refs_[id] > 0 && nodes_[id].var != kFreeVar) stack.push_back(id);
  }
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (marked[n]) continue;
    marked[n] = 1;
    stack.push_back(nodes_[n].lo);
    stack.push_back(nodes_[n].hi);
  }
  free_list_.clear();
  live_ = 2;
  std::fill(buckets_.begin(), buckets_.end(), kNil);
  const std::size_t mask = buckets_.size() - 1;
  for (NodeId id = static_cast<NodeId>(nodes_.size()); id-- > 2;) {
    Node& n = nodes_[id];
    if (!marked[id]) {
      n.var = kFreeVar;
      free_list_.push_back(id);
      continue;
    }
    ++live_;
    const std::size_t slot = hash3(n.var, n.lo, n.hi) & mask;
    n.next = buckets_[slot];
    buckets_[slot] = id;
  }
  std::fill(cache_.begin(), cache_.end(), CacheEntry{});
  ++stats_.gc_runs;
  stats_.live_nodes = live_;
}

Bdd Store::var(Var v) {
  enter("var");
  return Bdd(this, mk(v, kFalse, kTrue));
}

Bdd Store::nvar(Var v) {
  enter("var");
  return Bdd(this, mk(v, kTrue, kFalse));
}

// --- core recursions -------------------------------------------------------

NodeId Store::not_rec(NodeId f) {
  if (f == kFalse) return kTrue;
  if (f == kTrue) return kFalse;
  NodeId r;
  if (cache_lookup(kOpNot, f, 0, 0, r)) return r;
  const Node n = nodes_[f];
  const NodeId lo = not_rec(n.lo);
  const NodeId hi = not_rec(n.hi);
  r = mk(n.var, lo, hi);
  cache_store(kOpNot, f, 0, 0, r);
  return r;
}

NodeId Store::and_rec(NodeId f, NodeId g) {
  if (f == kFalse || g == kFalse) return kFalse;
  if (f == kTrue) return g;
  if (g == kTrue || f == g) return f;
  if (f > g) std::swap(f, g);
  NodeId r;
  if (cache_lookup(kOpAnd, f, g, 0, r)) return r;
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const Var v = std::min(nf.var, ng.var);
  const NodeId f0 = nf.var == v ? nf.lo : f, f1 = nf.var == v ? nf.hi : f;
  const NodeId g0 = ng.var == v ? ng.lo : g, g1 = ng.var == v ? ng.hi : g;
  const NodeId lo = and_rec(f0, g0);
  const NodeId hi = and_rec(f1, g1);
  r = mk(v, lo, hi);
  cache_store(kOpAnd, f, g, 0, r);
  return r;
}

NodeId Store::or_rec(NodeId f, NodeId g) {
  if (f == kTrue || g == kTrue) return kTrue;
  if (f == kFalse) return g;
  if (g == kFalse || f == g) return f;
  if (f > g) std::swap(f, g);
  NodeId r;
  if (cache_lookup(kOpOr, f, g, 0, r)) return r;
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const Var v = std::min(nf.var, ng.var);
  const NodeId f0 = nf.var == v ? nf.lo : f, f1 = nf.var == v ? nf.hi : f;
  const NodeId g0 = ng.var == v ? ng.lo : g, g1 = ng.var == v ? ng.hi : g;
  const NodeId lo = or_rec(f0, g0);
  const NodeId hi = or_rec(f1, g1);
  r = mk(v, lo, hi);
  cache_store(kOpOr, f, g, 0, r);
  return r;
}

NodeId Store::xor_rec(NodeId f, NodeId g) {
  if (f == g) return kFalse;
  if (f == kFalse) return g;
  if (g == kFalse) return f;
  if (f == kTrue) return not_rec(g);
  if (g == kTrue) return not_rec(f);
  if (f > g) std::swap(f, g);
  NodeId r;
  if (cache_lookup(kOpXor, f, g, 0, r)) return r;
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const Var v = std::min(nf.var, ng.var);
  const NodeId f0 = nf.var == v ? nf.lo : f, f1 = nf.var == v ? nf.hi : f;
  const NodeId g0 = ng.var == v ? ng.lo : g, g1 = ng.var == v ? ng.hi : g;
  const NodeId lo = xor_rec(f0, g0);
  const NodeId hi = xor_rec(f1, g1);
  r = mk(v, lo, hi);
  cache_store(kOpXor, f, g, 0, r);
  return r;
}

NodeId Store::apply_rec(BinaryOp op, NodeId f, NodeId g) {
  switch (op) {
    case BinaryOp::And: return and_rec(f, g);
    case BinaryOp::Or: return or_rec(f, g);
    case BinaryOp::Xor: return xor_rec(f, g);
    case BinaryOp::Diff: return and_rec(f, not_rec(g));
  }
  return kFalse;
}

NodeId Store::ite_rec(NodeId f, NodeId g, NodeId h) {
  if (f == kTrue) return g;
  if (f == kFalse) return h;
  if (g == h) return g;
  if (g == kTrue && h == kFalse) return f;
  if (g == kFalse && h == kTrue) return not_rec(f);
  if (g == kTrue) return or_rec(f, h);
  if (h == kFalse) return and_rec(f, g);
  NodeId r;
  if (cache_lookup(kOpIte, f, g, h, r)) return r;
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const Node nh = nodes_[h];
  const Var v = std::min({nf.var, ng.var, nh.var});
  const NodeId f0 = nf.var == v ? nf.lo : f, f1 = nf.var == v ? nf.hi : f;
  const NodeId g0 = ng.var == v ? ng.lo : g, g1 = ng.var == v ? ng.hi : g;
  const NodeId h0 = nh.var == v ? nh.lo : h, h1 = nh.var == v ? nh.hi : h;
  const NodeId lo = ite_rec(f0, g0, h0);
  const NodeId hi = ite_rec(f1, g1, h1);
  r = mk(v, lo, hi);
  cache_store(kOpIte, f, g, h, r);
  return r;
}

NodeId Store::exists_rec(NodeId f, NodeId cube) {
  if (f <= kTrue) return f;
  const Var fv = nodes_[f].var;
  while (cube != kTrue && nodes_[cube].var < fv) cube = nodes_[cube].hi;
  if (cube == kTrue) return f;
  NodeId r;
  if (cache_lookup(kOpExists, f, cube, 0, r)) return r;
  const Node nf = nodes_[f];
  if (nodes_[cube].var == fv) {
    const NodeId rest = nodes_[cube].hi;
    const NodeId lo = exists_rec(nf.lo, rest);
    if (lo == kTrue) {
      r = kTrue;
    } else {
      const NodeId hi = exists_rec(nf.hi, rest);
      r = or_rec(lo, hi);
    }
  } else {
    const NodeId lo = exists_rec(nf.lo, cube);
    const NodeId hi = exists_rec(nf.hi, cube);
    r = mk(fv, lo, hi);
  }
  cache_store(kOpExists, f, cube, 0, r);
  return r;
}

NodeId Store::forall_rec(NodeId f, NodeId cube) {
  if (f <= kTrue) return f;
  const Var fv = nodes_[f].var;
  while (cube != kTrue && nodes_[cube].var < fv) cube = nodes_[cube].hi;
  if (cube == kTrue) return f;
  NodeId r;
  if (cache_lookup(kOpForall, f, cube, 0, r)) return r;
  const Node nf = nodes_[f];
  if (nodes_[cube].var == fv) {
    const NodeId rest = nodes_[cube].hi;
    const NodeId lo = forall_rec(nf.lo, rest);
    if (lo == kFalse) {
      r = kFalse;
    } else {
      const NodeId hi = forall_rec(nf.hi, rest);
      r = and_rec(lo, hi);
    }
  } else {
    const NodeId lo = forall_rec(nf.lo, cube);
    const NodeId hi = forall_rec(nf.hi, cube);
    r = mk(fv, lo, hi);
  }
  cache_store(kOpForall, f, cube, 0, r);
  return r;
}

NodeId Store::and_exists_rec(NodeId f, NodeId g, NodeId cube) {
  if (f == kFalse || g == kFalse) return kFalse;
  if (f == kTrue && g == kTrue) return kTrue;
  if (f == kTrue) return exists_rec(g, cube);
  if (g == kTrue || f == g) return exists_rec(f, cube);
  if (f > g) std::swap(f, g);
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const Var v = std::min(nf.var, ng.var);
  while (cube != kTrue && nodes_[cube].var < v) cube = nodes_[cube].hi;
  if (cube == kTrue) return and_rec(f, g);
  NodeId r;
  if (cache_lookup(kOpAndExists, f, g, cube, r)) return r;
  const NodeId f0 = nf.var == v ? nf.lo : f, f1 = nf.var == v ? nf.hi : f;
  const NodeId g0 = ng.var == v ? ng.lo : g, g1 = ng.var == v ? ng.hi : g;
  if (nodes_[cube].var == v) {
    const NodeId rest = nodes_[cube].hi;
    const NodeId lo = and_exists_rec(f0, g0, rest);
    if (lo == kTrue) {
      r = kTrue;
    } else {
      const NodeId hi = and_exists_rec(f1, g1, rest);
      r = or_rec(lo, hi);
    }
  } else {
    const NodeId lo = and_exists_rec(f0, g0, cube);
    const NodeId hi = and_exists_rec(f1, g1, cube);
    r = mk(v, lo, hi);
  }
  cache_store(kOpAndExists, f, g, cube, r);
  return r;
}

NodeId Store::cube_rec(const std::vector<Var>& sorted) {
  NodeId r = kTrue;
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) r = mk(*it, kFalse, r);
  return r;
}

// --- public operations -----------------------------------------------------

Bdd Store::apply(BinaryOp op, const Bdd& f, const Bdd& g) {
  enter("apply");
  return Bdd(this, apply_rec(op, f.id(), g.id()));
}

Bdd Store::negate(const Bdd& f) {
  enter("negate");
  return Bdd(this, not_rec(f.id()));
}

Bdd Store::ite(const Bdd& f, const Bdd& g, const Bdd& h) {
  enter("ite");
  return Bdd(this, ite_rec(f.id(), g.id(), h.id()));
}

Bdd Store::cube(const std::vector<Var>& vars) {
  enter("cube");
  std::vector<Var> sorted(vars);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return Bdd(this, cube_rec(sorted));
}

Bdd Store::minterm(const std::vector<Var>& vars, const std::vector<bool>& values) {
  enter("minterm");
  std::vector<std::pair<Var, bool>> lits;
  for (std::size_t i = 0; i < vars.size(); ++i) lits.emplace_back(vars[i], values.at(i));
  std::sort(lits.begin(), lits.end());
  NodeId r = kTrue;
  for (auto it = lits.rbegin(); it != lits.rend(); ++it) {
    r = it->second ? mk(it->first, kFalse, r) : mk(it->first, r, kFalse);
  }
  return Bdd(this, r);
}

Bdd Store::quantify(Quantifier kind, const std::vector<Var>& vars, const Bdd& f) {
  enter(kind == Quantifier::Exists ? "exists" : "forall");
  std::vector<Var> sorted(vars);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const Bdd c(this, cube_rec(sorted));
  const NodeId r = kind == Quantifier::Exists ? exists_rec(f.id(), c.id()) : forall_rec(f.id(), c.id());
  return Bdd(this, r);
}

Bdd Store::and_exists(const Bdd& f, const Bdd& g, const std::vector<Var>& vars) {
  enter("and_exists");
  std::vector<Var> sorted(vars);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const Bdd c(this, cube_rec(sorted));
  return Bdd(this, and_exists_rec(f.id(), g.id(), c.id()));
}

Bdd Store::vector_compose(const Bdd& f, const std::map<Var, Bdd>& substitution) {
  enter("compose");
  std::vector<NodeId> sub(var_names_.size(), kNil);
  for (const auto& [v, g] : substitution) sub.at(v) = g.id();
  std::unordered_map<NodeId, NodeId> memo;
  std::function<NodeId(NodeId)> rec = [&](NodeId n) -> NodeId {
    if (n <= kTrue) return n;
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    const Node node = nodes_[n];
    const NodeId lo = rec(node.lo);
    const NodeId hi = rec(node.hi);
    const NodeId s = sub[node.var] == kNil ? mk(node.var, kFalse, kTrue) : sub[node.var];
    const NodeId r = ite_rec(s, hi, lo);
    memo.emplace(n, r);
    return r;
  };
  return Bdd(this, rec(f.id()));
}

Bdd Store::restrict(const Bdd& f, Var v, bool value) { return restrict(f, std::vector<Var>{v}, std::vector<bool>{value}); }

Bdd Store::restrict(const Bdd& f, const std::vector<Var>& vars, const std::vector<bool>& values) {
  enter("restrict");
  std::vector<signed char> fixed(var_names_.size(), -1);
  for (std::size_t i = 0; i < vars.size(); ++i) fixed.at(vars[i]) = values.at(i) ? 1 : 0;
  std::unordered_map<NodeId, NodeId> memo;
  std::function<NodeId(NodeId)> rec = [&](NodeId n) -> NodeId {
    if (n <= kTrue) return n;
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    const Node node = nodes_[n];
    NodeId r;
    if (fixed[node.var] >= 0) {
      r = rec(fixed[node.var] ? node.hi : node.lo);
    } else {
      const NodeId lo = rec(node.lo);
      const NodeId hi = rec(node.hi);
      r = mk(node.var, lo, hi);
    }
    memo.emplace(n, r);
    return r;
  };
  return Bdd(this, rec(f.id()));
}

Bdd Store::rename(const Bdd& f, const std::map<Var, Var>& renaming) {
  enter("rename");
  std::unordered_map<NodeId, NodeId> memo;
  std::function<NodeId(NodeId)> rec = [&](NodeId n) -> NodeId {
    if (n <= kTrue) return n;
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    const Node node = nodes_[n];
    auto rn = renaming.find(node.var);
    const Var target = rn == renaming.end() ? node.var : rn->second;
    const NodeId lo = rec(node.lo);
    const NodeId hi = rec(node.hi);
    const NodeId r = ite_rec(mk(target, kFalse, kTrue), hi, lo);
    memo.emplace(n, r);
    return r;
  };
  return Bdd(this, rec(f.id()));
}

Bdd Store::import(const Store& source, const Bdd& f, const std::map<Var, Var>& var_map) {
  enter("import");
  std::unordered_map<NodeId, NodeId> memo;
  std::function<NodeId(NodeId)> rec = [&](NodeId n) -> NodeId {
    if (n <= kTrue) return n;
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    const Node node = source.nodes_[n];
    auto vm = var_map.find(node.var);
    if (vm == var_map.end()) {
      throw std::invalid_argument("import: unmapped variable " + source.var_name(node.var));
    }
    const NodeId lo = rec(node.lo);
    const NodeId hi = rec(node.hi);
    const NodeId r = ite_rec(mk(vm->second, kFalse, kTrue), hi, lo);
    memo.emplace(n, r);
    return r;
  };
  return Bdd(this, rec(f.id()));
}

bool Store::eval(const Bdd& f, const std::function<bool(Var)>& assignment) const {
  NodeId n = f.id();
  while (n > kTrue) n = assignment(nodes_[n].var) ? nodes_[n].hi : nodes_[n].lo;
  return n == kTrue;
}

bool Store::eval(const Bdd& f, const std::vector<bool>& assignment) const {
  NodeId n = f.id();
  while (n > kTrue) n = assignment.at(nodes_[n].var) ? nodes_[n].hi : nodes_[n].lo;
  return n == kTrue;
}

std::optional<std::vector<bool>> Store::pick_min_witness(const Bdd& f, const std::vector<Var>& vars) {
  if (f.is_false()) return std::nullopt;
  enter("pick");
  std::vector<bool> out;
  out.reserve(vars.size());
  Bdd g = f;
  for (const Var v : vars) {
    Bdd g0 = restrict(g, v, false);
    if (!g0.is_false()) {
      out.push_back(false);
      g = std::move(g0);
    } else {
      out.push_back(true);
      g = restrict(g, v, true);
    }
  }
  return out;
}

std::vector<Var> Store::support(const Bdd& f) const {
  std::unordered_set<NodeId> seen;
  std::vector<char> used(var_names_.size(), 0);
  std::vector<NodeId> stack{f.id()};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (n <= kTrue || !seen.insert(n).second) continue;
    used[nodes_[n].var] = 1;
    stack.push_back(nodes_[n].lo);
    stack.push_back(nodes_[n].hi);
  }
  std::vector<Var> out;
  for (Var v = 0; v < used.size(); ++v) {
    if (used[v]) out.push_back(v);
  }
  return out;
}

std::size_t Store::dag_size(const Bdd& f) const {
  std::unordered_set<NodeId> seen;
  std::vector<NodeId> stack{f.id()};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second || n <= kTrue) continue;
    stack.push_back(nodes_[n].lo);
    stack.push_back(nodes_[n].hi);
  }
  return seen.size();
}

double Store::sat_count(const Bdd& f, const std::vector<Var>& vars) const {
  std::vector<Var> sorted(vars);
  std::sort(sorted.begin(), sorted.end());
  std::unordered_map<Var, std::size_t> pos;
  for (std::size_t i = 0; i < sorted.size(); ++i) pos[sorted[i]] = i;
  const std::size_t n = sorted.size();
  std::unordered_map<NodeId, double> memo;
  auto level = [&](NodeId id) -> std::size_t {
    if (id <= kTrue) return n;
    auto it = pos.find(nodes_[id].var);
    if (it == pos.end()) throw std::invalid_argument("sat_count: support outside the given variables");
    return it->second;
  };
  // count(id) = models over the variables at positions >= level(id)
  std::function<double(NodeId)> count = [&](NodeId id) -> double {
    if (id == kFalse) return 0.0;
    if (id == kTrue) return 1.0;
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const std::size_t l = level(id);
    const NodeId lo = nodes_[id].lo, hi = nodes_[id].hi;
    const double c = count(lo) * std::ldexp(1.0, static_cast<int>(level(lo) - l - 1)) +
                     count(hi) * std::ldexp(1.0, static_cast<int>(level(hi) - l - 1));
    memo[id] = c;
    return c;
  };
  return count(f.id()) * std::ldexp(1.0, static_cast<int>(level(f.id())));
}

std::vector<std::vector<std::pair<Var, bool>>> Store::cubes(const Bdd& f) const {
  std::vector<std::vector<std::pair<Var, bool>>> out;
  std::vector<std::pair<Var, bool>> path;
  std::function<void(NodeId)> walk = [&](NodeId n) {
    if (n == kFalse) return;
    if (n == kTrue) {
      out.push_back(path);
      return;
    }
    path.emplace_back(nodes_[n].var, false);
    walk(nodes_[n].lo);
    path.back().second = true;
    walk(nodes_[n].hi);
    path.pop_back();
  };
  walk(f.id());
  return out;
}

std::string Store::to_formula(const Bdd& f) const {
  if (f.is_true()) return "true";
  if (f.is_false()) return "false";
  const auto cs = cubes(f);
  std::string out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out += " | ";
    const bool paren = cs.size() > 1 && cs[i].size() > 1;
    if (paren) out += "(";
    for (std::size_t j = 0; j < cs[i].size(); ++j) {
      if (j) out += " & ";
      if (!cs[i][j].second) out += "!";
      out += var_names_[cs[i][j].first];
    }
    if (paren) out += ")";
  }
  return out;
}

std::string Store::dump_stats() const {
  std::ostringstream os;
  os << "bdd: live=" << stats_.live_nodes << " peak=" << stats_.peak_nodes << " gc=" << stats_.gc_runs
     << " cache_hits=" << stats_.cache_hits << " cache_misses=" << stats_.cache_misses
     << " ops=" << stats_.top_level_ops << "\n";
  for (const auto& [kind, n] : stats_.ops_by_kind) os << "  " << kind << ": " << n << "\n";
  return os.str();
}

bool Store::check_invariants() const {
  std::set<std::tuple<Var, NodeId, NodeId>> triples;
  for (NodeId id = 2; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.var == kFreeVar) continue;
    if (n.lo == n.hi) return false;
    if (!(n.var < nodes_[n.lo].var) || !(n.var < nodes_[n.hi].var)) return false;
    if (!triples.emplace(n.var, n.lo, n.hi).second) return false;
  }
  return true;
}

}  // namespace oblsynth::bdd
