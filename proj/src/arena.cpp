#include "oblsynth/arena.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace oblsynth {

namespace {

std::size_t bits_for(std::size_t states) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < states) ++b;
  return b;
}

}  // namespace

Arena& Arena::operator=(Arena other) noexcept {
  std::swap(store, other.store);
  std::swap(partition, other.partition);
  std::swap(z, other.z);
  std::swap(zp, other.zp);
  std::swap(x, other.x);
  std::swap(y, other.y);
  std::swap(next, other.next);
  std::swap(next_map, other.next_map);
  std::swap(acc, other.acc);
  std::swap(component_acc, other.component_acc);
  std::swap(init, other.init);
  std::swap(encodings, other.encodings);
  std::swap(relation_, other.relation_);
  std::swap(reachable_, other.reachable_);
  return *this;
}

bdd::Bdd Arena::state(const std::vector<bool>& code) const { return store->minterm(z, code); }

bool Arena::contains(const bdd::Bdd& set, const std::vector<bool>& code) const {
  std::vector<bool> assignment(store->var_count(), false);
  for (std::size_t i = 0; i < z.size(); ++i) assignment[z[i]] = code[i];
  return store->eval(set, assignment);
}

std::vector<bool> Arena::encode(const std::vector<StateId>& tuple) const {
  std::vector<bool> code(z.size(), false);
  for (std::size_t c = 0; c < encodings.size(); ++c) {
    for (std::size_t j = 0; j < encodings[c].bits; ++j) code[encodings[c].first_bit + j] = (tuple[c] >> j) & 1u;
  }
  return code;
}

std::vector<StateId> Arena::decode(const std::vector<bool>& code) const {
  std::vector<StateId> tuple(encodings.size(), 0);
  for (std::size_t c = 0; c < encodings.size(); ++c) {
    for (std::size_t j = 0; j < encodings[c].bits; ++j) {
      if (code[encodings[c].first_bit + j]) tuple[c] |= StateId{1} << j;
    }
  }
  return tuple;
}

bdd::Bdd Arena::compose_next(const bdd::Bdd& w) const { return store->vector_compose(w, next_map); }

std::vector<bool> Arena::successor(const std::vector<bool>& code, Letter outputs, Letter inputs) const {
  std::vector<bool> assignment(store->var_count(), false);
  for (std::size_t i = 0; i < z.size(); ++i) assignment[z[i]] = code[i];
  for (std::size_t i = 0; i < x.size(); ++i) assignment[x[i]] = (outputs >> i) & 1u;
  for (std::size_t i = 0; i < y.size(); ++i) assignment[y[i]] = (inputs >> i) & 1u;
  std::vector<bool> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = store->eval(next[i], assignment);
  return out;
}

const bdd::Bdd& Arena::relation() const {
  if (!relation_) {
    try {
      bdd::Bdd t = store->bdd_true();
      for (std::size_t i = 0; i < z.size(); ++i) t &= !(store->var(zp[i]) ^ next[i]);
      std::vector<bdd::Var> xy(x);
      xy.insert(xy.end(), y.begin(), y.end());
      relation_ = store->exists(xy, t);
    } catch (const bdd::CapacityError& e) {
      throw RelationCapacityError(std::string("monolithic transition relation: ") + e.what());
    }
  }
  return *relation_;
}

bdd::Bdd Arena::image(const bdd::Bdd& s) const {
  std::map<bdd::Var, bdd::Var> unprime;
  for (std::size_t i = 0; i < z.size(); ++i) unprime[zp[i]] = z[i];
  return store->rename(store->and_exists(s, relation(), z), unprime);
}

bdd::Bdd Arena::preimage(const bdd::Bdd& s) const {
  std::vector<bdd::Var> xy(x);
  xy.insert(xy.end(), y.begin(), y.end());
  return store->exists(xy, compose_next(s));
}

bdd::Bdd Arena::reachable() const {
  if (!reachable_) {
    bdd::Bdd r = initial_state();
    for (;;) {
      bdd::Bdd n = r | image(r);
      if (n == r) break;
      r = n;
    }
    reachable_ = r;
  }
  return *reachable_;
}

double Arena::count_states(const bdd::Bdd& s) const { return store->sat_count(s, z); }

std::string Arena::dump() const {
  std::ostringstream out;
  out << "arena: " << z.size() << " state bits, " << x.size() << " outputs, " << y.size() << " inputs\n";
  for (bdd::Var v = 0; v < store->var_count(); ++v) {
    out << "  var " << v << " " << store->var_name(v) << " (" << bdd::to_string(store->var_role(v)) << ")\n";
  }
  for (std::size_t i = 0; i < next.size(); ++i) {
    out << "  next[" << store->var_name(z[i]) << "]: " << store->dag_size(next[i]) << " nodes\n";
  }
  out << "  acc: " << store->dag_size(acc) << " nodes\n";
  return out.str();
}

Arena build_arena(const ComponentList& list, const VariablePartition& partition, const ArenaOptions& options) {
  Arena arena;
  arena.store = std::make_shared<bdd::Store>(options.store);
  arena.partition = partition;
  bdd::Store& s = *arena.store;

  std::size_t total = 0;
  for (const auto& c : list.components) {
    ComponentEncoding enc;
    enc.first_bit = total;
    enc.states = c.size();
    enc.bits = bits_for(c.size());
    total += enc.bits;
    arena.encodings.push_back(enc);
  }
  if (total > options.max_state_bits) {
    throw EncodingOverflowError("arena needs " + std::to_string(total) + " state bits, budget is " +
                                std::to_string(options.max_state_bits));
  }
  for (std::size_t c = 0; c < list.components.size(); ++c) {
    for (std::size_t j = 0; j < arena.encodings[c].bits; ++j) {
      const std::string name = "z" + std::to_string(c) + "_" + std::to_string(j);
      arena.z.push_back(s.new_var(name, bdd::VarRole::StateBit));
      arena.zp.push_back(s.new_var(name + "'", bdd::VarRole::NextStateBit));
    }
  }
  std::map<std::string, bdd::Var> atom_var;
  for (const auto& o : partition.outputs) {
    arena.x.push_back(s.new_var(o, bdd::VarRole::SystemOutput));
    atom_var[o] = arena.x.back();
  }
  for (const auto& i : partition.inputs) {
    arena.y.push_back(s.new_var(i, bdd::VarRole::EnvironmentInput));
    atom_var[i] = arena.y.back();
  }

  arena.next.assign(total, s.bdd_false());
  for (std::size_t c = 0; c < list.components.size(); ++c) {
    const Dwa& d = list.components[c];
    const ComponentEncoding& enc = arena.encodings[c];
    std::map<bdd::Var, bdd::Var> var_map;
    for (std::size_t i = 0; i < d.alphabet.size(); ++i) {
      auto it = atom_var.find(d.alphabet.atom(i));
      if (it == atom_var.end()) throw PartitionError("atom '" + d.alphabet.atom(i) + "' is not in the partition");
      var_map[static_cast<bdd::Var>(i)] = it->second;
    }
    const std::vector<bdd::Var> bits(arena.z.begin() + enc.first_bit, arena.z.begin() + enc.first_bit + enc.bits);
    auto code = [&](StateId q) {
      std::vector<bool> v(enc.bits);
      for (std::size_t j = 0; j < enc.bits; ++j) v[j] = (q >> j) & 1u;
      return s.minterm(bits, v);
    };
    bdd::Bdd valid = s.bdd_false();
    bdd::Bdd acc = s.bdd_false();
    for (StateId q = 0; q < d.size(); ++q) {
      const bdd::Bdd cq = code(q);
      valid |= cq;
      if (d.accepting[q]) acc |= cq;
      std::vector<bdd::Bdd> to_one(enc.bits, s.bdd_false());
      for (const auto& e : d.edges[q]) {
        const bdd::Bdd g = s.import(*d.store, e.guard, var_map);
        for (std::size_t j = 0; j < enc.bits; ++j) {
          if ((e.dst >> j) & 1u) to_one[j] |= g;
        }
      }
      for (std::size_t j = 0; j < enc.bits; ++j) arena.next[enc.first_bit + j] |= cq & to_one[j];
    }
    for (std::size_t j = 0; j < enc.bits; ++j) {
      arena.next[enc.first_bit + j] |= (!valid) & s.var(bits[j]);
    }
    arena.component_acc.push_back(acc);
  }
  for (std::size_t i = 0; i < total; ++i) arena.next_map[arena.z[i]] = arena.next[i];
  arena.acc = list.combiner.fold<bdd::Bdd>([&](std::size_t i) { return arena.component_acc.at(i); },
                                           [](const bdd::Bdd& a, const bdd::Bdd& b) { return a & b; },
                                           [](const bdd::Bdd& a, const bdd::Bdd& b) { return a | b; });
  std::vector<StateId> init;
  for (const auto& c : list.components) init.push_back(c.initial);
  arena.init = arena.encode(init);
  return arena;
}

Arena build_arena(const Dwa& dwa, const VariablePartition& partition, const ArenaOptions& options) {
  ComponentList list;
  list.components.push_back(dwa);
  list.combiner = Combiner(ObligationFormula::exists(LtlfFormula::tt()));
  return build_arena(list, partition, options);
}

bdd::Bdd cpre_s(const Arena& arena, const bdd::Bdd& w) {
  return arena.store->exists(arena.x, arena.store->forall(arena.y, arena.compose_next(w)));
}

bdd::Bdd cpre_e(const Arena& arena, const bdd::Bdd& w) {
  return arena.store->forall(arena.x, arena.store->exists(arena.y, arena.compose_next(w)));
}

ExplicitGame to_explicit(const Arena& arena, const ExplicitOptions& options) {
  const std::size_t nx = arena.x.size(), ny = arena.y.size();
  if (nx + ny > options.max_letter_bits) {
    throw std::length_error("explicit game: " + std::to_string(nx + ny) + " letter bits exceed the cap");
  }
  const Letter xs = Letter{1} << nx, ys = Letter{1} << ny;

  std::map<std::vector<bool>, std::uint32_t> index;
  std::vector<std::vector<bool>> codes;
  auto intern = [&](const std::vector<bool>& c) {
    auto it = index.find(c);
    if (it != index.end()) return it->second;
    if (codes.size() >= options.max_states) {
      throw std::length_error("explicit game exceeds " + std::to_string(options.max_states) + " states");
    }
    const auto id = static_cast<std::uint32_t>(codes.size());
    index.emplace(c, id);
    codes.push_back(c);
    return id;
  };
  if (options.reachable_only) {
    intern(arena.init);
  } else {
    if (arena.z.size() >= 32 || (std::size_t{1} << arena.z.size()) > options.max_states) {
      throw std::length_error("explicit game: encoded state space exceeds the cap");
    }
    for (std::size_t v = 0; v < (std::size_t{1} << arena.z.size()); ++v) {
      std::vector<bool> c(arena.z.size());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = (v >> i) & 1u;
      intern(c);
    }
  }
  std::vector<std::vector<std::uint32_t>> moves;  // per state: xs*ys successors
  for (std::size_t q = 0; q < codes.size(); ++q) {
    std::vector<std::uint32_t> m(xs * ys);
    for (Letter xv = 0; xv < xs; ++xv) {
      for (Letter yv = 0; yv < ys; ++yv) {
        const std::vector<bool> c = codes[q];
        m[xv * ys + yv] = intern(arena.successor(c, xv, yv));
      }
    }
    moves.push_back(std::move(m));
  }

  ExplicitGame g;
  g.state_nodes = codes.size();
  g.choice_nodes = codes.size() * xs;
  g.response_nodes = codes.size() * xs * ys;
  g.codes = codes;
  const std::size_t total = g.state_nodes + g.choice_nodes + g.response_nodes;
  g.succ.resize(total);
  g.owner.assign(total, 1);
  g.accepting.assign(total, 0);
  g.initial = index.at(arena.init);
  for (std::size_t q = 0; q < codes.size(); ++q) {
    const char acc = arena.contains(arena.acc, codes[q]) ? 1 : 0;
    g.owner[q] = 0;
    g.accepting[q] = acc;
    for (Letter xv = 0; xv < xs; ++xv) {
      const std::size_t choice = g.state_nodes + q * xs + xv;
      g.succ[q].push_back(static_cast<std::uint32_t>(choice));
      g.accepting[choice] = acc;
      for (Letter yv = 0; yv < ys; ++yv) {
        const std::size_t resp = g.state_nodes + g.choice_nodes + (q * xs + xv) * ys + yv;
        g.succ[choice].push_back(static_cast<std::uint32_t>(resp));
        g.accepting[resp] = acc;
        g.succ[resp].push_back(moves[q][xv * ys + yv]);
      }
    }
  }
  return g;
}

}  // namespace oblsynth
