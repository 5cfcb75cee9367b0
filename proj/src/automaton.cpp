#include "oblsynth/automaton.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace oblsynth {

std::shared_ptr<bdd::Store> make_letter_store(const Alphabet& alphabet) {
  auto store = std::make_shared<bdd::Store>();
  for (const auto& a : alphabet.atoms()) store->new_var(a, bdd::VarRole::LetterAtom);
  return store;
}

bool eval_letter(const bdd::Store& store, bdd::NodeId guard, Letter letter) {
  while (guard > bdd::kTrue) {
    const bdd::Var v = store.node_var(guard);
    guard = ((letter >> v) & 1u) ? store.node_high(guard) : store.node_low(guard);
  }
  return guard == bdd::kTrue;
}

Automaton& Automaton::operator=(Automaton other) noexcept {
  std::swap(store, other.store);
  std::swap(alphabet, other.alphabet);
  std::swap(initial, other.initial);
  std::swap(edges, other.edges);
  std::swap(accepting, other.accepting);
  return *this;
}

std::size_t Automaton::edge_count() const {
  std::size_t n = 0;
  for (const auto& es : edges) n += es.size();
  return n;
}

StateId Automaton::add_state(bool is_accepting) {
  edges.emplace_back();
  accepting.push_back(is_accepting ? 1 : 0);
  return static_cast<StateId>(edges.size() - 1);
}

void Automaton::add_edge(StateId src, const bdd::Bdd& guard, StateId dst) {
  if (guard.is_false()) return;
  for (auto& e : edges[src]) {
    if (e.dst == dst) {
      e.guard |= guard;
      return;
    }
  }
  edges[src].push_back({guard, dst});
}

StateId Automaton::step(StateId q, Letter a) const {
  for (const auto& e : edges[q]) {
    if (eval_letter(*store, e.guard.id(), a)) return e.dst;
  }
  throw std::logic_error("incomplete automaton: state " + std::to_string(q) + " has no move on " +
                         alphabet.letter_to_string(a));
}

std::vector<StateId> Automaton::successors(StateId q) const {
  std::vector<StateId> out;
  for (const auto& e : edges[q]) out.push_back(e.dst);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<bdd::Var> Automaton::letter_vars() const {
  std::vector<bdd::Var> vars(alphabet.size());
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = static_cast<bdd::Var>(i);
  return vars;
}

bdd::Bdd Automaton::letter_bdd(Letter a) const {
  std::vector<bool> values(alphabet.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = (a >> i) & 1u;
  return store->minterm(letter_vars(), values);
}

std::string Automaton::guard_to_string(const bdd::Bdd& guard) const { return store->to_formula(guard); }

void Dwa::clear_annotations() {
  scc.clear();
  rank.clear();
  provenance.clear();
}

std::optional<std::string> check_deterministic_complete(const Automaton& a) {
  for (StateId q = 0; q < a.size(); ++q) {
    bdd::Bdd cover = a.store->bdd_false();
    const auto& es = a.edges[q];
    for (std::size_t i = 0; i < es.size(); ++i) {
      if (es[i].dst >= a.size()) return "state " + std::to_string(q) + " has an edge to a missing state";
      for (std::size_t j = i + 1; j < es.size(); ++j) {
        if (!(es[i].guard & es[j].guard).is_false()) {
          return "state " + std::to_string(q) + ": guards to " + std::to_string(es[i].dst) + " and " +
                 std::to_string(es[j].dst) + " overlap";
        }
      }
      cover |= es[i].guard;
    }
    if (!cover.is_true()) return "state " + std::to_string(q) + " is incomplete";
  }
  return std::nullopt;
}

namespace {

template <class A>
A renumber(const A& a, const std::vector<StateId>& order) {
  std::vector<StateId> index(a.size(), static_cast<StateId>(-1));
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = static_cast<StateId>(i);
  A out;
  out.store = a.store;
  out.alphabet = a.alphabet;
  out.initial = index[a.initial];
  for (const StateId q : order) {
    out.add_state(a.accepting[q]);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& e : a.edges[order[i]]) out.edges[i].push_back({e.guard, index[e.dst]});
  }
  return out;
}

std::vector<StateId> bfs_order(const Automaton& a) {
  std::vector<char> seen(a.size(), 0);
  std::vector<StateId> order{a.initial};
  seen[a.initial] = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& e : a.edges[order[i]]) {
      if (!seen[e.dst]) {
        seen[e.dst] = 1;
        order.push_back(e.dst);
      }
    }
  }
  return order;
}

}  // namespace

template <class A>
A trim(const A& a) {
  std::vector<StateId> order = bfs_order(a);
  std::sort(order.begin(), order.end());
  A out = renumber(a, order);
  if constexpr (std::is_same_v<A, Dwa>) {
    if (!a.provenance.empty()) {
      for (const StateId q : order) out.provenance.push_back(a.provenance[q]);
    }
  }
  return out;
}

template <class A>
A canonical_form(const A& a) {
  // Sort edges first so that BFS discovery order is canonical.
  A sorted = a;
  const auto vars = a.letter_vars();
  for (auto& es : sorted.edges) {
    std::vector<std::pair<std::vector<bool>, Edge>> keyed;
    for (auto& e : es) keyed.push_back({*a.store->pick_min_witness(e.guard, vars), e});
    std::sort(keyed.begin(), keyed.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    es.clear();
    for (auto& [k, e] : keyed) es.push_back(e);
  }
  A out = renumber(sorted, bfs_order(sorted));
  return out;
}

template Automaton trim(const Automaton&);
template Dfa trim(const Dfa&);
template Dwa trim(const Dwa&);
template Automaton canonical_form(const Automaton&);
template Dfa canonical_form(const Dfa&);
template Dwa canonical_form(const Dwa&);

bool isomorphic(const Automaton& a, const Automaton& b) {
  if (!(a.alphabet == b.alphabet)) return false;
  const Automaton ca = canonical_form(a);
  const Automaton cb = canonical_form(b);
  if (ca.size() != cb.size() || ca.accepting != cb.accepting) return false;
  std::map<bdd::Var, bdd::Var> identity;
  for (bdd::Var v = 0; v < a.alphabet.size(); ++v) identity[v] = v;
  for (StateId q = 0; q < ca.size(); ++q) {
    if (ca.edges[q].size() != cb.edges[q].size()) return false;
    for (std::size_t i = 0; i < ca.edges[q].size(); ++i) {
      const Edge& ea = ca.edges[q][i];
      const Edge& eb = cb.edges[q][i];
      if (ea.dst != eb.dst) return false;
      const bdd::Bdd gb = ca.store == cb.store ? eb.guard : ca.store->import(*cb.store, eb.guard, identity);
      if (ea.guard != gb) return false;
    }
  }
  return true;
}

std::vector<StateId> transition_table(const Automaton& a) {
  if (a.alphabet.size() > 16) throw std::invalid_argument("transition_table: alphabet too large");
  const std::uint64_t letters = a.alphabet.letter_count();
  std::vector<StateId> table(a.size() * letters);
  for (StateId q = 0; q < a.size(); ++q) {
    for (Letter l = 0; l < letters; ++l) table[q * letters + l] = a.step(q, l);
  }
  return table;
}

std::string to_dot(const Automaton& a, const std::string& name) {
  std::ostringstream out;
  out << "digraph " << name << " {\n  rankdir=LR;\n  init [shape=point];\n";
  for (StateId q = 0; q < a.size(); ++q) {
    out << "  " << q << " [shape=" << (a.accepting[q] ? "doublecircle" : "circle") << "];\n";
  }
  out << "  init -> " << a.initial << ";\n";
  for (StateId q = 0; q < a.size(); ++q) {
    for (const auto& e : a.edges[q]) {
      out << "  " << q << " -> " << e.dst << " [label=\"" << a.guard_to_string(e.guard) << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::size_t tarjan_scc(const std::vector<std::vector<StateId>>& succ, std::vector<int>& scc_of) {
  const std::size_t n = succ.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<StateId> stack;
  scc_of.assign(n, -1);
  int next_index = 0;
  int next_scc = 0;
  struct Frame {
    StateId v;
    std::size_t child;
  };
  std::vector<Frame> call;
  for (StateId root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.child < succ[f.v].size()) {
        const StateId w = succ[f.v][f.child++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const StateId v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        StateId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          scc_of[w] = next_scc;
        } while (w != v);
        ++next_scc;
      }
    }
  }
  return static_cast<std::size_t>(next_scc);
}

}  // namespace oblsynth
