#include "oblsynth/strategy.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <sstream>

namespace oblsynth {

MooreStrategy& MooreStrategy::operator=(MooreStrategy other) noexcept {
  std::swap(inputs, other.inputs);
  std::swap(outputs, other.outputs);
  std::swap(store, other.store);
  std::swap(states, other.states);
  std::swap(initial, other.initial);
  return *this;
}

std::uint32_t MooreStrategy::step(std::uint32_t s, Letter inputs_letter) const {
  for (const auto& e : states.at(s).edges) {
    if (eval_letter(*store, e.guard.id(), inputs_letter)) return e.dst;
  }
  throw std::logic_error("strategy has no edge for an input letter");
}

Letter MooreStrategy::letter(std::uint32_t s, Letter inputs_letter) const {
  return states.at(s).output | (inputs_letter << outputs.size());
}

std::vector<bdd::Var> MooreStrategy::input_vars() const {
  std::vector<bdd::Var> v(inputs.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<bdd::Var>(i);
  return v;
}

namespace {

std::shared_ptr<bdd::Store> make_input_store(const std::vector<std::string>& inputs) {
  auto store = std::make_shared<bdd::Store>();
  for (const auto& name : inputs) store->new_var(name, bdd::VarRole::EnvironmentInput);
  return store;
}

std::size_t layer_of(const Arena& arena, const SolveResult& result, const std::vector<bool>& code) {
  for (std::size_t j = 0; j < result.layers.size(); ++j) {
    if (arena.contains(result.layers[j].set, code)) return j;
  }
  throw std::logic_error("state of the winning region is in no layer");
}

}  // namespace

MooreStrategy extract_strategy(const Arena& arena, const SolveResult& result) {
  if (!arena.contains(result.region, arena.init)) {
    throw NotRealizableError("initial state is outside the winning region");
  }
  bdd::Store& s = *arena.store;
  MooreStrategy strat;
  strat.inputs = arena.partition.inputs;
  strat.outputs = arena.partition.outputs;
  strat.store = make_input_store(strat.inputs);
  std::map<bdd::Var, bdd::Var> input_map;
  for (std::size_t i = 0; i < arena.y.size(); ++i) input_map[arena.y[i]] = static_cast<bdd::Var>(i);

  std::map<std::size_t, bdd::Bdd> composed;  // target layer -> target o delta
  auto target_of = [&](std::size_t j) -> const bdd::Bdd& {
    auto it = composed.find(j);
    if (it != composed.end()) return it->second;
    const Layer& layer = result.layers[j];
    bdd::Bdd target;
    if (layer.kind == LayerKind::Safety) {
      target = layer.set;
    } else if (j == 0) {
      throw std::logic_error("reachability layer without a predecessor");
    } else {
      target = result.layers[j - 1].set;
    }
    return composed.emplace(j, arena.compose_next(target)).first->second;
  };

  std::map<std::vector<bool>, std::uint32_t> ids;
  std::deque<std::uint32_t> queue;
  auto intern = [&](const std::vector<bool>& code) {
    auto [it, fresh] = ids.emplace(code, static_cast<std::uint32_t>(strat.states.size()));
    if (fresh) {
      StrategyState st;
      st.code = code;
      strat.states.push_back(std::move(st));
      queue.push_back(it->second);
    }
    return it->second;
  };
  strat.initial = intern(arena.init);

  while (!queue.empty()) {
    const std::uint32_t id = queue.front();
    queue.pop_front();
    const std::vector<bool> code = strat.states[id].code;
    const std::size_t j = layer_of(arena, result, code);
    const bdd::Bdd f = s.restrict(target_of(j), arena.z, code);
    const bdd::Bdd good = s.forall(arena.y, f);
    const auto xv = s.pick_min_witness(good, arena.x);
    if (!xv) throw std::logic_error("no output keeps the play inside the layers");

    Letter out = 0;
    for (std::size_t i = 0; i < xv->size(); ++i) {
      if ((*xv)[i]) out |= Letter{1} << i;
    }
    std::vector<bdd::Var> zx = arena.z;
    zx.insert(zx.end(), arena.x.begin(), arena.x.end());
    std::vector<bool> zxv = code;
    zxv.insert(zxv.end(), xv->begin(), xv->end());

    // Split the input space by the value of every next-state bit.
    std::vector<std::pair<bdd::Bdd, std::vector<bool>>> cells{{arena.all(), {}}};
    for (const bdd::Bdd& nb : arena.next) {
      const bdd::Bdd h = s.restrict(nb, zx, zxv);
      std::vector<std::pair<bdd::Bdd, std::vector<bool>>> split;
      for (auto& [g, bits] : cells) {
        for (const bool v : {false, true}) {
          const bdd::Bdd c = g & (v ? h : !h);
          if (c.is_false()) continue;
          auto b = bits;
          b.push_back(v);
          split.emplace_back(c, std::move(b));
        }
      }
      cells = std::move(split);
    }
    std::vector<StrategyEdge> edges;
    for (auto& [g, bits] : cells) {
      const std::uint32_t dst = intern(bits);
      edges.push_back({strat.store->import(s, g, input_map), dst});
    }
    StrategyState& st = strat.states[id];
    st.output = out;
    st.edges = std::move(edges);
    st.accepting = arena.contains(arena.acc, code);
    st.layer = j;
    st.kind = result.layers[j].kind;
  }
  return strat;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Verified: return "verified";
    case Verdict::BoundedVerified: return "bounded-verified";
    case Verdict::Failed: return "failed";
  }
  return "?";
}

namespace {

struct SpecView {
  std::vector<const Automaton*> parts;
  std::function<bool(const std::vector<StateId>&)> accepting;
};

struct SpecEdge {
  bdd::Bdd guard;  // in the strategy store
  StateId dst;
};

std::optional<std::string> check_complete(const MooreStrategy& strat) {
  for (std::size_t s = 0; s < strat.size(); ++s) {
    bdd::Bdd cover = strat.store->bdd_false();
    for (const auto& e : strat.states[s].edges) {
      if (!(cover & e.guard).is_false()) return "state " + std::to_string(s) + " has overlapping input guards";
      if (e.dst >= strat.size()) return "state " + std::to_string(s) + " has an edge to a missing state";
      cover |= e.guard;
    }
    if (!cover.is_true()) return "state " + std::to_string(s) + " does not cover every input";
  }
  return std::nullopt;
}

/// Layer ranking: reachability states strictly descend, safety states never climb and
/// stay in their layer only through accepting states.
std::optional<std::string> check_ranking(const MooreStrategy& strat) {
  for (std::size_t s = 0; s < strat.size(); ++s) {
    const auto& st = strat.states[s];
    for (const auto& e : st.edges) {
      const auto& d = strat.states[e.dst];
      const bool ok = st.kind == LayerKind::Reachability
                          ? d.layer < st.layer
                          : (d.layer < st.layer || (d.layer == st.layer && d.accepting));
      if (!ok) return "layer ranking broken on edge " + std::to_string(s) + " -> " + std::to_string(e.dst);
    }
  }
  return std::nullopt;
}

VerifyResult verify_product(const MooreStrategy& strat, const SpecView& spec, const VerifyOptions& options) {
  VerifyResult res;
  if (auto err = check_complete(strat)) {
    res.message = *err;
    return res;
  }
  const std::size_t k = spec.parts.size();

  // Spec guards restricted to each output letter and moved into the strategy store.
  std::vector<std::vector<bdd::Var>> out_vars(k);
  std::vector<std::vector<int>> out_index(k);
  std::vector<std::map<bdd::Var, bdd::Var>> in_map(k);
  for (std::size_t c = 0; c < k; ++c) {
    const Alphabet& ab = spec.parts[c]->alphabet;
    for (std::size_t j = 0; j < ab.size(); ++j) {
      const auto& name = ab.atom(j);
      auto o = std::find(strat.outputs.begin(), strat.outputs.end(), name);
      auto i = std::find(strat.inputs.begin(), strat.inputs.end(), name);
      if (o != strat.outputs.end()) {
        out_vars[c].push_back(static_cast<bdd::Var>(j));
        out_index[c].push_back(static_cast<int>(o - strat.outputs.begin()));
      } else if (i != strat.inputs.end()) {
        in_map[c][static_cast<bdd::Var>(j)] = static_cast<bdd::Var>(i - strat.inputs.begin());
      } else {
        out_vars[c].push_back(static_cast<bdd::Var>(j));
        out_index[c].push_back(-1);  // unknown atom: always false
      }
    }
  }
  std::map<std::tuple<std::size_t, StateId, Letter>, std::vector<SpecEdge>> cache;
  auto spec_edges = [&](std::size_t c, StateId q, Letter out) -> const std::vector<SpecEdge>& {
    const auto key = std::make_tuple(c, q, out);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const Automaton& a = *spec.parts[c];
    std::vector<bool> vals;
    for (const int idx : out_index[c]) vals.push_back(idx >= 0 && ((out >> idx) & 1));
    std::vector<SpecEdge> edges;
    for (const auto& e : a.edges[q]) {
      const bdd::Bdd r = a.store->restrict(e.guard, out_vars[c], vals);
      if (r.is_false()) continue;
      edges.push_back({strat.store->import(*a.store, r, in_map[c]), e.dst});
    }
    return cache.emplace(key, std::move(edges)).first->second;
  };

  using Node = std::vector<StateId>;  // strategy state, then one state per spec part
  std::map<Node, std::uint32_t> ids;
  std::vector<Node> nodes;
  std::vector<std::vector<std::pair<std::uint32_t, Letter>>> succ;
  std::deque<std::uint32_t> queue;
  auto intern = [&](Node n) {
    auto [it, fresh] = ids.emplace(n, static_cast<std::uint32_t>(nodes.size()));
    if (fresh) {
      nodes.push_back(std::move(n));
      succ.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  };
  Node init{strat.initial};
  for (const auto* a : spec.parts) init.push_back(a->initial);
  intern(init);
  const auto ivars = strat.input_vars();

  while (!queue.empty()) {
    if (nodes.size() > options.max_product_states) {
      res.product_states = nodes.size();
      if (auto err = check_ranking(strat)) {
        res.message = "product exceeds the cap and " + *err;
        return res;
      }
      res.verdict = Verdict::BoundedVerified;
      res.message = "product exceeds the cap; layer ranking checked";
      return res;
    }
    const std::uint32_t id = queue.front();
    queue.pop_front();
    const Node cur = nodes[id];
    const auto& st = strat.states[cur[0]];
    for (const auto& e : st.edges) {
      std::vector<std::pair<bdd::Bdd, Node>> cells{{e.guard, Node{e.dst}}};
      for (std::size_t c = 0; c < k; ++c) {
        std::vector<std::pair<bdd::Bdd, Node>> split;
        for (auto& [g, partial] : cells) {
          for (const auto& se : spec_edges(c, cur[c + 1], st.output)) {
            const bdd::Bdd cg = g & se.guard;
            if (cg.is_false()) continue;
            Node n = partial;
            n.push_back(se.dst);
            split.emplace_back(cg, std::move(n));
          }
        }
        cells = std::move(split);
      }
      for (auto& [g, n] : cells) {
        const auto w = strat.store->pick_min_witness(g, ivars);
        Letter in = 0;
        for (std::size_t i = 0; i < w->size(); ++i) {
          if ((*w)[i]) in |= Letter{1} << i;
        }
        const std::uint32_t d = intern(std::move(n));
        succ[id].push_back({d, strat.letter(cur[0], in)});
      }
    }
  }
  res.product_states = nodes.size();

  std::vector<char> acc(nodes.size());
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    acc[v] = spec.accepting(Node(nodes[v].begin() + 1, nodes[v].end()));
  }
  // A cycle through rejecting nodes only is a losing play.
  std::vector<std::vector<StateId>> rej(nodes.size());
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (acc[v]) continue;
    for (const auto& [w, l] : succ[v]) {
      if (!acc[w]) rej[v].push_back(w);
    }
  }
  std::vector<int> scc_of;
  const std::size_t nscc = tarjan_scc(rej, scc_of);
  std::vector<std::size_t> scc_size(nscc, 0);
  for (std::size_t v = 0; v < nodes.size(); ++v) ++scc_size[scc_of[v]];
  std::optional<std::uint32_t> bad;
  for (std::uint32_t v = 0; v < nodes.size() && !bad; ++v) {
    if (acc[v]) continue;
    if (scc_size[scc_of[v]] > 1) bad = v;
    for (const auto w : rej[v]) {
      if (w == v) bad = v;
    }
  }
  if (!bad) {
    res.verdict = Verdict::Verified;
    return res;
  }

  // Counterexample: shortest stem to the bad node, then a cycle inside its SCC.
  auto bfs = [&](std::uint32_t from, std::uint32_t to, bool inside) {
    std::vector<std::int64_t> parent(nodes.size(), -1);
    std::vector<Letter> via(nodes.size(), 0);
    std::vector<char> seen(nodes.size(), 0);
    std::deque<std::uint32_t> q{from};
    seen[from] = 1;
    std::optional<std::pair<std::uint32_t, Letter>> into;
    while (!q.empty() && !into) {
      const auto v = q.front();
      q.pop_front();
      for (const auto& [w, l] : succ[v]) {
        if (inside && (acc[w] || scc_of[w] != scc_of[to])) continue;
        if (w == to) {
          into = std::make_pair(v, l);
          break;
        }
        if (seen[w]) continue;
        seen[w] = 1;
        parent[w] = v;
        via[w] = l;
        q.push_back(w);
      }
    }
    std::vector<Letter> path{into->second};
    for (auto v = into->first; v != from; v = static_cast<std::uint32_t>(parent[v])) path.push_back(via[v]);
    std::reverse(path.begin(), path.end());
    return path;
  };
  FiniteTrace stem;
  if (*bad != 0) stem.letters = bfs(0, *bad, false);
  FiniteTrace loop;
  loop.letters = bfs(*bad, *bad, true);
  res.counterexample = Lasso(stem, loop);
  res.message = "a play cycles through rejecting states only";
  return res;
}

}  // namespace

VerifyResult verify_strategy(const MooreStrategy& strategy, const Dwa& spec, const VerifyOptions& options) {
  SpecView view;
  view.parts.push_back(&spec);
  view.accepting = [&](const std::vector<StateId>& t) { return spec.accepting[t[0]] != 0; };
  return verify_product(strategy, view, options);
}

VerifyResult verify_strategy(const MooreStrategy& strategy, const ComponentList& spec, const VerifyOptions& options) {
  SpecView view;
  for (const auto& c : spec.components) view.parts.push_back(&c);
  view.accepting = [&](const std::vector<StateId>& t) {
    std::vector<bool> bits(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) bits[i] = spec.components[i].accepting[t[i]] != 0;
    return spec.combiner.eval(bits);
  };
  return verify_product(strategy, view, options);
}

FiniteTrace simulate(const MooreStrategy& strategy, const std::vector<Letter>& inputs) {
  FiniteTrace t;
  std::uint32_t s = strategy.initial;
  for (const Letter in : inputs) {
    t.letters.push_back(strategy.letter(s, in));
    s = strategy.step(s, in);
  }
  return t;
}

namespace {

std::string bits_to_string(const std::vector<bool>& bits) {
  std::string s;
  for (const bool b : bits) s += b ? '1' : '0';
  return s.empty() ? "-" : s;
}

std::vector<bool> bits_from_string(const std::string& s) {
  std::vector<bool> bits;
  if (s == "-") return bits;
  for (const char c : s) {
    if (c != '0' && c != '1') throw SyntaxError("bad bit string '" + s + "'", 0, 0);
    bits.push_back(c == '1');
  }
  return bits;
}

bdd::Bdd boolean_to_bdd(const LtlfFormula& f, bdd::Store& store) {
  switch (f.kind()) {
    case LtlfKind::True: return store.bdd_true();
    case LtlfKind::False: return store.bdd_false();
    case LtlfKind::Atom: {
      const auto v = store.find_var(f.name());
      if (!v) throw SyntaxError("guard mentions unknown input '" + f.name() + "'", 0, 0);
      return store.var(*v);
    }
    case LtlfKind::Not: return !boolean_to_bdd(f.child(0), store);
    case LtlfKind::And: return boolean_to_bdd(f.child(0), store) & boolean_to_bdd(f.child(1), store);
    case LtlfKind::Or: return boolean_to_bdd(f.child(0), store) | boolean_to_bdd(f.child(1), store);
    default: throw SyntaxError("guard is not propositional: " + to_string(f), 0, 0);
  }
}

}  // namespace

std::string export_strategy(const MooreStrategy& strategy, const std::vector<std::string>& comments) {
  std::ostringstream os;
  os << ".strategy v1\n";
  for (const auto& c : comments) os << "# " << c << "\n";
  os << ".inputs";
  for (const auto& i : strategy.inputs) os << " " << i;
  os << "\n.outputs";
  for (const auto& o : strategy.outputs) os << " " << o;
  os << "\n.states " << strategy.size() << "\n.initial " << strategy.initial << "\n";
  for (std::size_t s = 0; s < strategy.size(); ++s) {
    const auto& st = strategy.states[s];
    std::vector<bool> out(strategy.outputs.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (st.output >> i) & 1;
    os << ".state " << s << " " << bits_to_string(out) << " " << bits_to_string(st.code) << " " << st.layer << " "
       << (st.kind == LayerKind::Safety ? "S" : "R") << " " << (st.accepting ? 1 : 0) << "\n";
  }
  for (std::size_t s = 0; s < strategy.size(); ++s) {
    for (const auto& e : strategy.states[s].edges) {
      os << ".edge " << s << " " << e.dst << " " << strategy.store->to_formula(e.guard) << "\n";
    }
  }
  os << ".end\n";
  return os.str();
}

MooreStrategy import_strategy(const std::string& text) {
  MooreStrategy strat;
  std::istringstream in(text);
  std::string line;
  bool header = false, ended = false, have_inputs = false;
  std::size_t n = 0;
  auto need_store = [&] {
    if (!strat.store) strat.store = make_input_store(strat.inputs);
  };
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string dir;
    if (!(ls >> dir)) continue;
    if (ended) throw SyntaxError("content after .end", lineno, 1);
    if (!header) {
      std::string ver;
      ls >> ver;
      if (dir != ".strategy" || ver != "v1") throw SyntaxError("missing '.strategy v1' header", lineno, 1);
      header = true;
      continue;
    }
    if (dir == ".inputs") {
      if (strat.store) throw SyntaxError(".inputs after states", lineno, 1);
      for (std::string a; ls >> a;) strat.inputs.push_back(a);
      have_inputs = true;
    } else if (dir == ".outputs") {
      for (std::string a; ls >> a;) strat.outputs.push_back(a);
    } else if (dir == ".states") {
      if (!(ls >> n)) throw SyntaxError("bad .states line", lineno, 1);
      need_store();
      strat.states.assign(n, {});
    } else if (dir == ".initial") {
      if (!(ls >> strat.initial) || strat.initial >= n) throw SyntaxError("bad .initial line", lineno, 1);
    } else if (dir == ".state") {
      std::size_t id = 0, layer = 0;
      std::string out, code, kind;
      int acc = 0;
      if (!(ls >> id >> out >> code >> layer >> kind >> acc) || id >= n) throw SyntaxError("bad .state line: " + line, lineno, 1);
      auto& st = strat.states[id];
      const auto ob = bits_from_string(out);
      if (ob.size() != strat.outputs.size()) throw SyntaxError("output width mismatch: " + line, lineno, 1);
      st.output = 0;
      for (std::size_t i = 0; i < ob.size(); ++i) {
        if (ob[i]) st.output |= Letter{1} << i;
      }
      st.code = bits_from_string(code);
      st.layer = layer;
      st.kind = kind == "R" ? LayerKind::Reachability : LayerKind::Safety;
      st.accepting = acc != 0;
    } else if (dir == ".edge") {
      std::size_t s = 0, d = 0;
      if (!(ls >> s >> d) || s >= n || d >= n) throw SyntaxError("bad .edge line: " + line, lineno, 1);
      std::string rest;
      std::getline(ls, rest);
      need_store();
      strat.states[s].edges.push_back({boolean_to_bdd(parse_ltlf(rest), *strat.store), static_cast<std::uint32_t>(d)});
    } else if (dir == ".end") {
      ended = true;
    } else {
      throw SyntaxError("unknown directive '" + dir + "'", lineno, 1);
    }
  }
  if (!header || !ended || !have_inputs || n == 0) throw SyntaxError("incomplete strategy file", lineno, 1);
  return strat;
}

std::string strategy_to_dot(const MooreStrategy& strategy) {
  std::ostringstream os;
  os << "digraph strategy {\n  rankdir=LR;\n  init [shape=point];\n  init -> s" << strategy.initial << ";\n";
  for (std::size_t s = 0; s < strategy.size(); ++s) {
    std::string label;
    for (std::size_t i = 0; i < strategy.outputs.size(); ++i) {
      if (!label.empty()) label += " ";
      label += ((strategy.states[s].output >> i) & 1) ? strategy.outputs[i] : "!" + strategy.outputs[i];
    }
    os << "  s" << s << " [shape=box,label=\"" << s << "\\n" << label << "\"];\n";
    for (const auto& e : strategy.states[s].edges) {
      os << "  s" << s << " -> s" << e.dst << " [label=\"" << strategy.store->to_formula(e.guard) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace oblsynth
