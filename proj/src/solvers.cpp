#include "oblsynth/solvers.hpp"

#include <algorithm>
#include <deque>

#include "oblsynth/dfa.hpp"
#include "oblsynth/dwa.hpp"

namespace oblsynth {

const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::Buchi: return "buchi";
    case SolverKind::CoBuchi: return "cobuchi";
    case SolverKind::SafeReach: return "safereach";
    case SolverKind::Scc: return "scc";
    case SolverKind::Explicit: return "explicit";
  }
  return "?";
}

SolverKind parse_solver(const std::string& name) {
  for (auto k : {SolverKind::Buchi, SolverKind::CoBuchi, SolverKind::SafeReach, SolverKind::Scc, SolverKind::Explicit}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown solver '" + name + "' (expected buchi, cobuchi, safereach, scc or explicit)");
}

namespace {

bdd::Bdd cpre(const Arena& arena, const bdd::Bdd& w, SolveCounters* c) {
  if (c) ++c->cpre_calls;
  return cpre_s(arena, w);
}

struct OpMeter {
  const Arena& arena;
  std::uint64_t start;
  explicit OpMeter(const Arena& a) : arena(a), start(a.store->op_count()) {}
  std::uint64_t elapsed() const { return arena.store->op_count() - start; }
};

SolveResult finish(const Arena& arena, SolveResult r, const OpMeter& meter) {
  r.realizable = arena.contains(r.region, arena.init);
  r.counters.bdd_ops = meter.elapsed();
  return r;
}

/// SafeReach alternation inside `domain`; fills layers and the W-chain.
bdd::Bdd safe_reach_layers(const Arena& arena, const bdd::Bdd& domain, SolveResult& r) {
  bdd::Bdd w_even = arena.none();
  r.chain.push_back(w_even);
  const bdd::Bdd acc = arena.acc & domain;
  for (;;) {
    const bdd::Bdd w_odd = safe(arena, acc, w_even, &r.counters);
    r.layers.push_back({w_odd, LayerKind::Safety});
    const bdd::Bdd w_next = reach(arena, domain, w_odd, &r.counters, &r.layers);
    ++r.counters.outer_iters;
    r.chain.push_back(w_odd);
    r.chain.push_back(w_next);
    if (!w_even.implies(w_odd) || !w_odd.implies(w_next)) {
      throw WeaknessViolation("SafeReach chain is not monotone; the arena is not weak");
    }
    if (w_next == w_even) return w_next;
    w_even = w_next;
  }
}

/// Layers for a region computed by another solver.
void stratify(const Arena& arena, SolveResult& r) {
  SolveResult scratch;
  const bdd::Bdd got = safe_reach_layers(arena, r.region, scratch);
  if (got != r.region) throw WeaknessViolation("region cannot be stratified into safety/reachability layers");
  r.layers = std::move(scratch.layers);
}

}  // namespace

bdd::Bdd reach(const Arena& arena, const bdd::Bdd& w, const bdd::Bdd& t, SolveCounters* counters,
               std::vector<Layer>* layers) {
  bdd::Bdd x = t;
  for (;;) {
    const bdd::Bdd n = x | (w & cpre(arena, x, counters));
    if (n == x) return x;
    x = n;
    if (counters) ++counters->inner_iters;
    if (layers) layers->push_back({x, LayerKind::Reachability});
  }
}

bdd::Bdd safe(const Arena& arena, const bdd::Bdd& w, const bdd::Bdd& t, SolveCounters* counters) {
  bdd::Bdd x = w | t;
  for (;;) {
    const bdd::Bdd n = t | (w & cpre(arena, x, counters));
    if (n == x) return x;
    x = n;
    if (counters) ++counters->inner_iters;
  }
}

SolveResult solve_buchi(const Arena& arena) {
  OpMeter meter(arena);
  SolveResult r;
  r.solver = SolverKind::Buchi;
  bdd::Bdd x = arena.all();
  for (;;) {
    const bdd::Bdd base = arena.acc & cpre(arena, x, &r.counters);
    bdd::Bdd y = arena.none();
    for (;;) {
      const bdd::Bdd n = base | cpre(arena, y, &r.counters);
      if (n == y) break;
      y = n;
      ++r.counters.inner_iters;
    }
    ++r.counters.outer_iters;
    if (y == x) break;
    x = y;
  }
  r.region = x;
  stratify(arena, r);
  return finish(arena, std::move(r), meter);
}

SolveResult solve_cobuchi(const Arena& arena) {
  OpMeter meter(arena);
  SolveResult r;
  r.solver = SolverKind::CoBuchi;
  bdd::Bdd x = arena.none();
  for (;;) {
    const bdd::Bdd escape = cpre(arena, x, &r.counters);
    if (!(escape - x).is_false()) r.layers.push_back({x | escape, LayerKind::Reachability});
    bdd::Bdd y = arena.all();
    for (;;) {
      const bdd::Bdd n = (arena.acc & cpre(arena, y, &r.counters)) | escape;
      if (n == y) break;
      y = n;
      ++r.counters.inner_iters;
    }
    y |= x;
    r.layers.push_back({y, LayerKind::Safety});
    ++r.counters.outer_iters;
    if (y == x) break;
    x = y;
  }
  r.region = x;
  return finish(arena, std::move(r), meter);
}

SolveResult solve_safereach(const Arena& arena) {
  OpMeter meter(arena);
  SolveResult r;
  r.solver = SolverKind::SafeReach;
  r.region = safe_reach_layers(arena, arena.all(), r);
  return finish(arena, std::move(r), meter);
}

SymbolicSccSet sym_scc_decompose(const Arena& arena, std::optional<bdd::Bdd> domain, bool with_edges) {
  // F is forward-closed and B backward-closed inside S, so emitting F\scc, scc, the rest,
  // then B\scc lists successors first without an explicit edge pass.
  struct Task {
    bdd::Bdd set;
    bool emit;
  };
  SymbolicSccSet result;
  std::vector<Task> work{{domain ? *domain : arena.reachable(), false}};
  while (!work.empty()) {
    const Task task = work.back();
    work.pop_back();
    if (task.set.is_false()) continue;
    if (task.emit) {
      result.sccs.push_back(task.set);
      continue;
    }
    const bdd::Bdd& s = task.set;
    const bdd::Bdd pivot = arena.state(*arena.store->pick_min_witness(s, arena.z));
    bdd::Bdd fwd = pivot;
    for (;;) {
      const bdd::Bdd n = fwd | (arena.image(fwd) & s);
      if (n == fwd) break;
      fwd = n;
    }
    bdd::Bdd bwd = pivot;
    for (;;) {
      const bdd::Bdd n = bwd | (arena.preimage(bwd) & s);
      if (n == bwd) break;
      bwd = n;
    }
    const bdd::Bdd scc = fwd & bwd;
    work.push_back({bwd - scc, false});
    work.push_back({s - (fwd | bwd), false});
    work.push_back({scc, true});
    work.push_back({fwd - scc, false});
  }
  if (with_edges) {
    for (std::size_t i = 0; i < result.sccs.size(); ++i) {
      bdd::Bdd out = arena.image(result.sccs[i]) - result.sccs[i];
      for (std::size_t j = i; j-- > 0 && !out.is_false();) {
        if (!(out & result.sccs[j]).is_false()) {
          result.edges.push_back({i, j});
          out = out - result.sccs[j];
        }
      }
    }
    std::sort(result.edges.begin(), result.edges.end());
  }
  return result;
}

SolveResult solve_weak_scc(const Arena& arena, const SymbolicSccSet& sccs) {
  OpMeter meter(arena);
  SolveResult r;
  r.solver = SolverKind::Scc;
  r.scc_count = sccs.sccs.size();
  bdd::Bdd w = arena.none();
  for (const bdd::Bdd& s : sccs.sccs) {
    const bdd::Bdd acc_part = s & arena.acc;
    bdd::Bdd x;
    if (acc_part == s) {
      x = safe(arena, s, w, &r.counters);
      if (x != w) r.layers.push_back({x, LayerKind::Safety});
    } else if (acc_part.is_false()) {
      x = reach(arena, s, w, &r.counters, &r.layers);
    } else {
      throw WeaknessViolation("SCC mixes accepting and rejecting states");
    }
    ++r.counters.outer_iters;
    w = x;
  }
  r.region = w;
  return finish(arena, std::move(r), meter);
}

namespace {

std::vector<std::vector<std::uint32_t>> predecessors(const ExplicitGame& g) {
  std::vector<std::vector<std::uint32_t>> pred(g.size());
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    for (const auto w : g.succ[v]) pred[w].push_back(v);
  }
  return pred;
}

/// Attractor of `target` for `player` inside `domain`; records attracting moves.
std::vector<char> attractor(const ExplicitGame& g, const std::vector<std::vector<std::uint32_t>>& pred, int player,
                            const std::vector<char>& target, const std::vector<char>& domain,
                            std::vector<std::int64_t>* strategy) {
  std::vector<char> in(g.size(), 0);
  std::vector<std::size_t> count(g.size(), 0);
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    if (!domain[v]) continue;
    for (const auto w : g.succ[v]) count[v] += domain[w] ? 1 : 0;
  }
  std::deque<std::uint32_t> queue;
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    if (domain[v] && target[v]) {
      in[v] = 1;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (const auto w : pred[u]) {
      if (!domain[w] || in[w]) continue;
      if (g.owner[w] == player) {
        in[w] = 1;
        if (strategy) (*strategy)[w] = u;
        queue.push_back(w);
      } else if (--count[w] == 0) {
        in[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return in;
}

/// Region where `player` visits `target` infinitely often.
std::vector<char> buchi_region(const ExplicitGame& g, const std::vector<std::vector<std::uint32_t>>& pred, int player,
                               const std::vector<char>& target, std::vector<std::int64_t>* strategy) {
  std::vector<char> domain(g.size(), 1);
  for (;;) {
    std::vector<char> goal(g.size(), 0);
    for (std::size_t v = 0; v < g.size(); ++v) goal[v] = domain[v] && target[v];
    std::vector<std::int64_t> strat(g.size(), -1);
    const auto r = attractor(g, pred, player, goal, domain, &strat);
    std::vector<char> trap(g.size(), 0);
    bool any = false;
    for (std::size_t v = 0; v < g.size(); ++v) {
      trap[v] = domain[v] && !r[v];
      any = any || trap[v];
    }
    if (!any) {
      if (strategy) {
        strategy->assign(g.size(), -1);
        for (std::size_t v = 0; v < g.size(); ++v) {
          if (!domain[v] || g.owner[v] != player) continue;
          if (goal[v]) {
            for (const auto w : g.succ[v]) {
              if (domain[w]) {
                (*strategy)[v] = w;
                break;
              }
            }
          } else {
            (*strategy)[v] = strat[v];
          }
        }
      }
      return domain;
    }
    const auto lost = attractor(g, pred, 1 - player, trap, domain, nullptr);
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (lost[v]) domain[v] = 0;
    }
  }
}

}  // namespace

ExplicitSolution explicit_oracle_solve(const ExplicitGame& game, Objective objective) {
  const auto pred = predecessors(game);
  ExplicitSolution sol;
  if (objective == Objective::CoBuchi) {
    std::vector<char> rejecting(game.size());
    for (std::size_t v = 0; v < game.size(); ++v) rejecting[v] = !game.accepting[v];
    const auto env = buchi_region(game, pred, 1, rejecting, nullptr);
    sol.system_wins.resize(game.size());
    for (std::size_t v = 0; v < game.size(); ++v) sol.system_wins[v] = !env[v];
    sol.strategy.assign(game.size(), -1);
    return sol;
  }
  std::vector<char> accepting(game.accepting.begin(), game.accepting.end());
  sol.system_wins = buchi_region(game, pred, 0, accepting, &sol.strategy);
  return sol;
}

std::vector<char> project_region(const Arena& arena, const ExplicitGame& game, const bdd::Bdd& set) {
  std::vector<char> out(game.state_nodes);
  for (std::size_t q = 0; q < game.state_nodes; ++q) out[q] = arena.contains(set, game.codes[q]);
  return out;
}

SolveResult solve(const Arena& arena, SolverKind kind) {
  switch (kind) {
    case SolverKind::Buchi: return solve_buchi(arena);
    case SolverKind::CoBuchi: return solve_cobuchi(arena);
    case SolverKind::SafeReach: return solve_safereach(arena);
    case SolverKind::Scc: return solve_weak_scc(arena, sym_scc_decompose(arena, std::nullopt, false));
    case SolverKind::Explicit: {
      OpMeter meter(arena);
      const ExplicitGame game = to_explicit(arena);
      const ExplicitSolution sol = explicit_oracle_solve(game, Objective::Weak);
      SolveResult r;
      r.solver = SolverKind::Explicit;
      r.region = arena.none();
      for (std::size_t q = 0; q < game.state_nodes; ++q) {
        if (sol.system_wins[q]) r.region |= arena.state(game.codes[q]);
      }
      stratify(arena, r);
      return finish(arena, std::move(r), meter);
    }
  }
  throw std::logic_error("unknown solver");
}

LtlfSynthesis synth_ltlf(const LtlfFormula& phi, const VariablePartition& partition) {
  const Alphabet alphabet = partition.alphabet();
  const Dfa dfa = minimize_dfa(compile_dfa(phi, alphabet));
  const Dwa dwa = minimize_dwa(build_component(PrefixQuantifier::Exists, dfa));
  LtlfSynthesis out{build_arena(dwa, partition), {}};
  const Arena& arena = out.arena;
  OpMeter meter(arena);
  SolveResult r;
  r.solver = SolverKind::SafeReach;
  // The accepting sink is a safety layer; everything else must reach it.
  r.layers.push_back({arena.acc, LayerKind::Safety});
  r.region = reach(arena, arena.all(), arena.acc, &r.counters, &r.layers);
  r.counters.outer_iters = 1;
  out.result = finish(arena, std::move(r), meter);
  return out;
}

}  // namespace oblsynth
