#include <gtest/gtest.h>

#include "oblsynth/oracle.hpp"
#include "oblsynth/random.hpp"
#include "oblsynth/solvers.hpp"
#include "test_util.hpp"

using namespace oblsynth;

namespace {

using O = ObligationFormula;

const VariablePartition kPart{{"y"}, {"x"}};

Arena arena_for(const char* spec, const VariablePartition& part = kPart) {
  O psi = to_pnf(parse_obligation(spec));
  PipelineResult r = compile_obligation(psi, part.alphabet());
  return build_arena(*r.automaton, part);
}

std::size_t explicit_scc_count(const ExplicitGame& g) {
  std::vector<std::vector<StateId>> succ(g.state_nodes);
  for (std::size_t q = 0; q < g.state_nodes; ++q)
    for (auto c : g.succ[q])
      for (auto r : g.succ[c]) succ[q].push_back(g.succ[r][0]);
  std::vector<int> scc;
  return tarjan_scc(succ, scc);
}

}  // namespace

TEST(Reach, Examples) {
  Arena a = arena_for("exists(F x)");
  SolveCounters c;
  EXPECT_EQ(reach(a, a.all(), a.all(), &c), a.all());
  EXPECT_EQ(c.inner_iters, 0u);
  EXPECT_TRUE(reach(a, a.none(), a.none()).is_false());
  // the system sets x and moves from the initial state into the accepting sink
  EXPECT_TRUE(a.contains(reach(a, a.all(), a.acc), a.init));
}

TEST(Safe, Examples) {
  Arena a = arena_for("exists(F x)");
  EXPECT_EQ(safe(a, a.all(), a.none()), a.all());
  EXPECT_TRUE(safe(a, a.none(), a.none()).is_false());
  EXPECT_EQ(safe(a, a.acc, a.none()), a.acc);
}

TEST(Buchi, TrivialAcceptance) {
  Arena all = arena_for("forall(true)");
  EXPECT_TRUE(solve_buchi(all).region.is_true());
  EXPECT_TRUE(solve_cobuchi(all).region.is_true());
  Arena none = arena_for("exists(false)");
  EXPECT_TRUE(solve_buchi(none).region.is_false());
  EXPECT_TRUE(solve_cobuchi(none).region.is_false());
}

TEST(SafeReach, EmptyAcceptance) {
  Arena a = arena_for("exists(false)");
  SolveResult r = solve_safereach(a);
  EXPECT_TRUE(r.region.is_false());
  for (const auto& w : r.chain) EXPECT_TRUE(w.is_false());
  EXPECT_LE(r.counters.outer_iters, 2u);
}

TEST(SafeReach, PureSafety) {
  Arena a = arena_for("forall(G x)");
  SolveResult r = solve_safereach(a);
  EXPECT_TRUE(r.realizable);
  // the first Safe already holds the whole region; the next round only confirms it
  ASSERT_GE(r.chain.size(), 2u);
  EXPECT_EQ(r.chain[1], r.region);
  EXPECT_LE(r.counters.outer_iters, 2u);
}

TEST(SafeReach, ChainIsMonotone) {
  Rng rng(83);
  for (int i = 0; i < 100; ++i) {
    RandomGame g = random_weak_game(rng, 32);
    Arena a = build_arena(g.list, g.partition);
    SolveResult r = solve_safereach(a);
    for (std::size_t k = 0; k + 1 < r.chain.size(); ++k) EXPECT_TRUE(r.chain[k].implies(r.chain[k + 1]));
    EXPECT_EQ(r.region, solve_buchi(a).region);
  }
}

TEST(Scc, Examples) {
  Arena fa = arena_for("exists(F x)");
  SymbolicSccSet s = sym_scc_decompose(fa);
  ASSERT_EQ(s.sccs.size(), 2u);
  // bottom-up: the accepting sink comes first
  EXPECT_TRUE(s.sccs[0].implies(fa.acc));
  EXPECT_TRUE((s.sccs[1] & fa.acc).is_false());
  EXPECT_EQ(s.edges, (std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}}));

  Arena one = arena_for("forall(true)");
  EXPECT_EQ(sym_scc_decompose(one).sccs.size(), 1u);
}

TEST(Scc, MatchesExplicitTarjan) {
  Rng rng(89);
  for (int i = 0; i < 100; ++i) {
    RandomGame g = random_weak_game(rng, 64);
    Arena a = build_arena(g.list, g.partition);
    SymbolicSccSet s = sym_scc_decompose(a);
    ExplicitGame eg = to_explicit(a);
    EXPECT_EQ(s.sccs.size(), explicit_scc_count(eg)) << g.description;
    bdd::Bdd all = a.none();
    for (const auto& c : s.sccs) {
      EXPECT_TRUE((all & c).is_false());
      all |= c;
    }
    EXPECT_EQ(all, a.reachable());
    for (auto [from, to] : s.edges) EXPECT_GT(from, to);
  }
}

TEST(Scc, SolverExamples) {
  Arena stay = arena_for("forall(G x)");
  SolveResult r = solve_weak_scc(stay, sym_scc_decompose(stay));
  EXPECT_TRUE(r.realizable);
  Arena trap = arena_for("exists(false)");
  EXPECT_TRUE(solve_weak_scc(trap, sym_scc_decompose(trap)).region.is_false());
}

TEST(Explicit, SelfLoop) {
  ExplicitGame g;
  g.state_nodes = 1;
  g.succ = {{0}};
  g.owner = {0};
  g.accepting = {1};
  for (Objective o : {Objective::Buchi, Objective::CoBuchi, Objective::Weak}) {
    EXPECT_EQ(explicit_oracle_solve(g, o).system_wins, std::vector<char>{1});
  }
  g.accepting = {0};
  EXPECT_EQ(explicit_oracle_solve(g, Objective::Buchi).system_wins, std::vector<char>{0});
}

TEST(Solvers, AgreeWithOracleOnSmallWeakGames) {
  Rng rng(97);
  for (int i = 0; i < 300; ++i) {
    RandomGame g = random_weak_game(rng, 6 + rng.below(3));
    GameCheck c = check_game(g);
    EXPECT_TRUE(c.ok) << c.detail << "\n" << g.description;
    EXPECT_TRUE(c.buchi_equals_cobuchi);
    EXPECT_TRUE(c.structure.ok());
  }
}

TEST(Solvers, BoundsOnBenchmarkArenas) {
  Arena a = arena_for("exists(F x) & forall(G(y -> x)) | exists(X! X! y)");
  SolveResult b = solve_buchi(a);
  std::size_t n = static_cast<std::size_t>(a.count_states(a.all()));
  EXPECT_LE(b.counters.outer_iters, n + 1);
  SolveResult s = solve(a, SolverKind::Scc);
  EXPECT_LE(s.counters.inner_iters, n);
  EXPECT_EQ(s.region, b.region);
}

TEST(SynthLtlf, Examples) {
  VariablePartition p{{"e1", "e2"}, {"a1", "a2"}};
  EXPECT_TRUE(synth_ltlf(parse_ltlf("(a1 | e1) & (a2 | e2)"), p).result.realizable);
  VariablePartition q{{"e"}, {"a"}};
  EXPECT_FALSE(synth_ltlf(parse_ltlf("e"), q).result.realizable);
  EXPECT_TRUE(synth_ltlf(parse_ltlf("true"), q).result.realizable);
}

TEST(SynthLtlf, EqualsExistentialPipeline) {
  VariablePartition p{{"e"}, {"a"}};
  Rng rng(101);
  for (int i = 0; i < 60; ++i) {
    LtlfFormula phi = random_ltlf(rng, 1 + rng.below(7), {"a", "e"});
    Arena full = build_arena(*compile_obligation(O::exists(phi), p.alphabet()).automaton, p);
    EXPECT_EQ(synth_ltlf(phi, p).result.realizable, solve_safereach(full).realizable) << to_string(phi);
  }
}

TEST(Solvers, ParseNames) {
  for (SolverKind k : {SolverKind::Buchi, SolverKind::CoBuchi, SolverKind::SafeReach, SolverKind::Scc,
                       SolverKind::Explicit})
    EXPECT_EQ(parse_solver(to_string(k)), k);
  EXPECT_THROW(parse_solver("parity"), std::invalid_argument);
}
