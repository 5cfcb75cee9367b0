#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "oblsynth/dwa.hpp"
#include "oblsynth/random.hpp"
#include "test_util.hpp"

using namespace oblsynth;
using testutil::trace;

namespace {

using F = LtlfFormula;
using O = ObligationFormula;

Dwa component(PrefixQuantifier q, const char* body, const Alphabet& ab,
              std::shared_ptr<bdd::Store> store = nullptr) {
  return build_component(q, minimize_dfa(compile_dfa(parse_ltlf(body), ab, store)));
}

Dwa exists_Fa(const Alphabet& ab, std::shared_ptr<bdd::Store> store = nullptr) {
  return component(PrefixQuantifier::Exists, "F a", ab, store);
}

void expect_language(const Dwa& d, const O& psi, const Alphabet& ab, std::size_t max_u, std::size_t max_v) {
  DfaClassifier cls = make_classifier(psi, ab);
  std::size_t bound = 1;
  for (const auto& dfa : cls.dfas()) bound = std::max(bound, dfa.size() + 1);
  testutil::for_each_lasso(ab.size(), max_u, max_v, [&](const Lasso& l) {
    ASSERT_EQ(dwa_accepts_lasso(d, l), testutil::obligation_holds(psi, ab, l, bound)) << to_string(psi);
  });
}

// Explicit DWA over {a} from successor pairs (on !a, on a).
Dwa table_dwa(const std::vector<std::pair<StateId, StateId>>& succ, const std::vector<bool>& acc) {
  Alphabet ab({"a"});
  Dwa d;
  d.store = make_letter_store(ab);
  d.alphabet = ab;
  for (bool b : acc) d.add_state(b);
  bdd::Bdd av = d.store->var(0);
  for (StateId q = 0; q < succ.size(); ++q) {
    d.add_edge(q, !av, succ[q].first);
    d.add_edge(q, av, succ[q].second);
  }
  return d;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(BuildComponent, Examples) {
  Alphabet ab({"a"});
  Dwa e = component(PrefixQuantifier::Exists, "F(a & X false)", ab);
  EXPECT_EQ(e.size(), 2u);
  expect_language(e, O::exists(parse_ltlf("F(a & X false)")), ab, 3, 3);

  Dwa g = component(PrefixQuantifier::Forall, "G a", ab);
  EXPECT_EQ(g.size(), 2u);
  expect_language(g, O::forall(parse_ltlf("G a")), ab, 3, 3);

  Dwa t = component(PrefixQuantifier::Exists, "true", ab);
  EXPECT_FALSE(t.accepting[t.initial]);
  testutil::for_each_lasso(1, 2, 2, [&](const Lasso& l) { EXPECT_TRUE(dwa_accepts_lasso(t, l)); });

  EXPECT_TRUE(check_weak(e).weak);
  EXPECT_TRUE(check_weak(g).weak);
}

TEST(BuildComponent, RandomAgainstLassoOracle) {
  Alphabet ab({"a", "b"});
  Rng rng(41);
  for (int i = 0; i < 80; ++i) {
    F phi = random_ltlf(rng, 1 + rng.below(6), ab.atoms());
    for (PrefixQuantifier q : {PrefixQuantifier::Exists, PrefixQuantifier::Forall}) {
      Dwa d = build_component(q, compile_dfa(phi, ab));
      EXPECT_TRUE(check_weak(d).weak);
      EXPECT_FALSE(check_deterministic_complete(d));
      expect_language(d, O::quantified(q, phi), ab, 3, 3);
    }
  }
}

TEST(BooleanOps, Examples) {
  Alphabet ab({"a", "b"});
  auto store = make_letter_store(ab);
  Dwa fa = exists_Fa(ab, store);
  Dwa gb = component(PrefixQuantifier::Forall, "G b", ab, store);
  EXPECT_TRUE(isomorphic(dwa_not(dwa_not(fa)), fa));
  Dwa aa = dwa_and(fa, fa);
  testutil::for_each_lasso(2, 2, 2, [&](const Lasso& l) { EXPECT_EQ(dwa_accepts_lasso(aa, l), dwa_accepts_lasso(fa, l)); });
  Dwa orr = dwa_or(fa, gb);
  EXPECT_TRUE(dwa_accepts_lasso(orr, Lasso(FiniteTrace{}, trace(ab, {{"b"}}))));
}

TEST(BooleanOps, Compositional) {
  Alphabet ab({"a", "b"});
  Rng rng(43);
  for (int i = 0; i < 40; ++i) {
    auto store = make_letter_store(ab);
    Dwa x = random_weak_dwa(rng, ab, 1 + rng.below(5), store);
    Dwa y = random_weak_dwa(rng, ab, 1 + rng.below(5), store);
    Dwa c = dwa_and(x, y), d = dwa_or(x, y), n = dwa_not(x);
    for (const Dwa* p : {&c, &d, &n}) EXPECT_TRUE(check_weak(*p).weak);
    testutil::for_each_lasso(2, 2, 3, [&](const Lasso& l) {
      bool ax = dwa_accepts_lasso(x, l), ay = dwa_accepts_lasso(y, l);
      ASSERT_EQ(dwa_accepts_lasso(c, l), ax && ay);
      ASSERT_EQ(dwa_accepts_lasso(d, l), ax || ay);
      ASSERT_EQ(dwa_accepts_lasso(n, l), !ax);
    });
  }
}

TEST(Ranks, BaseAndTransientCases) {
  Dwa acc = table_dwa({{0, 0}}, {true});
  compute_ranks(acc);
  EXPECT_EQ(acc.rank, std::vector<int>{0});

  Dwa rej = table_dwa({{0, 0}}, {false});
  compute_ranks(rej);
  EXPECT_EQ(rej.rank, std::vector<int>{1});

  // 0 transient, 1 accepting sink, 2 rejecting sink
  Dwa tr = table_dwa({{1, 2}, {1, 1}, {2, 2}}, {false, true, false});
  compute_ranks(tr);
  EXPECT_EQ(tr.rank, (std::vector<int>{1, 0, 1}));
}

TEST(Ranks, RecurrentParityMatchesAcceptance) {
  Alphabet ab({"a", "b"});
  Rng rng(47);
  for (int i = 0; i < 100; ++i) {
    Dwa d = random_weak_dwa(rng, ab, 1 + rng.below(8));
    compute_ranks(d);
    std::vector<std::vector<StateId>> succ(d.size());
    for (StateId q = 0; q < d.size(); ++q) succ[q] = d.successors(q);
    std::vector<int> scc;
    tarjan_scc(succ, scc);
    for (StateId q = 0; q < d.size(); ++q) {
      bool recurrent = false;
      for (StateId s : succ[q]) recurrent = recurrent || scc[s] == scc[q];
      if (recurrent) {
        EXPECT_EQ(d.rank[q] % 2 == 0, d.accepting[q] != 0);
      }
    }
  }
}

TEST(MinimizeDwa, Examples) {
  Alphabet ab({"a"});
  auto store = make_letter_store(ab);
  Dwa fa = exists_Fa(ab, store);
  Dwa m = minimize_dwa(fa);
  EXPECT_TRUE(isomorphic(minimize_dwa(m), m));

  Dwa prod = dwa_and(fa, fa);
  EXPECT_LE(prod.size(), 4u);
  Dwa pm = minimize_dwa(prod);
  EXPECT_EQ(pm.size(), 2u);
  EXPECT_TRUE(isomorphic(pm, m));
  // no 1-state DWA accepts exactly the lassos with an a
  EXPECT_TRUE(dwa_accepts_lasso(pm, Lasso(FiniteTrace{}, trace(ab, {{"a"}}))));
  EXPECT_FALSE(dwa_accepts_lasso(pm, Lasso(FiniteTrace{}, trace(ab, {{}}))));
}

TEST(MinimizeDwa, LanguagePreservingAndCanonical) {
  Alphabet ab({"a", "b"});
  Rng rng(53);
  for (int i = 0; i < 60; ++i) {
    auto store = make_letter_store(ab);
    Dwa x = random_weak_dwa(rng, ab, 1 + rng.below(8), store);
    Dwa m = minimize_dwa(x);
    EXPECT_LE(m.size(), x.size());
    EXPECT_TRUE(check_weak(m).weak);
    EXPECT_TRUE(isomorphic(minimize_dwa(m), m));
    testutil::for_each_lasso(2, 2, 3, [&](const Lasso& l) { ASSERT_EQ(dwa_accepts_lasso(m, l), dwa_accepts_lasso(x, l)); });
    // a language-equal but bigger input reaches the same canonical automaton
    EXPECT_TRUE(isomorphic(minimize_dwa(dwa_and(x, dwa_or(x, x))), m));
  }
}

TEST(Weakness, DetectsMixedScc) {
  Dwa bad = table_dwa({{1, 1}, {0, 0}}, {true, false});
  WeaknessReport r = check_weak(bad);
  EXPECT_FALSE(r.weak);
  EXPECT_TRUE(r.accepting_state == 0 && r.rejecting_state == 1);
  EXPECT_FALSE(r.message.empty());
}

TEST(SigmaPartition, TwoComponentProduct) {
  Alphabet ab({"a", "b"});
  auto store = make_letter_store(ab);
  ComponentList list;
  list.components.push_back(exists_Fa(ab, store));
  list.components.push_back(component(PrefixQuantifier::Forall, "G b", ab, store));
  list.combiner = Combiner(O::conjunction({O::exists(parse_ltlf("F a")), O::forall(parse_ltlf("G b"))}));
  Dwa p = explicit_product(list);
  SigmaPartition sp = check_sigma_partition(p);
  EXPECT_TRUE(sp.valid) << sp.violation;
  EXPECT_LE(sp.blocks.size(), 4u);
  std::size_t covered = 0;
  for (const auto& [sigma, states] : sp.blocks) covered += states.size();
  EXPECT_EQ(covered, p.size());
}

TEST(Pipeline, ModesOnTwoExistentialComponents) {
  VariablePartition part{{"e1", "e2"}, {"a1", "a2"}};
  Alphabet ab = part.alphabet();
  O psi = parse_obligation("exists(F((e1 | a1) & X false)) & exists(F((e2 | a2) & X false))");
  PipelineOptions inc;
  PipelineResult r = compile_obligation(psi, ab, inc);
  ASSERT_TRUE(r.automaton);
  EXPECT_LE(r.automaton->size(), 4u);
  expect_language(*r.automaton, psi, ab, 1, 2);

  PipelineOptions comp;
  comp.mode = MinMode::Component;
  PipelineResult c = compile_obligation(psi, ab, comp);
  EXPECT_FALSE(c.automaton);
  EXPECT_EQ(c.components.components.size(), 2u);
  EXPECT_EQ(c.components.combiner.shape().kind(), ObligationKind::And);
  EXPECT_TRUE(isomorphic(minimize_dwa(explicit_product(c.components)), *r.automaton));
}

TEST(Pipeline, ModesAgreeOnRandomObligations) {
  Alphabet ab({"a", "b"});
  Rng rng(59);
  for (int i = 0; i < 60; ++i) {
    O psi = to_pnf(random_obligation(rng, ab.atoms()));
    PipelineOptions inc;
    inc.tau = 1 + rng.below(8);
    PipelineResult r = compile_obligation(psi, ab, inc);
    PipelineOptions comp;
    comp.mode = MinMode::Component;
    PipelineResult c = compile_obligation(psi, ab, comp);
    EXPECT_TRUE(isomorphic(minimize_dwa(*r.automaton), minimize_dwa(explicit_product(c.components))))
        << to_string(psi);
    EXPECT_TRUE(check_weak(*r.automaton).weak);
  }
  PipelineOptions bad;
  bad.tau = 0;
  EXPECT_THROW(compile_obligation(O::exists(F::tt()), ab, bad), std::invalid_argument);
}

TEST(Lasso, Examples) {
  Alphabet ab({"a"});
  Dwa fa = exists_Fa(ab);
  Dwa ga = component(PrefixQuantifier::Forall, "G a", ab);
  EXPECT_TRUE(dwa_accepts_lasso(fa, Lasso(trace(ab, {{}}), trace(ab, {{"a"}}))));
  EXPECT_FALSE(dwa_accepts_lasso(ga, Lasso(trace(ab, {{"a"}}), trace(ab, {{}}))));
  Dwa nfa = dwa_not(fa);
  testutil::for_each_lasso(1, 2, 2, [&](const Lasso& l) { EXPECT_NE(dwa_accepts_lasso(nfa, l), dwa_accepts_lasso(fa, l)); });
}

TEST(Hoa, UniversalAutomaton) {
  Dwa one = table_dwa({{0, 0}}, {true});
  one = minimize_dwa(one);
  std::string hoa = export_hoa(one);
  EXPECT_NE(hoa.find("Acceptance: 1 Inf(0)"), std::string::npos);
  EXPECT_NE(hoa.find("acc-name: Buchi"), std::string::npos);
  EXPECT_NE(hoa.find("properties: deterministic complete weak"), std::string::npos);
  EXPECT_NE(hoa.find("[t] 0 {0}"), std::string::npos) << hoa;
}

TEST(Hoa, GoldenExistsEventually) {
  Alphabet ab({"a"});
  Dwa fa = minimize_dwa(exists_Fa(ab));
  EXPECT_EQ(export_hoa(fa, "exists F a"), read_file(std::string(OBLSYNTH_FIXTURES) + "/exists_Fa.hoa"));
}

TEST(Hoa, RoundTrip) {
  Alphabet ab({"a", "b"});
  Rng rng(61);
  for (int i = 0; i < 40; ++i) {
    Dwa d = random_weak_dwa(rng, ab, 1 + rng.below(6));
    Dwa back = parse_hoa(export_hoa(d));
    EXPECT_TRUE(isomorphic(back, d));
  }
}
