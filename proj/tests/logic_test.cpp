#include <gtest/gtest.h>

#include "oblsynth/dfa.hpp"
#include "oblsynth/obligation.hpp"
#include "oblsynth/random.hpp"
#include "test_util.hpp"

using namespace oblsynth;
using testutil::trace;

namespace {

using F = LtlfFormula;
using O = ObligationFormula;

F a() { return F::atom("a"); }
F b() { return F::atom("b"); }

}  // namespace

TEST(Parse, Examples) {
  EXPECT_EQ(parse_ltlf("F(a & X false)"), F::eventually(a() & F::weak_next(F::ff())));
  EXPECT_EQ(parse_ltlf("a U (b | X! c)"), F::until(a(), b() | F::strong_next(F::atom("c"))));
  EXPECT_EQ(parse_ltlf("G(add -> X(c0))"), F::always((!F::atom("add")) | F::weak_next(F::atom("c0"))));
}

TEST(Parse, PrecedenceAndAssociativity) {
  EXPECT_EQ(parse_ltlf("a | b & c"), a() | (b() & F::atom("c")));
  EXPECT_EQ(parse_ltlf("a U b U c"), F::until(a(), F::until(b(), F::atom("c"))));
  EXPECT_EQ(parse_ltlf("!a U b"), F::until(!a(), b()));
  EXPECT_EQ(parse_ltlf("a -> b <-> b"), parse_ltlf("(a -> b) <-> b"));
  EXPECT_EQ(parse_ltlf("X a"), F::weak_next(a()));
  EXPECT_EQ(parse_ltlf("X!a"), F::strong_next(a()));
  // identifiers starting with a temporal letter are atoms
  EXPECT_EQ(parse_ltlf("Fa"), F::atom("Fa"));
  EXPECT_EQ(parse_ltlf("Xy"), F::atom("Xy"));
}

TEST(Parse, Errors) {
  try {
    parse_ltlf("a &\n (b |");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 0u);
  }
  EXPECT_THROW(parse_ltlf("a & )"), SyntaxError);
  std::set<std::string> declared{"a"};
  EXPECT_THROW(parse_ltlf("a & b", &declared), UndeclaredAtomError);
  EXPECT_NO_THROW(parse_ltlf("G a", &declared));
}

TEST(Parse, RoundTripOnRandomFormulas) {
  Rng rng(42);
  for (int i = 0; i < 2000; ++i) {
    F f = random_ltlf(rng, 1 + rng.below(14), {"a", "b", "c"});
    EXPECT_EQ(parse_ltlf(to_string(f)), f) << to_string(f);
  }
}

TEST(Parse, Spec) {
  Specification s = parse_spec("exists(F(a & X false))", ".inputs e\n.outputs a\n");
  EXPECT_EQ(s.formula, O::exists(parse_ltlf("F(a & X false)")));
  EXPECT_EQ(s.partition.inputs, std::vector<std::string>{"e"});
  EXPECT_EQ(s.partition.outputs, std::vector<std::string>{"a"});

  O imp = parse_obligation("forall(G a) -> exists(F b)");
  EXPECT_EQ(imp, O::disjunction({O::negation(O::forall(parse_ltlf("G a"))), O::exists(parse_ltlf("F b"))}));

  EXPECT_THROW(parse_obligation("forallexists(F a)"), FragmentError);
  EXPECT_THROW(parse_obligation("existsforall(F a)"), FragmentError);
  try {
    parse_obligation("forallexists(F a)");
  } catch (const FragmentError& e) {
    EXPECT_NE(std::string(e.what()).find("obligation"), std::string::npos);
  }
  EXPECT_THROW(parse_spec("exists(F a)", ".inputs\n.outputs b\n"), PartitionError);
  EXPECT_THROW(parse_spec("exists(F a)", ".inputs a\n.outputs a\n"), PartitionError);
}

TEST(Eval, Examples) {
  Alphabet ab({"a"});
  EXPECT_TRUE(eval_ltlf(F::weak_next(F::ff()), ab, trace(ab, {{"a"}}), 0));
  EXPECT_FALSE(eval_ltlf(F::strong_next(F::tt()), ab, trace(ab, {{"a"}}), 0));
  F last_a = F::eventually(a() & F::weak_next(F::ff()));
  EXPECT_TRUE(eval_ltlf(last_a, ab, trace(ab, {{}, {"a"}}), 0));
  // cross-check against every trace up to length 2
  testutil::for_each_trace(1, 1, 2, [&](const FiniteTrace& t) {
    EXPECT_EQ(eval_ltlf(last_a, ab, t), (t.letters.back() & 1) != 0);
  });
}

TEST(Eval, EmptySuffixRules) {
  Alphabet ab({"a"});
  FiniteTrace empty;
  EXPECT_FALSE(eval_ltlf(a(), ab, empty, 0));
  EXPECT_FALSE(eval_ltlf(F::strong_next(F::tt()), ab, empty, 0));
  EXPECT_TRUE(eval_ltlf(F::weak_next(F::ff()), ab, empty, 0));
  EXPECT_FALSE(eval_ltlf(F::until(F::tt(), F::tt()), ab, empty, 0));
  EXPECT_TRUE(eval_ltlf(F::always(a()), ab, empty, 0));
  EXPECT_FALSE(eval_ltlf(F::eventually(F::tt()), ab, empty, 0));
}

TEST(Eval, MatchesClauseOracle) {
  Alphabet ab({"a", "b"});
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    F f = random_ltlf(rng, 1 + rng.below(10), {"a", "b"});
    testutil::for_each_trace(2, 0, 5, [&](const FiniteTrace& t) {
      for (std::size_t pos = 0; pos <= t.size(); ++pos)
        ASSERT_EQ(eval_ltlf(f, ab, t, pos), testutil::holds(f, ab, t, pos)) << to_string(f);
    });
  }
}

TEST(Pnf, Examples) {
  F fa = F::eventually(a());
  EXPECT_EQ(to_pnf(O::negation(O::exists(fa))), O::forall(!fa));
  F p1 = a(), p2 = b();
  EXPECT_EQ(to_pnf(O::negation(O::conjunction({O::exists(p1), O::forall(p2)}))),
            O::disjunction({O::forall(!p1), O::exists(!p2)}));
  O positive = O::conjunction({O::exists(p1), O::forall(p2)});
  EXPECT_EQ(to_pnf(positive), positive);
  EXPECT_TRUE(is_pnf(to_pnf(O::negation(O::negation(O::negation(positive))))));
}

TEST(Simplify, Examples) {
  F p1 = a(), p2 = b(), p3 = F::atom("c");
  EXPECT_EQ(simplify_obligation(O::conjunction({O::forall(p1), O::forall(p2)})), O::forall(p1 & p2));
  EXPECT_EQ(simplify_obligation(O::disjunction({O::exists(p1), O::exists(p2), O::forall(p3)})),
            O::disjunction({O::exists(p1 | p2), O::forall(p3)}));
  O mixed = O::conjunction({O::exists(p1), O::forall(p2)});
  EXPECT_EQ(simplify_obligation(mixed), mixed);
}

TEST(LassoEval, Examples) {
  Alphabet ab({"a"});
  F last_a = F::eventually(a() & F::weak_next(F::ff()));
  auto check = [&](const O& psi, const Lasso& l) {
    return eval_obligation_on_lasso(psi, l, make_classifier(psi, ab));
  };
  EXPECT_TRUE(check(O::exists(last_a), Lasso(FiniteTrace{}, trace(ab, {{"a"}}))));
  EXPECT_FALSE(check(O::forall(F::always(a())), Lasso(trace(ab, {{"a"}}), trace(ab, {{}}))));
  testutil::for_each_lasso(1, 2, 2, [&](const Lasso& l) { EXPECT_TRUE(check(O::forall(F::tt()), l)); });
}

// The semantic grid: random obligations, every lasso with |u|, |v| <= 3 over 2 atoms.
TEST(LassoEval, PnfAndSimplifyPreserveSemantics) {
  Alphabet ab({"a", "b"});
  Rng rng(17);
  std::size_t fired = 0;
  for (int i = 0; i < 120; ++i) {
    O psi = random_obligation(rng, {"a", "b"}, {3, 4});
    O pnf = to_pnf(psi);
    O simp = simplify_obligation(pnf);
    if (component_count(simp) < component_count(pnf)) ++fired;
    DfaClassifier c0 = make_classifier(psi, ab), c1 = make_classifier(pnf, ab), c2 = make_classifier(simp, ab);
    std::size_t bound = 1;
    for (const auto& d : c0.dfas()) bound = std::max(bound, d.size() + 1);
    testutil::for_each_lasso(2, 3, 3, [&](const Lasso& l) {
      bool expected = testutil::obligation_holds(psi, ab, l, bound);
      ASSERT_EQ(eval_obligation_on_lasso(psi, l, c0), expected) << to_string(psi);
      ASSERT_EQ(eval_obligation_on_lasso(pnf, l, c1), expected) << to_string(pnf);
      ASSERT_EQ(eval_obligation_on_lasso(simp, l, c2), expected) << to_string(simp);
    });
  }
  EXPECT_GT(fired, 0u);
}

TEST(Partition, ParseAndPrint) {
  VariablePartition p = parse_partition("# header\n.inputs  y1 y2\n\n.outputs x\n");
  EXPECT_EQ(p.inputs, (std::vector<std::string>{"y1", "y2"}));
  EXPECT_EQ(parse_partition(to_string(p)).outputs, p.outputs);
  Alphabet ab = p.alphabet();
  EXPECT_EQ(ab.atoms(), (std::vector<std::string>{"x", "y1", "y2"}));
  EXPECT_THROW(parse_partition(".inputs a\n.bogus b\n"), std::exception);
}
