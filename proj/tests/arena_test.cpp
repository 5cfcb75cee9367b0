#include <gtest/gtest.h>

#include "oblsynth/arena.hpp"
#include "oblsynth/random.hpp"
#include "test_util.hpp"

using namespace oblsynth;

namespace {

using O = ObligationFormula;

// Two states over {x, y}; every state moves to 1 iff x & !y.
Dwa x_and_not_y() {
  Alphabet ab({"x", "y"});
  Dwa d;
  d.store = make_letter_store(ab);
  d.alphabet = ab;
  d.add_state(false);
  d.add_state(true);
  bdd::Bdd g = d.store->var(0) & !d.store->var(1);
  for (StateId q = 0; q < 2; ++q) {
    d.add_edge(q, g, 1);
    d.add_edge(q, !g, 0);
  }
  return d;
}

const VariablePartition kXY{{"y"}, {"x"}};

bdd::Bdd set_of(const Arena& a, const std::vector<std::vector<bool>>& codes, std::uint64_t mask) {
  bdd::Bdd s = a.none();
  for (std::size_t i = 0; i < codes.size(); ++i)
    if ((mask >> i) & 1) s |= a.state(codes[i]);
  return s;
}

}  // namespace

TEST(BuildArena, TwoStateDwaTabulatesGuards) {
  Dwa d = x_and_not_y();
  Arena a = build_arena(d, kXY);
  EXPECT_EQ(a.state_bits(), 1u);
  for (StateId q = 0; q < 2; ++q) {
    for (Letter x = 0; x < 2; ++x) {
      for (Letter y = 0; y < 2; ++y) {
        std::vector<bool> succ = a.successor(a.encode({q}), x, y);
        EXPECT_EQ(a.decode(succ)[0], d.step(q, x | (y << 1)));
      }
    }
  }
  EXPECT_TRUE(a.contains(a.acc, a.encode({1})));
  EXPECT_FALSE(a.contains(a.acc, a.encode({0})));
}

TEST(BuildArena, TwoComponentsWithAnd) {
  Alphabet ab({"x", "y"});
  auto store = make_letter_store(ab);
  ComponentList list;
  list.components.push_back(build_component(PrefixQuantifier::Exists, compile_dfa(parse_ltlf("F x"), ab, store)));
  list.components.push_back(build_component(PrefixQuantifier::Forall, compile_dfa(parse_ltlf("G y"), ab, store)));
  list.combiner = Combiner(O::conjunction({O::exists(parse_ltlf("F x")), O::forall(parse_ltlf("G y"))}));
  Arena a = build_arena(list, kXY);
  EXPECT_EQ(a.state_bits(), 2u);
  EXPECT_EQ(a.acc, a.component_acc[0] & a.component_acc[1]);
}

TEST(BuildArena, SingleStateHasNoBits) {
  Alphabet ab({"x", "y"});
  Dwa t = minimize_dwa(build_component(PrefixQuantifier::Forall, compile_dfa(parse_ltlf("true"), ab)));
  ASSERT_EQ(t.size(), 1u);
  Arena a = build_arena(t, kXY);
  EXPECT_EQ(a.state_bits(), 0u);
  EXPECT_TRUE(a.acc.is_true());
}

TEST(BuildArena, PaddingCodesAreRejectingSelfLoops) {
  Alphabet ab({"x", "y"});
  Rng rng(3);
  Dwa d = random_weak_dwa(rng, ab, 3);
  while (d.size() != 3) d = random_weak_dwa(rng, ab, 3);
  Arena a = build_arena(d, kXY);
  ASSERT_EQ(a.state_bits(), 2u);
  std::vector<bool> pad = a.encode({3});
  EXPECT_FALSE(a.contains(a.acc, pad));
  for (Letter x = 0; x < 2; ++x)
    for (Letter y = 0; y < 2; ++y) EXPECT_EQ(a.successor(pad, x, y), pad);
}

TEST(BuildArena, EncodingOverflow) {
  ArenaOptions opts;
  opts.max_state_bits = 0;
  EXPECT_THROW(build_arena(x_and_not_y(), kXY, opts), EncodingOverflowError);
}

TEST(Cpre, Examples) {
  Arena a = build_arena(x_and_not_y(), kXY);
  EXPECT_EQ(cpre_s(a, a.all()), a.all());
  EXPECT_EQ(cpre_s(a, a.none()), a.none());
  bdd::Bdd w = a.state(a.encode({1}));
  EXPECT_TRUE(cpre_s(a, w).is_false());
  // y = 1 keeps every play out of W whatever x is
  EXPECT_TRUE(cpre_e(a, !w).is_true());
  // x = 0 leaves the environment no way into W
  EXPECT_TRUE(cpre_e(a, w).is_false());
}

TEST(Cpre, MonotoneDeterminedAndMatchesExplicitStep) {
  Rng rng(71);
  for (int i = 0; i < 80; ++i) {
    RandomGame g = random_weak_game(rng, 8);
    Arena a = build_arena(g.list, g.partition);
    ExplicitOptions eo;
    eo.reachable_only = false;
    ExplicitGame eg = to_explicit(a, eo);
    const auto& codes = eg.codes;
    for (int k = 0; k < 20; ++k) {
      std::uint64_t m1 = rng.next() & ((std::uint64_t{1} << codes.size()) - 1);
      std::uint64_t m2 = m1 | (rng.next() & ((std::uint64_t{1} << codes.size()) - 1));
      bdd::Bdd w1 = set_of(a, codes, m1), w2 = set_of(a, codes, m2);
      bdd::Bdd c1 = cpre_s(a, w1), c2 = cpre_s(a, w2);
      EXPECT_TRUE(c1.implies(c2));
      EXPECT_TRUE((c1 | cpre_e(a, !w1)).is_true());
      EXPECT_TRUE((c1 & cpre_e(a, !w1)).is_false());
      for (std::size_t q = 0; q < eg.state_nodes; ++q) {
        bool step = false;
        for (auto choice : eg.succ[q]) {
          bool forced = true;
          for (auto resp : eg.succ[choice]) forced = forced && ((m1 >> eg.succ[resp][0]) & 1);
          step = step || forced;
        }
        ASSERT_EQ(a.contains(c1, codes[q]), step);
      }
    }
  }
}

TEST(ToExplicit, LayerCounts) {
  Arena a = build_arena(x_and_not_y(), kXY);
  ExplicitGame g = to_explicit(a);
  EXPECT_EQ(g.state_nodes, 2u);
  EXPECT_EQ(g.choice_nodes, 4u);
  EXPECT_EQ(g.response_nodes, 8u);
  EXPECT_EQ(g.size(), 14u);
  for (std::size_t q = 0; q < g.state_nodes; ++q) EXPECT_EQ(g.owner[q], 0);
}

TEST(ToExplicit, EmptyOutputsGiveOneChoice) {
  Alphabet ab({"y"});
  Dwa d = build_component(PrefixQuantifier::Exists, compile_dfa(parse_ltlf("F y"), ab));
  Arena a = build_arena(d, VariablePartition{{"y"}, {}});
  ExplicitGame g = to_explicit(a);
  for (std::size_t q = 0; q < g.state_nodes; ++q) EXPECT_EQ(g.succ[q].size(), 1u);
}

TEST(ToExplicit, Cap) {
  Rng rng(5);
  RandomGame g = random_weak_game(rng, 64);
  Arena a = build_arena(g.list, g.partition);
  ExplicitOptions eo;
  eo.max_states = 1;
  eo.reachable_only = false;
  if (a.state_bits() > 0) {
    EXPECT_THROW(to_explicit(a, eo), std::length_error);
  }
}
