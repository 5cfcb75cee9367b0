#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "oblsynth/bdd.hpp"

using namespace oblsynth::bdd;

namespace {

// Truth tables over n <= 10 variables: bit a of the table is f(a), variable i = bit i of a.
using Table = std::vector<bool>;

Table table_of(Store& s, const Bdd& f, std::size_t n) {
  Table t(std::size_t{1} << n);
  for (std::size_t a = 0; a < t.size(); ++a) t[a] = s.eval(f, [&](Var v) { return ((a >> v) & 1) != 0; });
  return t;
}

struct Random {
  std::mt19937_64 rng;
  explicit Random(std::uint64_t seed) : rng(seed) {}
  std::size_t below(std::size_t n) { return rng() % n; }
};

// Random expression, returned both as a BDD and as a truth table.
std::pair<Bdd, Table> random_fn(Store& s, Random& r, std::size_t n, int depth) {
  std::size_t cells = std::size_t{1} << n;
  if (depth == 0 || r.below(4) == 0) {
    Var v = static_cast<Var>(r.below(n));
    Table t(cells);
    for (std::size_t a = 0; a < cells; ++a) t[a] = (a >> v) & 1;
    return {s.var(v), t};
  }
  auto [f, tf] = random_fn(s, r, n, depth - 1);
  if (r.below(5) == 0) {
    for (std::size_t a = 0; a < cells; ++a) tf[a] = !tf[a];
    return {!f, tf};
  }
  auto [g, tg] = random_fn(s, r, n, depth - 1);
  Table t(cells);
  switch (r.below(4)) {
    case 0:
      for (std::size_t a = 0; a < cells; ++a) t[a] = tf[a] && tg[a];
      return {f & g, t};
    case 1:
      for (std::size_t a = 0; a < cells; ++a) t[a] = tf[a] || tg[a];
      return {f | g, t};
    case 2:
      for (std::size_t a = 0; a < cells; ++a) t[a] = tf[a] != tg[a];
      return {f ^ g, t};
    default:
      for (std::size_t a = 0; a < cells; ++a) t[a] = tf[a] && !tg[a];
      return {f - g, t};
  }
}

void add_vars(Store& s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) s.new_var("v" + std::to_string(i), VarRole::Auxiliary);
}

}  // namespace

TEST(Bdd, BasicIdentities) {
  Store s;
  Var x = s.new_var("x", VarRole::SystemOutput);
  Var y = s.new_var("y", VarRole::EnvironmentInput);
  EXPECT_TRUE(s.apply(BinaryOp::And, s.var(x), s.negate(s.var(x))).is_false());
  EXPECT_EQ(s.ite(s.var(x), s.bdd_true(), s.bdd_false()), s.var(x));
  Bdd f = s.apply(BinaryOp::Or, s.var(x), s.var(y));
  Table t = table_of(s, f, 2);
  EXPECT_EQ(t, (Table{false, true, true, true}));
}

TEST(Bdd, Quantification) {
  Store s;
  Var x = s.new_var("x", VarRole::SystemOutput);
  Var y = s.new_var("y", VarRole::EnvironmentInput);
  EXPECT_EQ(s.exists({x}, s.var(x) & s.var(y)), s.var(y));
  EXPECT_EQ(s.forall({x}, s.var(x) | s.var(y)), s.var(y));
  Bdd iff = !(s.var(x) ^ s.var(y));
  EXPECT_TRUE(s.forall({y}, s.exists({x}, iff)).is_true());
}

TEST(Bdd, VectorCompose) {
  Store s;
  Var z = s.new_var("z", VarRole::StateBit);
  Var x = s.new_var("x", VarRole::SystemOutput);
  Var y = s.new_var("y", VarRole::EnvironmentInput);
  EXPECT_EQ(s.vector_compose(s.var(z) & s.var(y), {{z, s.bdd_true()}}), s.var(y));
  EXPECT_EQ(s.vector_compose(s.var(z), {{z, s.var(x) ^ s.var(y)}}), s.var(x) ^ s.var(y));

  Store t;
  Var z1 = t.new_var("z1", VarRole::StateBit);
  Var z2 = t.new_var("z2", VarRole::StateBit);
  Bdd swapped = t.vector_compose(t.var(z1) & !t.var(z2), {{z1, t.var(z2)}, {z2, t.var(z1)}});
  EXPECT_EQ(swapped, t.var(z2) & !t.var(z1));
}

TEST(Bdd, PickMinWitness) {
  Store s;
  Var x = s.new_var("x", VarRole::SystemOutput);
  Var y = s.new_var("y", VarRole::SystemOutput);
  auto w = s.pick_min_witness(s.var(x) | s.var(y), {x, y});
  ASSERT_TRUE(w);
  EXPECT_EQ(*w, (std::vector<bool>{false, true}));
  EXPECT_FALSE(s.pick_min_witness(s.bdd_false(), {x, y}));
  EXPECT_EQ(*s.pick_min_witness(s.bdd_true(), {x, y}), (std::vector<bool>{false, false}));
}

TEST(Bdd, PickMinWitnessMatchesEnumeration) {
  Random r(7);
  for (int round = 0; round < 200; ++round) {
    Store s;
    add_vars(s, 6);
    auto [f, t] = random_fn(s, r, 6, 4);
    std::vector<Var> vars{1, 3, 4};
    std::optional<std::vector<bool>> expected;
    // Lexicographic in the order of vars, false < true: var 1 is most significant.
    for (std::size_t k = 0; k < 8 && !expected; ++k) {
      std::vector<bool> vals{(k & 4) != 0, (k & 2) != 0, (k & 1) != 0};
      for (std::size_t a = 0; a < t.size(); ++a) {
        if (t[a] && ((a >> 1) & 1) == vals[0] && ((a >> 3) & 1) == vals[1] && ((a >> 4) & 1) == vals[2]) {
          expected = vals;
          break;
        }
      }
    }
    EXPECT_EQ(s.pick_min_witness(f, vars), expected);
  }
}

TEST(Bdd, TruthTableOracle) {
  Random r(11);
  for (int round = 0; round < 300; ++round) {
    Store s;
    const std::size_t n = 4 + r.below(7);
    add_vars(s, n);
    auto [f, tf] = random_fn(s, r, n, 5);
    auto [g, tg] = random_fn(s, r, n, 5);
    ASSERT_EQ(table_of(s, f, n), tf);
    ASSERT_EQ(table_of(s, g, n), tg);

    Var q = static_cast<Var>(r.below(n));
    Table ex(tf.size()), fa(tf.size());
    for (std::size_t a = 0; a < tf.size(); ++a) {
      std::size_t a0 = a & ~(std::size_t{1} << q), a1 = a | (std::size_t{1} << q);
      ex[a] = tf[a0] || tf[a1];
      fa[a] = tf[a0] && tf[a1];
    }
    EXPECT_EQ(table_of(s, s.exists({q}, f), n), ex);
    EXPECT_EQ(table_of(s, s.forall({q}, f), n), fa);

    // and_exists against the composition it replaces
    EXPECT_EQ(s.and_exists(f, g, {q}), s.exists({q}, f & g));

    // ite
    auto [h, th] = random_fn(s, r, n, 3);
    Table it(tf.size());
    for (std::size_t a = 0; a < tf.size(); ++a) it[a] = tf[a] ? tg[a] : th[a];
    EXPECT_EQ(table_of(s, s.ite(f, g, h), n), it);

    // vector_compose with a random substitution of two variables
    Var a1 = static_cast<Var>(r.below(n)), a2 = static_cast<Var>(r.below(n));
    std::map<Var, Bdd> sub{{a1, g}, {a2, h}};
    Table comp(tf.size());
    for (std::size_t a = 0; a < tf.size(); ++a) {
      std::size_t b = a;
      auto set = [&](Var v, bool val) { b = val ? (b | (std::size_t{1} << v)) : (b & ~(std::size_t{1} << v)); };
      set(a1, tg[a]);
      if (a2 != a1) set(a2, th[a]);
      comp[a] = tf[b];
    }
    EXPECT_EQ(table_of(s, s.vector_compose(f, sub), n), comp);
    EXPECT_TRUE(s.check_invariants());
  }
}

TEST(Bdd, Canonicity) {
  Random r(3);
  for (int round = 0; round < 200; ++round) {
    Store s;
    add_vars(s, 8);
    auto [f, tf] = random_fn(s, r, 8, 5);
    auto [g, tg] = random_fn(s, r, 8, 5);
    EXPECT_EQ(f == g, tf == tg);
    // the same function built a second way
    Bdd f2 = !((!f) | s.bdd_false());
    EXPECT_EQ(f2, f);
  }
}

TEST(Bdd, CacheOffIsBitIdentical) {
  Random r1(5), r2(5);
  Store on;
  Store off;
  off.set_use_cache(false);
  add_vars(on, 8);
  add_vars(off, 8);
  for (int round = 0; round < 50; ++round) {
    auto [f, tf] = random_fn(on, r1, 8, 5);
    auto [g, tg] = random_fn(off, r2, 8, 5);
    EXPECT_EQ(f.id(), g.id());
    EXPECT_EQ(on.exists({2, 5}, f).id(), off.exists({2, 5}, g).id());
  }
  EXPECT_GT(on.stats().cache_hits, 0u);
}

TEST(Bdd, CapacityError) {
  StoreOptions opts;
  opts.max_nodes = 64;
  opts.gc_threshold = 32;
  Store s(opts);
  add_vars(s, 16);
  EXPECT_THROW(
      {
        std::vector<Bdd> keep;
        Bdd acc = s.bdd_true();
        for (Var i = 0; i < 8; ++i) {
          acc = acc & !(s.var(i) ^ s.var(i + 8));
          keep.push_back(acc);
        }
      },
      CapacityError);
}

TEST(Bdd, GarbageCollectionKeepsLiveHandles) {
  StoreOptions opts;
  opts.gc_threshold = 256;
  Store s(opts);
  add_vars(s, 10);
  Random r(9);
  auto [keep, tk] = random_fn(s, r, 10, 6);
  for (int i = 0; i < 200; ++i) random_fn(s, r, 10, 6);
  s.collect_garbage();
  EXPECT_EQ(table_of(s, keep, 10), tk);
  EXPECT_TRUE(s.check_invariants());
}

TEST(Bdd, ImportAndRename) {
  Store a;
  add_vars(a, 4);
  Store b;
  add_vars(b, 4);
  Bdd f = (a.var(0) & a.var(1)) | a.var(3);
  Bdd g = b.import(a, f, {{0, 2}, {1, 3}, {3, 0}});
  EXPECT_EQ(g, (b.var(2) & b.var(3)) | b.var(0));
  EXPECT_EQ(a.rename(f, {{0, 1}, {1, 0}}), (a.var(1) & a.var(0)) | a.var(3));
  EXPECT_DOUBLE_EQ(a.sat_count(f, {0, 1, 2, 3}), 10.0);
}
