#include "oblsynth/random.hpp"

#include <sstream>

namespace oblsynth {

Alphabet make_alphabet(std::size_t atoms) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < atoms; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  return Alphabet(names);
}

LtlfFormula random_ltlf(Rng& rng, std::size_t size, const std::vector<std::string>& atoms) {
  if (size <= 1) {
    const std::size_t pick = rng.below(atoms.size() + 2);
    if (pick < atoms.size()) return LtlfFormula::atom(atoms[pick]);
    return pick == atoms.size() ? LtlfFormula::tt() : LtlfFormula::ff();
  }
  if (size == 2 || rng.coin(45)) {
    const LtlfFormula c = random_ltlf(rng, size - 1, atoms);
    switch (rng.below(5)) {
      case 0: return LtlfFormula::negation(c);
      case 1: return LtlfFormula::weak_next(c);
      case 2: return LtlfFormula::strong_next(c);
      case 3: return LtlfFormula::eventually(c);
      default: return LtlfFormula::always(c);
    }
  }
  const std::size_t left = 1 + rng.below(size - 2);
  const LtlfFormula l = random_ltlf(rng, left, atoms);
  const LtlfFormula r = random_ltlf(rng, size - 1 - left, atoms);
  switch (rng.below(3)) {
    case 0: return LtlfFormula::conjunction(l, r);
    case 1: return LtlfFormula::disjunction(l, r);
    default: return LtlfFormula::until(l, r);
  }
}

namespace {

ObligationFormula random_tree(Rng& rng, std::size_t leaves, const std::vector<std::string>& atoms,
                              const RandomObligationOptions& options) {
  ObligationFormula out = [&] {
    if (leaves == 1) {
      const LtlfFormula body = random_ltlf(rng, 1 + rng.below(options.max_body_size), atoms);
      return rng.coin() ? ObligationFormula::exists(body) : ObligationFormula::forall(body);
    }
    const std::size_t left = 1 + rng.below(leaves - 1);
    std::vector<ObligationFormula> kids{random_tree(rng, left, atoms, options),
                                        random_tree(rng, leaves - left, atoms, options)};
    return rng.coin() ? ObligationFormula::conjunction(kids) : ObligationFormula::disjunction(kids);
  }();
  if (rng.coin(20)) out = ObligationFormula::negation(out);
  return out;
}

}  // namespace

ObligationFormula random_obligation(Rng& rng, const std::vector<std::string>& atoms,
                                    const RandomObligationOptions& options) {
  return random_tree(rng, 1 + rng.below(options.max_components), atoms, options);
}

Dwa random_weak_dwa(Rng& rng, const Alphabet& alphabet, std::size_t states, std::shared_ptr<bdd::Store> store) {
  Dwa a;
  a.store = store ? store : make_letter_store(alphabet);
  a.alphabet = alphabet;
  states = std::max<std::size_t>(states, 1);
  // block[i] is non-decreasing; a block is a candidate SCC with one acceptance value.
  std::vector<std::size_t> block(states);
  std::vector<char> block_acc;
  std::size_t b = 0;
  block_acc.push_back(rng.coin());
  for (std::size_t i = 0; i < states; ++i) {
    if (i > 0 && rng.coin(40)) {
      ++b;
      block_acc.push_back(rng.coin());
    }
    block[i] = b;
  }
  for (std::size_t i = 0; i < states; ++i) a.add_state(block_acc[block[i]] != 0);
  a.initial = 0;
  const Letter letters = alphabet.letter_count();
  for (std::size_t i = 0; i < states; ++i) {
    // Pick a small set of targets, then spread the letters over them.
    std::vector<StateId> targets;
    const std::size_t ntargets = 1 + rng.below(3);
    for (std::size_t t = 0; t < ntargets; ++t) {
      std::size_t lo = i;
      while (lo > 0 && block[lo - 1] == block[i]) --lo;
      targets.push_back(static_cast<StateId>(lo + rng.below(states - lo)));
    }
    for (Letter l = 0; l < letters; ++l) {
      a.add_edge(static_cast<StateId>(i), a.letter_bdd(l), targets[rng.below(targets.size())]);
    }
  }
  return trim(a);
}

RandomGame random_weak_game(Rng& rng, std::size_t max_states) {
  RandomGame g;
  const std::size_t nout = 1 + rng.below(2);
  const std::size_t nin = 1 + rng.below(2);
  for (std::size_t i = 0; i < nout; ++i) g.partition.outputs.push_back("x" + std::to_string(i));
  for (std::size_t i = 0; i < nin; ++i) g.partition.inputs.push_back("y" + std::to_string(i));
  const Alphabet alphabet = g.partition.alphabet();
  auto store = make_letter_store(alphabet);
  auto bits = [](std::size_t n) {
    std::size_t b = 0;
    while ((std::size_t{1} << b) < n) ++b;
    return b;
  };
  std::ostringstream desc;
  if (rng.coin(60)) {
    const std::size_t n = 1 + rng.below(std::min<std::size_t>(max_states, 12));
    g.list.components.push_back(random_weak_dwa(rng, alphabet, n, store));
    g.list.combiner = Combiner(ObligationFormula::exists(LtlfFormula::tt()));
    desc << "single component, " << g.list.components[0].size() << " states";
  } else {
    const std::size_t n1 = 1 + rng.below(6);
    const std::size_t n2 = 1 + rng.below(6);
    Dwa c1 = random_weak_dwa(rng, alphabet, n1, store);
    Dwa c2 = random_weak_dwa(rng, alphabet, n2, store);
    while ((std::size_t{1} << (bits(c1.size()) + bits(c2.size()))) > max_states) {
      if ((std::size_t{1} << bits(c1.size())) > max_states) c1 = random_weak_dwa(rng, alphabet, 1, store);
      else c2 = random_weak_dwa(rng, alphabet, 1, store);
    }
    const auto leaf = ObligationFormula::exists(LtlfFormula::tt());
    const bool conj = rng.coin();
    g.list.combiner = Combiner(conj ? ObligationFormula::conjunction({leaf, leaf}) : ObligationFormula::disjunction({leaf, leaf}));
    desc << (conj ? "and" : "or") << " of " << c1.size() << " and " << c2.size() << " states";
    g.list.components.push_back(std::move(c1));
    g.list.components.push_back(std::move(c2));
  }
  g.description = desc.str();
  return g;
}

}  // namespace oblsynth
