#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oblsynth/dwa.hpp"
#include "oblsynth/obligation.hpp"

namespace oblsynth {

/// Seeded generator with portable draws (no std distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n).
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
  bool coin(unsigned percent = 50) { return below(100) < percent; }

 private:
  std::mt19937_64 engine_;
};

Alphabet make_alphabet(std::size_t atoms);

/// Formula with exactly `size` AST nodes over the given atoms.
LtlfFormula random_ltlf(Rng& rng, std::size_t size, const std::vector<std::string>& atoms);

struct RandomObligationOptions {
  std::size_t max_components = 3;
  std::size_t max_body_size = 5;
};
ObligationFormula random_obligation(Rng& rng, const std::vector<std::string>& atoms,
                                    const RandomObligationOptions& options = {});

/// Weak DWA: states split into a chain of blocks with uniform acceptance; edges never go
/// back to an earlier block.
Dwa random_weak_dwa(Rng& rng, const Alphabet& alphabet, std::size_t states, std::shared_ptr<bdd::Store> store = nullptr);

struct RandomGame {
  ComponentList list;
  VariablePartition partition;
  std::string description;
};

/// One or two weak components over 1-2 outputs and 1-2 inputs, with at most `max_states`
/// explicit arena states (padding codes included).
RandomGame random_weak_game(Rng& rng, std::size_t max_states = 64);

}  // namespace oblsynth
