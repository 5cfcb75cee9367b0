#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oblsynth/arena.hpp"
#include "oblsynth/solvers.hpp"

namespace oblsynth {

class NotRealizableError : public std::runtime_error {
 public:
  explicit NotRealizableError(const std::string& what) : std::runtime_error(what) {}
};

struct StrategyEdge {
  bdd::Bdd guard;  // over the strategy's input variables
  std::uint32_t dst;
};

struct StrategyState {
  Letter output = 0;  // bit i = outputs[i]
  std::vector<StrategyEdge> edges;
  std::vector<bool> code;  // arena state
  bool accepting = false;
  std::size_t layer = 0;
  LayerKind kind = LayerKind::Safety;
};

/// Moore machine: the output depends on the state only, the input selects the successor.
struct MooreStrategy {
  MooreStrategy() = default;
  MooreStrategy(const MooreStrategy&) = default;
  MooreStrategy(MooreStrategy&&) noexcept = default;
  MooreStrategy& operator=(MooreStrategy other) noexcept;

  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::shared_ptr<bdd::Store> store;  // variable i = inputs[i]
  std::vector<StrategyState> states;
  std::uint32_t initial = 0;

  std::size_t size() const { return states.size(); }
  std::uint32_t step(std::uint32_t s, Letter inputs_letter) const;
  /// Letter over the partition alphabet: outputs in the low bits, inputs above them.
  Letter letter(std::uint32_t s, Letter inputs_letter) const;
  std::vector<bdd::Var> input_vars() const;
};

/// Follows the solver's layers from the initial state. Throws NotRealizableError when the
/// initial state is outside the region.
MooreStrategy extract_strategy(const Arena& arena, const SolveResult& result);

enum class Verdict { Verified, BoundedVerified, Failed };
const char* to_string(Verdict v);

struct VerifyOptions {
  std::size_t max_product_states = std::size_t{1} << 20;
};

struct VerifyResult {
  Verdict verdict = Verdict::Failed;
  std::optional<Lasso> counterexample;
  std::size_t product_states = 0;
  std::string message;

  bool ok() const { return verdict != Verdict::Failed; }
};

/// Checks every play of the strategy against the specification automaton (Buchi reading).
/// Above the product cap only the strategy's layer ranking is checked (BoundedVerified).
VerifyResult verify_strategy(const MooreStrategy& strategy, const Dwa& spec, const VerifyOptions& options = {});
VerifyResult verify_strategy(const MooreStrategy& strategy, const ComponentList& spec,
                             const VerifyOptions& options = {});

/// Letters produced against the given input sequence, one per input.
FiniteTrace simulate(const MooreStrategy& strategy, const std::vector<Letter>& inputs);

std::string export_strategy(const MooreStrategy& strategy, const std::vector<std::string>& comments = {});
MooreStrategy import_strategy(const std::string& text);
std::string strategy_to_dot(const MooreStrategy& strategy);

}  // namespace oblsynth
