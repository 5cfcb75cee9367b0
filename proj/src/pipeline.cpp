#include "oblsynth/pipeline.hpp"

namespace oblsynth {

ObligationFormula normalize(const ObligationFormula& psi, bool simplify) {
  const ObligationFormula p = to_pnf(psi);
  return simplify ? simplify_obligation(p) : p;
}

SynthOutcome synthesize(const Specification& spec, const SynthConfig& config) {
  validate(spec);
  PipelineOptions popts;
  popts.mode = config.mode;
  popts.tau = config.tau;
  popts.compile.max_states = config.max_dfa_states;
  popts.max_product_states = config.max_product_states;
  SynthOutcome out{normalize(spec.formula, config.simplify), {}, {}, {}, false, std::nullopt, std::nullopt, 0};
  out.pipeline = compile_obligation(out.pnf, spec.partition.alphabet(), popts);

  ArenaOptions aopts;
  aopts.max_state_bits = config.max_state_bits;
  if (config.max_bdd_nodes) aopts.store.max_nodes = config.max_bdd_nodes;
  if (out.pipeline.automaton) {
    out.arena = build_arena(*out.pipeline.automaton, spec.partition, aopts);
    out.dwa_states = out.pipeline.automaton->size();
  } else {
    out.arena = build_arena(out.pipeline.components, spec.partition, aopts);
    for (const auto& c : out.pipeline.components.components) out.dwa_states += c.size();
  }
  out.result = solve(out.arena, config.solver);
  out.realizable = out.result.realizable;
  if (out.realizable) {
    out.strategy = extract_strategy(out.arena, out.result);
    if (config.verify) {
      VerifyOptions vopts;
      vopts.max_product_states = config.verify_cap;
      out.verification = verify_strategy(*out.strategy, out.pipeline.components, vopts);
    }
  }
  return out;
}

}  // namespace oblsynth
