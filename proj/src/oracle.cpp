#include "oblsynth/oracle.hpp"

#include <map>
#include <set>
#include <sstream>

#include "oblsynth/dfa.hpp"
#include "oblsynth/pipeline.hpp"
#include "oblsynth/strategy.hpp"

namespace oblsynth {

Fault parse_fault(const std::string& name) {
  if (name == "none") return Fault::None;
  if (name == "flip-accepting") return Fault::FlipAccepting;
  throw std::invalid_argument("unknown fault '" + name + "' (expected none or flip-accepting)");
}

const char* to_string(Fault f) { return f == Fault::None ? "none" : "flip-accepting"; }

namespace {

std::string word_to_string(const Alphabet& ab, const std::vector<Letter>& w) {
  std::string s = "[";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? ", " : "") + ab.letter_to_string(w[i]);
  return s + "]";
}

}  // namespace

std::optional<std::string> check_dfa_against_semantics(const Dfa& dfa, const LtlfFormula& phi, std::size_t max_len,
                                                       std::size_t* traces) {
  // Words are built back to front. A word w is summarised by the subformula values at
  // its first position and by {q : the DFA accepts w from q}; both extend by prepending.
  const SuffixEvaluator ev(phi, dfa.alphabet);
  const auto table = transition_table(dfa);
  const Letter letters = dfa.alphabet.letter_count();
  using Key = std::pair<std::vector<char>, std::vector<char>>;
  std::map<Key, std::vector<Letter>> level;
  level[{ev.empty_values(), std::vector<char>(dfa.accepting.begin(), dfa.accepting.end())}] = {};
  std::size_t count = 1, width = 1;
  for (std::size_t len = 0;; ++len) {
    for (const auto& [key, word] : level) {
      const bool sem = ev.root_value(key.first);
      const bool aut = key.second[dfa.initial] != 0;
      if (sem != aut) {
        if (traces) *traces = count;
        return "trace " + word_to_string(dfa.alphabet, word) + ": semantics " + (sem ? "true" : "false") +
               ", automaton " + (aut ? "accepts" : "rejects");
      }
    }
    if (len == max_len) break;
    std::map<Key, std::vector<Letter>> next;
    std::vector<char> vals;
    for (const auto& [key, word] : level) {
      for (Letter a = 0; a < letters; ++a) {
        ev.step(a, key.first, word.empty(), vals);
        std::vector<char> acc(dfa.size());
        for (StateId q = 0; q < dfa.size(); ++q) acc[q] = key.second[table[q * letters + a]];
        std::vector<Letter> w{a};
        w.insert(w.end(), word.begin(), word.end());
        next.emplace(Key{vals, std::move(acc)}, std::move(w));
      }
    }
    level = std::move(next);
    width *= letters;
    count += width;
  }
  if (traces) *traces = count;
  return std::nullopt;
}

std::optional<std::string> check_dwa_against_lassos(const Dwa& dwa, const ObligationFormula& psi, std::size_t max_u,
                                                    std::size_t max_v, std::size_t* lassos) {
  const DfaClassifier cls = make_classifier(psi, dwa.alphabet);
  const auto table = transition_table(dwa);
  const Letter letters = dwa.alphabet.letter_count();
  std::vector<std::vector<Letter>> words{{}};
  for (std::size_t len = 1; len <= std::max(max_u, max_v); ++len) {
    const std::size_t before = words.size();
    for (std::size_t i = 0; i < before; ++i) {
      if (words[i].size() != len - 1) continue;
      for (Letter a = 0; a < letters; ++a) {
        auto w = words[i];
        w.push_back(a);
        words.push_back(std::move(w));
      }
    }
  }
  std::size_t count = 0;
  std::vector<StateId> seen_at;
  for (const auto& u : words) {
    if (u.size() > max_u) continue;
    StateId q0 = dwa.initial;
    for (const Letter a : u) q0 = table[q0 * letters + a];
    for (const auto& v : words) {
      if (v.empty() || v.size() > max_v) continue;
      ++count;
      // Iterate v from q0 until a boundary state repeats, then scan the cycle.
      std::map<StateId, std::size_t> boundary;
      std::vector<StateId> bounds;
      StateId q = q0;
      while (!boundary.count(q)) {
        boundary[q] = bounds.size();
        bounds.push_back(q);
        for (const Letter a : v) q = table[q * letters + a];
      }
      bool aut = false;
      for (std::size_t k = boundary[q]; k < bounds.size() && !aut; ++k) {
        StateId r = bounds[k];
        for (const Letter a : v) {
          r = table[r * letters + a];
          aut = aut || dwa.accepting[r];
        }
      }
      const Lasso lasso(FiniteTrace{u}, FiniteTrace{v});
      const bool sem = eval_obligation_on_lasso(psi, lasso, cls);
      if (sem != aut) {
        if (lassos) *lassos = count;
        return "lasso u=" + word_to_string(dwa.alphabet, u) + " v=" + word_to_string(dwa.alphabet, v) +
               ": semantics " + (sem ? "true" : "false") + ", automaton " + (aut ? "accepts" : "rejects");
      }
    }
  }
  if (lassos) *lassos = count;
  return std::nullopt;
}

StructureCheck check_structure(const Arena& arena) {
  StructureCheck s;
  try {
    s.safereach_outer = solve_safereach(arena).counters.outer_iters;
  } catch (const WeaknessViolation&) {
    s.chain_monotone = false;
  }
  s.scc_count = sym_scc_decompose(arena, arena.all(), false).sccs.size();
  s.scc_inner = solve(arena, SolverKind::Scc).counters.inner_iters;
  s.states = static_cast<std::size_t>(arena.count_states(arena.all()));
  return s;
}

std::string describe_game(const RandomGame& game) {
  std::ostringstream os;
  os << to_string(game.partition);
  os << "# combiner: " << to_string(game.list.combiner.shape()) << "\n";
  for (std::size_t i = 0; i < game.list.components.size(); ++i) {
    os << export_hoa(game.list.components[i], "component" + std::to_string(i));
  }
  return os.str();
}

GameCheck check_game(const RandomGame& game, Fault fault, std::uint64_t fault_seed, bool strategies) {
  GameCheck out;
  ComponentList symbolic = game.list;
  if (fault == Fault::FlipAccepting) {
    Dwa& c = symbolic.components[0];
    const std::size_t q = fault_seed % c.size();
    c.accepting[q] = !c.accepting[q];
  }
  const Arena reference = build_arena(game.list, game.partition);
  const Arena arena = build_arena(symbolic, game.partition);
  const ExplicitGame eg = to_explicit(reference);
  const ExplicitSolution sol = explicit_oracle_solve(eg, Objective::Weak);
  std::vector<char> expected(sol.system_wins.begin(), sol.system_wins.begin() + static_cast<std::ptrdiff_t>(eg.state_nodes));
  out.realizable = expected[eg.initial] != 0;

  std::map<SolverKind, bdd::Bdd> regions;
  std::ostringstream detail;
  for (const auto kind : {SolverKind::Buchi, SolverKind::CoBuchi, SolverKind::SafeReach, SolverKind::Scc}) {
    try {
      const SolveResult r = solve(arena, kind);
      regions[kind] = r.region;
      if (project_region(arena, eg, r.region) != expected) {
        out.ok = false;
        detail << to_string(kind) << " region differs from the explicit oracle; ";
      }
    } catch (const std::exception& e) {
      out.ok = false;
      detail << to_string(kind) << " failed: " << e.what() << "; ";
    }
  }
  if (regions.count(SolverKind::Buchi) && regions.count(SolverKind::CoBuchi)) {
    const bdd::Bdd reach = arena.reachable();
    out.buchi_equals_cobuchi = (regions[SolverKind::Buchi] & reach) == (regions[SolverKind::CoBuchi] & reach);
    if (!out.buchi_equals_cobuchi) {
      out.ok = false;
      detail << "buchi and cobuchi regions differ; ";
    }
  }
  try {
    out.structure = check_structure(arena);
    if (!out.structure.ok()) {
      out.ok = false;
      detail << "iteration bounds violated (outer " << out.structure.safereach_outer << ", sccs "
             << out.structure.scc_count << ", scc inner " << out.structure.scc_inner << ", states "
             << out.structure.states << "); ";
    }
  } catch (const std::exception& e) {
    out.ok = false;
    detail << "structure check failed: " << e.what() << "; ";
  }
  if (strategies && out.realizable) {
    try {
      const SolveResult r = solve(arena, SolverKind::SafeReach);
      const MooreStrategy m = extract_strategy(arena, r);
      const VerifyResult v = verify_strategy(m, game.list);
      out.strategy_verdict = to_string(v.verdict);
      if (!v.ok()) {
        out.ok = false;
        detail << "strategy verification failed: " << v.message << "; ";
      }
    } catch (const std::exception& e) {
      out.ok = false;
      out.strategy_verdict = "failed";
      detail << "strategy extraction failed: " << e.what() << "; ";
    }
  }
  out.detail = detail.str();
  return out;
}

namespace {

Dfa flip_one(Dfa d, std::uint64_t seed) {
  const std::size_t q = seed % d.size();
  d.accepting[q] = !d.accepting[q];
  return d;
}

/// Smallest subformula (by repeatedly descending into children) that still fails.
template <class F, class Fails>
F shrink(F f, Fails fails) {
  for (bool progress = true; progress;) {
    progress = false;
    for (const auto& c : f.children()) {
      if (fails(c)) {
        f = c;
        progress = true;
        break;
      }
    }
  }
  return f;
}

}  // namespace

OracleReport run_oracle_check(const OracleOptions& options) {
  OracleReport report;
  Rng rng(options.seed);

  SuiteStats games{"weak-games"};
  for (std::size_t i = 0; i < options.games; ++i) {
    const RandomGame g = random_weak_game(rng, options.max_states);
    const std::uint64_t fs = rng.next();
    const GameCheck c = check_game(g, options.fault, fs);
    ++games.cases;
    games.checks += 5;
    if (c.strategy_verdict) {
      ++report.strategies_checked;
      if (*c.strategy_verdict != "failed") ++report.strategies_verified;
    }
    if (!c.buchi_equals_cobuchi) ++report.buchi_cobuchi_differences;
    if (!c.structure.ok()) ++report.structure_violations;
    if (!c.ok) {
      ++games.mismatches;
      report.mismatches.push_back({games.name, i, describe_game(g), c.detail});
    }
  }
  report.suites.push_back(games);

  SuiteStats dfas{"ltlf-dfa"};
  for (std::size_t i = 0; i < options.formulas; ++i) {
    const std::size_t natoms = 1 + rng.below(options.formula_atoms);
    const Alphabet ab = make_alphabet(natoms);
    const LtlfFormula phi = random_ltlf(rng, 1 + rng.below(options.formula_size), ab.atoms());
    const std::uint64_t fs = rng.next();
    auto build = [&](const LtlfFormula& f) {
      Dfa d = minimize_dfa(compile_dfa(f, ab));
      return options.fault == Fault::FlipAccepting ? flip_one(d, fs) : d;
    };
    std::size_t traces = 0;
    ++dfas.cases;
    const auto err = check_dfa_against_semantics(build(phi), phi, options.trace_len, &traces);
    dfas.checks += traces;
    if (err) {
      ++dfas.mismatches;
      const LtlfFormula small = shrink(phi, [&](const LtlfFormula& f) {
        return check_dfa_against_semantics(build(f), f, options.trace_len).has_value();
      });
      const auto small_err = check_dfa_against_semantics(build(small), small, options.trace_len);
      report.mismatches.push_back({dfas.name, i, to_string(small), small_err ? *small_err : *err});
    }
  }
  report.suites.push_back(dfas);

  SuiteStats dwas{"obligation-dwa"};
  const Alphabet lab = make_alphabet(options.lasso_atoms);
  for (std::size_t i = 0; i < options.obligations; ++i) {
    const ObligationFormula psi = random_obligation(rng, lab.atoms());
    const std::uint64_t fs = rng.next();
    auto build = [&](const ObligationFormula& f, MinMode mode) {
      PipelineOptions po;
      po.mode = mode;
      const PipelineResult pr = compile_obligation(normalize(f), lab, po);
      Dwa d = pr.automaton ? *pr.automaton : minimize_dwa(explicit_product(pr.components));
      if (options.fault == Fault::FlipAccepting) {
        const std::size_t q = fs % d.size();
        d.accepting[q] = !d.accepting[q];
      }
      return d;
    };
    ++dwas.cases;
    for (const MinMode mode : {MinMode::Incremental, MinMode::Component}) {
      std::size_t lassos = 0;
      const auto err = check_dwa_against_lassos(build(psi, mode), psi, options.lasso_len, options.lasso_len, &lassos);
      dwas.checks += lassos;
      if (err) {
        ++dwas.mismatches;
        report.mismatches.push_back({dwas.name, i, to_string(psi), std::string(to_string(mode)) + ": " + *err});
        break;
      }
    }
  }
  report.suites.push_back(dwas);
  return report;
}

std::string OracleReport::text() const {
  std::ostringstream os;
  for (const auto& s : suites) {
    os << "suite " << s.name << ": cases=" << s.cases << " checks=" << s.checks << " mismatches=" << s.mismatches << "\n";
  }
  os << "strategies: checked=" << strategies_checked << " verified=" << strategies_verified << "\n";
  os << "buchi/cobuchi differences: " << buchi_cobuchi_differences << "\n";
  os << "iteration bound violations: " << structure_violations << "\n";
  for (const auto& m : mismatches) {
    os << "MISMATCH " << m.suite << " #" << m.index << ": " << m.detail << "\n";
    std::istringstream in(m.instance);
    for (std::string line; std::getline(in, line);) os << "  | " << line << "\n";
  }
  os << (ok() ? "RESULT ok" : "RESULT mismatch") << "\n";
  return os.str();
}

}  // namespace oblsynth
