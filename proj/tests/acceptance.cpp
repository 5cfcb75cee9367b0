// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oblsynth/bench.hpp"
#include "oblsynth/oracle.hpp"
#include "oblsynth/pipeline.hpp"
#include "oblsynth/random.hpp"

using namespace oblsynth;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Criterion {
  int id;
  std::string name;
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> failures;

  void fail(const std::string& why) {
    pass = false;
    if (failures.size() < 5) failures.push_back(why);
  }
};

std::vector<BenchmarkInstance> benchmark_set() {
  std::vector<BenchmarkInstance> out;
  for (std::size_t n = 1; n <= 3; ++n) out.push_back(gen_counter(n));
  for (const char* kind : {"conjE_forall", "conjE_exists", "disjA_forall", "disjA_exists"})
    for (std::size_t n = 1; n <= 8; ++n) out.push_back(gen_pattern(kind, n));
  for (std::size_t j = 1; j <= 6; ++j) out.push_back(gen_implication(j));
  return out;
}

std::string label(const BenchmarkInstance& b) { return b.family + "_" + std::to_string(b.size); }

const SolverKind kSymbolic[] = {SolverKind::Buchi, SolverKind::CoBuchi, SolverKind::SafeReach, SolverKind::Scc};

struct StrategyTally {
  std::size_t total = 0;
  std::size_t verified = 0;
  std::size_t bounded = 0;
  std::size_t failed = 0;

  void add(const VerifyResult& v) {
    ++total;
    if (v.verdict == Verdict::Verified) ++verified;
    if (v.verdict == Verdict::BoundedVerified) ++bounded;
    if (v.verdict == Verdict::Failed) ++failed;
  }
};

}  // namespace

int main() {
  std::vector<Criterion> cs(8);
  const char* names[] = {"benchmarks realizable under all symbolic solvers",
                         "random weak arenas: solvers agree with the explicit oracle",
                         "automata agree with trace and lasso semantics",
                         "minimize_dwa idempotent, pipeline modes isomorphic",
                         "SafeReach chain and SCC iteration bounds",
                         "Buchi equals co-Buchi on weak arenas",
                         "LTLf baseline bridge and dual family",
                         "strategy verification rate"};
  for (int i = 0; i < 8; ++i) {
    cs[i].id = i + 1;
    cs[i].name = names[i];
  }
  StrategyTally tally;
  const auto bench = benchmark_set();

  // 1, with strategies feeding 8
  {
    Criterion& c = cs[0];
    double worst = 0;
    std::string worst_run;
    std::size_t runs = 0;
    for (const auto& b : bench) {
      for (SolverKind k : kSymbolic) {
        for (MinMode m : {MinMode::Component, MinMode::Incremental}) {
          SynthConfig cfg;
          cfg.solver = k;
          cfg.mode = m;
          const auto t0 = Clock::now();
          const SynthOutcome o = synthesize(b.specification(), cfg);
          const double t = seconds_since(t0);
          ++runs;
          const std::string id = label(b) + "/" + to_string(k) + "/" + to_string(m);
          if (t > worst) {
            worst = t;
            worst_run = id;
          }
          if (!o.realizable) c.fail(id + " unrealizable");
          if (o.verification) tally.add(*o.verification);
          if (!o.verification || o.verification->verdict == Verdict::Failed) c.fail(id + " strategy not verified");
          if (t > 60) c.fail(id + " took " + std::to_string(t) + " s");
        }
      }
    }
    c.detail << runs << " runs, slowest " << worst_run << " " << worst << " s";
  }

  // 2, 5, 6, 8 on random weak games
  {
    Rng rng(20240601);
    const std::size_t games = 1000;
    std::size_t realizable = 0, cobuchi_diff = 0, structure_bad = 0, max_outer = 0;
    for (std::size_t i = 0; i < games; ++i) {
      const RandomGame g = random_weak_game(rng, 64);
      const GameCheck r = check_game(g);
      if (!r.ok) cs[1].fail("game " + std::to_string(i) + ": " + r.detail);
      if (r.realizable) ++realizable;
      if (!r.buchi_equals_cobuchi) {
        ++cobuchi_diff;
        cs[5].fail("game " + std::to_string(i));
      }
      if (!r.structure.ok()) {
        ++structure_bad;
        cs[4].fail("game " + std::to_string(i) + ": outer " + std::to_string(r.structure.safereach_outer) + ", sccs " +
                   std::to_string(r.structure.scc_count) + ", inner " + std::to_string(r.structure.scc_inner) +
                   ", states " + std::to_string(r.structure.states));
      }
      max_outer = std::max(max_outer, r.structure.safereach_outer);
      if (r.strategy_verdict) {
        ++tally.total;
        if (*r.strategy_verdict == "verified") ++tally.verified;
        else if (*r.strategy_verdict == "bounded-verified") ++tally.bounded;
        else {
          ++tally.failed;
          cs[7].fail("game " + std::to_string(i) + ": " + *r.strategy_verdict);
        }
      }
    }
    cs[1].detail << games << " games, " << realizable << " realizable";
    cs[4].detail << games << " games + benchmark arenas, " << structure_bad << " random violations, max outer "
                 << max_outer;
    cs[5].detail << games << " games + benchmark arenas, " << cobuchi_diff << " random differences";
  }

  // 5, 6 on benchmark arenas
  for (const auto& b : bench) {
    const SynthOutcome o = [&] {
      SynthConfig cfg;
      cfg.verify = false;
      return synthesize(b.specification(), cfg);
    }();
    const StructureCheck s = check_structure(o.arena);
    if (!s.ok()) cs[4].fail(label(b));
    if (solve_buchi(o.arena).region != solve_cobuchi(o.arena).region) cs[5].fail(label(b));
  }

  // 3
  {
    Criterion& c = cs[2];
    Rng rng(7);
    const Alphabet ab3 = make_alphabet(3);
    std::size_t formulas = 0, traces = 0;
    for (; formulas < 500; ++formulas) {
      const LtlfFormula phi = random_ltlf(rng, 1 + rng.below(8), ab3.atoms());
      std::size_t n = 0;
      if (auto bad = check_dfa_against_semantics(compile_dfa(phi, ab3), phi, 6, &n))
        c.fail(to_string(phi) + ": " + *bad);
      traces += n;
    }
    const Alphabet ab2 = make_alphabet(2);
    std::size_t obligations = 0, lassos = 0;
    for (; obligations < 200; ++obligations) {
      const ObligationFormula psi = random_obligation(rng, ab2.atoms());
      const PipelineResult p = compile_obligation(to_pnf(psi), ab2);
      std::size_t n = 0;
      if (auto bad = check_dwa_against_lassos(*p.automaton, psi, 4, 4, &n)) c.fail(to_string(psi) + ": " + *bad);
      lassos += n;
    }
    c.detail << formulas << " formulas / " << traces << " traces, " << obligations << " obligations / " << lassos
             << " lassos";
  }

  // 4
  {
    Criterion& c = cs[3];
    std::size_t checked = 0;
    for (const auto& b : bench) {
      const Specification spec = b.specification();
      const ObligationFormula pnf = normalize(spec.formula);
      const Alphabet ab = spec.partition.alphabet();
      PipelineOptions inc;
      inc.tau = 256;
      PipelineOptions comp = inc;
      comp.mode = MinMode::Component;
      const Dwa a = minimize_dwa(*compile_obligation(pnf, ab, inc).automaton);
      const Dwa m = minimize_dwa(explicit_product(compile_obligation(pnf, ab, comp).components));
      if (!isomorphic(minimize_dwa(a), a)) c.fail(label(b) + " not idempotent");
      if (!isomorphic(a, m)) c.fail(label(b) + " modes differ: " + std::to_string(a.size()) + " vs " + std::to_string(m.size()));
      ++checked;
    }
    c.detail << checked << " benchmarks";
  }

  // 7
  {
    Criterion& c = cs[6];
    for (std::size_t n = 1; n <= 6; ++n) {
      const BenchmarkInstance b = gen_pattern("conjE_exists", n);
      std::vector<LtlfFormula> parts;
      for (std::size_t i = 1; i <= n; ++i)
        parts.push_back(LtlfFormula::atom("a" + std::to_string(i)) | LtlfFormula::atom("e" + std::to_string(i)));
      const bool baseline = synth_ltlf(LtlfFormula::conjunction(parts), b.partition).result.realizable;
      SynthConfig cfg;
      cfg.verify = false;
      const bool full = synthesize(b.specification(), cfg).realizable;
      if (baseline != full) c.fail("n=" + std::to_string(n));
    }
    for (std::size_t n = 1; n <= 3; ++n) {
      const BenchmarkInstance d = gen_pattern("conjE_exists_dual", n);
      for (SolverKind k : {SolverKind::SafeReach, SolverKind::Explicit}) {
        SynthConfig cfg;
        cfg.solver = k;
        cfg.verify = false;
        if (synthesize(d.specification(), cfg).realizable) c.fail("dual n=" + std::to_string(n) + " realizable");
      }
    }
    c.detail << "conjE_exists n<=6 vs baseline, dual n<=3";
  }

  // 8
  {
    Criterion& c = cs[7];
    const double bounded_rate = tally.total ? double(tally.bounded) / double(tally.total) : 0;
    if (tally.failed > 0) c.fail(std::to_string(tally.failed) + " failed");
    if (bounded_rate > 0.10) c.fail("bounded-verified rate " + std::to_string(bounded_rate));
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu strategies, %zu verified, %zu bounded (%.1f%%), %zu failed", tally.total,
                  tally.verified, tally.bounded, 100 * bounded_rate, tally.failed);
    c.detail << buf;
  }

  bool all = true;
  for (const auto& c : cs) {
    std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " (" << c.detail.str()
              << ")\n";
    for (const auto& f : c.failures) std::cout << "    " << f << "\n";
    all = all && c.pass;
  }
  return all ? 0 : 1;
}
