#include <unistd.h>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oblsynth/bench.hpp"
#include "oblsynth/dfa.hpp"
#include "oblsynth/oracle.hpp"
#include "oblsynth/pipeline.hpp"

using namespace oblsynth;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kNegative = 1, kInput = 2, kBudget = 3, kIo = 4, kInternal = 5 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string solver = "safereach";
  std::string min_mode = "incremental";
  std::size_t min_threshold = 256;
  std::size_t max_dfa_states = 1000000;
  std::size_t max_bdd_nodes = std::size_t{1} << 25;
  std::size_t verify_cap = std::size_t{1} << 20;
  double time_limit = 0;
  std::uint64_t seed = 1;
  std::string input;
  std::string part;
  std::string out;
  std::string format;
  bool verify = true;
  bool simplify = true;
  int verbosity = 0;

  nlohmann::json to_json() const {
    return {{"command", command},         {"solver", solver},          {"min_mode", min_mode},
            {"min_threshold", min_threshold}, {"max_dfa_states", max_dfa_states}, {"max_bdd_nodes", max_bdd_nodes},
            {"verify_cap", verify_cap},   {"time_limit", time_limit},  {"seed", seed},
            {"input", input},             {"part", part},              {"out", out},
            {"format", format},           {"verify", verify},          {"simplify", simplify},
            {"verbosity", verbosity}};
  }
  std::string line() const { return to_json().dump(); }
  SynthConfig synth() const {
    SynthConfig c;
    c.solver = parse_solver(solver);
    c.mode = parse_min_mode(min_mode);
    c.tau = min_threshold;
    c.simplify = simplify;
    c.verify = verify;
    c.max_dfa_states = max_dfa_states;
    c.max_bdd_nodes = max_bdd_nodes;
    c.verify_cap = verify_cap;
    return c;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a temporary sibling and renames, so failures leave no partial file.
void write_atomic(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp" + std::to_string(getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out.flush()) throw IoError("cannot write '" + path + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot write '" + path + "': " + ec.message());
  }
}

std::string default_part(const std::string& spec) {
  fs::path p(spec);
  p.replace_extension(".part");
  return p.string();
}

Specification load_spec(RunConfig& cfg) {
  if (cfg.part.empty()) cfg.part = default_part(cfg.input);
  const std::string formula = strip_comments(read_file(cfg.input));
  const std::string part = read_file(cfg.part);
  return parse_spec(formula, part);
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty() || cfg.out == "-") {
    std::cout << text;
  } else {
    write_atomic(cfg.out, text);
    std::cout << "wrote " << cfg.out << "\n";
  }
}

extern "C" void on_alarm(int) {
  static const char msg[] = "TIMEOUT\n";
  ssize_t ignored = write(STDOUT_FILENO, msg, sizeof msg - 1);
  (void)ignored;
  _exit(kBudget);
}

void arm_timer(const RunConfig& cfg) {
  if (cfg.time_limit > 0) {
    std::signal(SIGALRM, on_alarm);
    alarm(static_cast<unsigned>(std::max(1.0, cfg.time_limit)));
  }
}

int cmd_translate(RunConfig& cfg) {
  Dwa result;
  std::vector<std::string> comments;
  if (fs::path(cfg.input).extension() == ".hoa") {
    comments.push_back("config " + cfg.line());
    result = minimize_dwa(parse_hoa(read_file(cfg.input)));
  } else {
    const Specification spec = load_spec(cfg);
    comments.push_back("config " + cfg.line());
    validate(spec);
    PipelineOptions po;
    po.mode = parse_min_mode(cfg.min_mode);
    po.tau = cfg.min_threshold;
    po.compile.max_states = cfg.max_dfa_states;
    const ObligationFormula pnf = normalize(spec.formula, cfg.simplify);
    comments.push_back("pnf " + to_string(pnf));
    const PipelineResult pr = compile_obligation(pnf, spec.partition.alphabet(), po);
    result = minimize_dwa(pr.automaton ? *pr.automaton : explicit_product(pr.components));
  }
  compute_ranks(result);
  std::map<int, std::size_t> hist;
  for (const int r : result.rank) ++hist[r];
  std::cout << "config " << cfg.line() << "\n";
  std::cout << "states: " << result.size() << "\n";
  std::cout << "rank histogram:";
  for (const auto& [r, n] : hist) std::cout << " " << r << ":" << n;
  std::cout << "\n";
  emit(cfg, cfg.format == "dot" ? to_dot(result, "dwa") : export_hoa(result, cfg.input, comments));
  return kOk;
}

int cmd_synth(RunConfig& cfg) {
  const Specification spec = load_spec(cfg);
  std::cout << "config " << cfg.line() << "\n";
  const SynthOutcome out = synthesize(spec, cfg.synth());
  std::cout << "pnf: " << to_string(out.pnf) << "\n";
  std::cout << "automaton states: " << out.dwa_states << ", arena bits: " << out.arena.state_bits() << "\n";
  std::cout << "iterations: outer " << out.result.counters.outer_iters << ", inner " << out.result.counters.inner_iters
            << ", bdd ops " << out.result.counters.bdd_ops << "\n";
  if (!out.realizable) {
    std::cout << "UNREALIZABLE\n";
    return kNegative;
  }
  std::cout << "REALIZABLE\n";
  std::cout << "strategy states: " << out.strategy->size() << "\n";
  if (out.verification) {
    std::cout << "verification: " << to_string(out.verification->verdict) << " (product states "
              << out.verification->product_states << ")\n";
    if (!out.verification->ok()) throw InternalError("extracted strategy failed verification: " + out.verification->message);
  }
  if (!cfg.out.empty()) {
    const std::string text =
        cfg.format == "dot" ? strategy_to_dot(*out.strategy)
                            : export_strategy(*out.strategy, {"config " + cfg.line(), "spec " + to_string(spec.formula)});
    emit(cfg, text);
  }
  return kOk;
}

int cmd_solve(RunConfig& cfg) {
  const Specification spec = load_spec(cfg);
  std::cout << "config " << cfg.line() << "\n";
  std::vector<SolverKind> kinds;
  if (cfg.solver == "all") {
    kinds = {SolverKind::Buchi, SolverKind::CoBuchi, SolverKind::SafeReach, SolverKind::Scc, SolverKind::Explicit};
  } else {
    kinds = {parse_solver(cfg.solver)};
  }
  RunConfig base_cfg = cfg;
  base_cfg.solver = "safereach";
  SynthConfig sc = base_cfg.synth();
  sc.verify = false;
  SynthOutcome base = synthesize(spec, sc);
  const Arena& arena = base.arena;
  const bdd::Bdd reach = arena.reachable();
  std::optional<bdd::Bdd> first;
  bool agree = true;
  bool realizable = false;
  for (const auto k : kinds) {
    const SolveResult r = solve(arena, k);
    realizable = r.realizable;
    std::cout << to_string(k) << ": " << (r.realizable ? "realizable" : "unrealizable") << ", winning reachable states "
              << arena.count_states(r.region & reach) << "/" << arena.count_states(reach) << ", outer "
              << r.counters.outer_iters << ", inner " << r.counters.inner_iters << ", layers " << r.layers.size() << "\n";
    if (first && *first != (r.region & reach)) agree = false;
    if (!first) first = r.region & reach;
  }
  if (!agree) throw InternalError("solvers disagree on the winning region");
  std::cout << (realizable ? "REALIZABLE" : "UNREALIZABLE") << "\n";
  return realizable ? kOk : kNegative;
}

int cmd_verify(RunConfig& cfg, const std::string& strategy_path) {
  const MooreStrategy strat = import_strategy(read_file(strategy_path));
  const Specification spec = load_spec(cfg);
  std::cout << "config " << cfg.line() << "\n";
  validate(spec);
  PipelineOptions po;
  po.mode = MinMode::Component;
  const PipelineResult pr = compile_obligation(normalize(spec.formula, cfg.simplify), spec.partition.alphabet(), po);
  VerifyOptions vo;
  vo.max_product_states = cfg.verify_cap;
  const VerifyResult v = verify_strategy(strat, pr.components, vo);
  std::cout << "verdict: " << to_string(v.verdict) << " (product states " << v.product_states << ")\n";
  if (!v.message.empty()) std::cout << "message: " << v.message << "\n";
  if (v.counterexample) {
    const Alphabet ab = spec.partition.alphabet();
    auto show = [&](const FiniteTrace& t) {
      std::string s = "[";
      for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ", " : "") + ab.letter_to_string(t.letters[i]);
      return s + "]";
    };
    std::cout << "counterexample: u=" << show(v.counterexample->stem) << " v=" << show(v.counterexample->loop) << "\n";
  }
  return v.ok() ? kOk : kNegative;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto dash = item.find('-');
    if (dash != std::string::npos) {
      const std::size_t lo = std::stoul(item.substr(0, dash)), hi = std::stoul(item.substr(dash + 1));
      for (std::size_t i = lo; i <= hi; ++i) out.push_back(i);
    } else if (!item.empty()) {
      out.push_back(std::stoul(item));
    }
  }
  return out;
}

struct BenchArgs {
  std::vector<std::string> families;
  std::string sizes;
  std::vector<std::string> solvers;
  std::vector<std::string> modes;
  std::size_t repetitions = 1;
  std::size_t memory_mb = 4096;
  bool no_isolate = false;
  std::string plot_csv;
  bool instances_only = false;
};

int cmd_bench(RunConfig& cfg, const BenchArgs& args) {
  std::cout << "config " << cfg.line() << "\n";
  const std::string dir = cfg.out.empty() ? "bench_out" : cfg.out;
  if (!args.plot_csv.empty()) {
    const PlotOutput p = emit_plot(read_file(args.plot_csv));
    write_atomic(dir + "/plot.svg", p.svg);
    write_atomic(dir + "/plot.csv", p.aggregated_csv);
    std::cout << "wrote " << dir << "/plot.svg\n";
    return kOk;
  }
  BenchOptions o;
  o.families = args.families;
  for (const auto& f : o.families) {
    if (!is_family(f)) throw std::invalid_argument("unknown family '" + f + "'");
  }
  const auto families = o.families.empty() ? benchmark_families() : o.families;
  if (!args.sizes.empty()) {
    for (const auto& f : families) o.sizes[f] = parse_sizes(args.sizes);
  }
  if (!args.solvers.empty()) {
    o.solvers.clear();
    for (const auto& s : args.solvers) o.solvers.push_back(parse_solver(s));
  }
  if (!args.modes.empty()) {
    o.modes.clear();
    for (const auto& m : args.modes) o.modes.push_back(parse_min_mode(m));
  }
  o.time_limit_s = cfg.time_limit > 0 ? cfg.time_limit : 60;
  o.memory_limit_mb = args.memory_mb;
  o.repetitions = args.repetitions;
  o.tau = cfg.min_threshold;
  o.isolate = !args.no_isolate;
  o.verify = cfg.verify;

  for (const auto& f : families) {
    const auto it = o.sizes.find(f);
    for (const auto n : it != o.sizes.end() ? it->second : default_sizes(f)) {
      const BenchmarkInstance inst = make_instance(f, n);
      const std::string base = dir + "/instances/" + inst.family + "_" + std::to_string(n);
      write_atomic(base + ".spec", inst.spec_text());
      write_atomic(base + ".part", inst.part_text());
    }
  }
  if (args.instances_only) {
    std::cout << "wrote " << dir << "/instances\n";
    return kOk;
  }
  const auto rows = run_bench(o);
  const std::string csv = bench_csv(rows);
  nlohmann::json side = nlohmann::json::parse(bench_json(rows, o));
  side["run_config"] = cfg.to_json();
  write_atomic(dir + "/results.csv", csv);
  write_atomic(dir + "/results.json", side.dump(2) + "\n");
  const PlotOutput p = emit_plot(csv);
  write_atomic(dir + "/plot.svg", p.svg);
  write_atomic(dir + "/plot.csv", p.aggregated_csv);
  std::size_t bad = 0;
  for (const auto& r : rows) {
    std::cout << r.cell.family << " " << r.cell.size << " " << to_string(r.cell.solver) << " " << to_string(r.cell.mode)
              << " " << r.status << (r.message.empty() ? "" : " (" + r.message + ")") << "\n";
    bad += r.status == "error";
  }
  std::cout << "wrote " << dir << "/results.csv\n";
  return bad ? kInternal : kOk;
}

int cmd_oracle(RunConfig& cfg, OracleOptions o) {
  o.seed = cfg.seed;
  const OracleReport r = run_oracle_check(o);
  const std::string text = "config " + cfg.line() + "\n" + r.text();
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    write_atomic(cfg.out, text);
    std::cout << "wrote " << cfg.out << "\n" << (r.ok() ? "RESULT ok" : "RESULT mismatch") << "\n";
  }
  return r.ok() ? kOk : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oblsynth: synthesis for the obligation fragment of LTLf+"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string strategy_path;
  BenchArgs bargs;
  OracleOptions oopts;
  std::string fault = "none";

  auto common = [&](CLI::App* sub, bool spec_input) {
    if (spec_input) {
      sub->add_option("spec", cfg.input, "specification file (.spec; translate also takes .hoa)")->required();
      sub->add_option("--part", cfg.part, "partition file (default: spec path with .part)");
    }
    sub->add_option("--min-mode", cfg.min_mode, "component or incremental")
        ->check(CLI::IsMember({"component", "incremental"}));
    sub->add_option("--min-threshold", cfg.min_threshold, "product minimization threshold");
    sub->add_option("--max-dfa-states", cfg.max_dfa_states, "DFA state budget");
    sub->add_option("--max-bdd-nodes", cfg.max_bdd_nodes, "BDD node cap for the arena store");
    sub->add_option("--time-limit", cfg.time_limit, "seconds (0: none)");
    sub->add_option("--out", cfg.out, "output path");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_flag("--no-simplify", [&](std::int64_t) { cfg.simplify = false; }, "skip obligation simplification");
    sub->add_flag("-v,--verbose", cfg.verbosity, "verbosity");
  };

  auto* translate = app.add_subcommand("translate", "obligation formula to minimal DWA (HOA or DOT)");
  common(translate, true);
  translate->add_option("--format", cfg.format, "hoa or dot")->check(CLI::IsMember({"hoa", "dot"}));

  auto* synth = app.add_subcommand("synth", "decide realizability, extract and verify a strategy");
  common(synth, true);
  synth->add_option("--solver", cfg.solver, "buchi, cobuchi, safereach, scc or explicit");
  synth->add_option("--format", cfg.format, "strategy output: text or dot")->check(CLI::IsMember({"text", "dot"}));
  synth->add_flag("--no-verify", [&](std::int64_t) { cfg.verify = false; }, "skip strategy verification");
  synth->add_option("--verify-cap", cfg.verify_cap, "product state cap for full verification");

  auto* solve_cmd = app.add_subcommand("solve", "winning regions and iteration counts");
  common(solve_cmd, true);
  solve_cmd->add_option("--solver", cfg.solver, "a solver name or 'all'");

  auto* verify = app.add_subcommand("verify", "check a strategy file against a specification");
  verify->add_option("strategy", strategy_path, "strategy file")->required();
  common(verify, true);
  verify->add_option("--verify-cap", cfg.verify_cap, "product state cap for full verification");

  auto* bench = app.add_subcommand("bench", "run the benchmark matrix");
  common(bench, false);
  bench->add_option("--families", bargs.families, "families (default: all six)");
  bench->add_option("--sizes", bargs.sizes, "sizes, e.g. 1-4,6 (default: desk scale)");
  bench->add_option("--solver,--solvers", bargs.solvers, "solvers (default: the four symbolic ones)");
  bench->add_option("--min-modes", bargs.modes, "component and/or incremental (default: both)");
  bench->add_option("--repetitions", bargs.repetitions, "runs per cell");
  bench->add_option("--memory-limit", bargs.memory_mb, "per-cell address space limit in MB");
  bench->add_flag("--no-isolate", bargs.no_isolate, "run cells in this process");
  bench->add_option("--plot", bargs.plot_csv, "only render the plot of an existing CSV");
  bench->add_flag("--instances-only", bargs.instances_only, "only write instance files");
  bench->add_flag("--no-verify", [&](std::int64_t) { cfg.verify = false; }, "skip strategy verification");

  auto* oracle = app.add_subcommand("oracle-check", "differential tests against explicit oracles");
  common(oracle, false);
  oracle->add_option("--games", oopts.games, "random weak games");
  oracle->add_option("--max-states", oopts.max_states, "explicit state bound per game");
  oracle->add_option("--formulas", oopts.formulas, "random LTLf formulas");
  oracle->add_option("--formula-size", oopts.formula_size, "maximal formula size");
  oracle->add_option("--trace-length", oopts.trace_len, "maximal trace length");
  oracle->add_option("--obligations", oopts.obligations, "random obligation formulas");
  oracle->add_option("--lasso-length", oopts.lasso_len, "maximal |u| and |v|");
  oracle->add_option("--fault", fault, "none or flip-accepting")->check(CLI::IsMember({"none", "flip-accepting"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.format.empty()) cfg.format = cfg.command == "translate" ? "hoa" : "text";
  arm_timer(cfg);

  try {
    if (cfg.command == "translate") return cmd_translate(cfg);
    if (cfg.command == "synth") return cmd_synth(cfg);
    if (cfg.command == "solve") return cmd_solve(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg, strategy_path);
    if (cfg.command == "bench") return cmd_bench(cfg, bargs);
    oopts.fault = parse_fault(fault);
    return cmd_oracle(cfg, oopts);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kInput;
  } catch (const FragmentError& e) {
    std::cerr << "fragment error: " << e.what() << "\n";
    return kInput;
  } catch (const PartitionError& e) {
    std::cerr << "partition error: " << e.what() << "\n";
    return kInput;
  } catch (const UndeclaredAtomError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const CsvError& e) {
    std::cerr << "csv error: " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const StateBudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const bdd::CapacityError& e) {
    std::cerr << "capacity exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const EncodingOverflowError& e) {
    std::cerr << "encoding overflow: " << e.what() << "\n";
    return kBudget;
  } catch (const std::length_error& e) {
    std::cerr << "capacity exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const std::bad_alloc&) {
    std::cerr << "out of memory\n";
    return kBudget;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
