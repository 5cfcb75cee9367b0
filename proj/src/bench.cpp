#include "oblsynth/bench.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oblsynth/pipeline.hpp"

namespace oblsynth {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string idx(const std::string& name, std::size_t i) { return name + std::to_string(i); }

}  // namespace

std::string BenchmarkInstance::spec_text() const {
  std::string out;
  for (const auto& n : notes) out += "# " + n + "\n";
  return out + formula + "\n";
}

std::string BenchmarkInstance::part_text() const {
  std::string out;
  for (const auto& n : notes) out += "# " + n + "\n";
  return out + to_string(partition);
}

Specification BenchmarkInstance::specification() const { return parse_spec(formula, to_string(partition)); }

const std::vector<std::string>& benchmark_families() {
  static const std::vector<std::string> f{"counter",      "conjE_forall", "conjE_exists",
                                          "disjA_forall", "disjA_exists", "implication"};
  return f;
}

bool is_family(const std::string& family) {
  const auto& f = benchmark_families();
  return std::find(f.begin(), f.end(), family) != f.end() || family == "conjE_exists_dual" ||
         family == "counter_repaired";
}

BenchmarkInstance gen_counter(std::size_t n, bool repaired) {
  if (n < 1) throw std::invalid_argument("counter needs n >= 1");
  BenchmarkInstance inst;
  inst.family = repaired ? "counter_repaired" : "counter";
  inst.size = n;
  std::vector<std::string> init;
  for (std::size_t i = 0; i < n; ++i) init.push_back("!" + idx("c", i));
  for (std::size_t i = 0; i < n; ++i) init.push_back("!" + idx("b", i));
  const std::string inc = repaired ? "G(add -> X(c0))" : "G(add -> (X(c0) & X(X(c0)) & X(X(X(c0)))))";
  const std::string alw = "G(F(add & X false))";
  std::vector<std::string> cases;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string c = idx("c", i), b = idx("b", i), c1 = idx("c", i + 1);
    cases.push_back("((!" + c + " & !" + b + ") -> X(!" + b + " & !" + c1 + "))");
    cases.push_back("((!" + c + " & " + b + ") -> X(" + b + " & !" + c1 + "))");
    cases.push_back("((" + c + " & !" + b + ") -> X(" + b + " & !" + c1 + "))");
    cases.push_back("((" + c + " & " + b + ") -> X(!" + b + " & " + c1 + "))");
  }
  const std::string trans = "G(" + join(cases, " & ") + ")";
  std::vector<std::string> goal;
  for (std::size_t i = 0; i < n; ++i) goal.push_back(idx("b", i));
  goal.push_back("X false");
  inst.formula = "forall((" + join(init, " & ") + ") & " + inc + " & " + alw + " & " + trans + ") -> exists(F(" +
                 join(goal, " & ") + "))";
  inst.partition.outputs = {"add"};
  for (std::size_t i = 0; i < n; ++i) inst.partition.inputs.push_back(idx("b", i));
  for (std::size_t i = 0; i <= n; ++i) inst.partition.inputs.push_back(idx("c", i));
  inst.notes = {"counter family, n = " + std::to_string(n),
                "assumption: b_i and c_i (including the carry-out c" + std::to_string(n) +
                    ") are environment inputs; only add is a system output"};
  if (repaired) inst.notes.push_back("variant: increment rule uses a single X (not part of the acceptance matrix)");
  return inst;
}

BenchmarkInstance gen_pattern(const std::string& kind, std::size_t n) {
  if (n < 1) throw std::invalid_argument("pattern needs n >= 1");
  const bool dual = kind == "conjE_exists_dual";
  auto phi = [&](std::size_t i) {
    return "F((" + idx("e", i) + (dual ? " & " : " | ") + idx("a", i) + ") & X false)";
  };
  std::vector<std::string> parts;
  std::string sep;
  for (std::size_t i = 1; i <= n; ++i) {
    std::string q;
    if (kind == "conjE_forall") {
      q = i < n ? "exists" : "forall";
      sep = " & ";
    } else if (kind == "conjE_exists" || dual) {
      q = "exists";
      sep = " & ";
    } else if (kind == "disjA_forall") {
      q = "forall";
      sep = " | ";
    } else if (kind == "disjA_exists") {
      q = i < n ? "forall" : "exists";
      sep = " | ";
    } else {
      throw std::invalid_argument("unknown pattern kind '" + kind + "'");
    }
    parts.push_back(q + "(" + phi(i) + ")");
  }
  BenchmarkInstance inst;
  inst.family = kind;
  inst.size = n;
  inst.formula = join(parts, sep);
  for (std::size_t i = 1; i <= n; ++i) inst.partition.outputs.push_back(idx("a", i));
  for (std::size_t i = 1; i <= n; ++i) inst.partition.inputs.push_back(idx("e", i));
  inst.expected_realizable = !dual;
  inst.notes = {kind + " pattern, n = " + std::to_string(n)};
  if (kind == "conjE_forall" && n == 1) inst.notes.push_back("degenerate: a single forall component");
  if (dual) inst.notes.push_back("dual sanity family: the environment withholds e_i");
  return inst;
}

BenchmarkInstance gen_implication(std::size_t j) {
  if (j < 1) throw std::invalid_argument("implication needs j >= 1");
  std::vector<std::string> parts;
  for (std::size_t i = 1; i <= j; ++i) {
    parts.push_back("(exists(F " + idx("a", i) + ") -> exists(F " + idx("e", i) + "))");
  }
  BenchmarkInstance inst;
  inst.family = "implication";
  inst.size = j;
  inst.formula = join(parts, " & ");
  for (std::size_t i = 1; i <= j; ++i) inst.partition.outputs.push_back(idx("e", i));
  for (std::size_t i = 1; i <= j; ++i) inst.partition.inputs.push_back(idx("a", i));
  inst.notes = {"implication family, j = " + std::to_string(j)};
  return inst;
}

BenchmarkInstance make_instance(const std::string& family, std::size_t size) {
  if (family == "counter") return gen_counter(size);
  if (family == "counter_repaired") return gen_counter(size, true);
  if (family == "implication") return gen_implication(size);
  return gen_pattern(family, size);
}

std::string write_instance(const BenchmarkInstance& inst, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string base = dir + "/" + inst.family + "_" + std::to_string(inst.size);
  std::ofstream(base + ".spec") << inst.spec_text();
  std::ofstream(base + ".part") << inst.part_text();
  return base + ".spec";
}

std::string strip_comments(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    out += line + "\n";
  }
  return out;
}

std::vector<std::size_t> default_sizes(const std::string& family) {
  std::size_t hi = 10;
  if (family == "counter" || family == "counter_repaired") hi = 4;
  if (family == "implication") hi = 8;
  if (family == "conjE_exists_dual") hi = 3;
  std::vector<std::size_t> s;
  for (std::size_t i = 1; i <= hi; ++i) s.push_back(i);
  return s;
}

BenchRow run_cell(const BenchCell& cell, const BenchOptions& options) {
  BenchRow row;
  row.cell = cell;
  const auto start = std::chrono::steady_clock::now();
  try {
    const BenchmarkInstance inst = make_instance(cell.family, cell.size);
    SynthConfig cfg;
    cfg.solver = cell.solver;
    cfg.mode = cell.mode;
    cfg.tau = options.tau;
    cfg.verify = options.verify;
    const SynthOutcome out = synthesize(inst.specification(), cfg);
    row.realizable = out.realizable;
    row.arena_bits = out.arena.state_bits();
    row.outer_iters = out.result.counters.outer_iters;
    row.inner_iters = out.result.counters.inner_iters;
    row.bdd_ops = out.result.counters.bdd_ops;
    row.status = "ok";
    if (out.verification) {
      row.verdict = to_string(out.verification->verdict);
      if (!out.verification->ok()) {
        row.status = "error";
        row.message = "strategy verification failed: " + out.verification->message;
      }
    }
    if (out.realizable != inst.expected_realizable) {
      row.status = "error";
      row.message = "realizability differs from the expected value";
    }
  } catch (const std::bad_alloc&) {
    row.status = "memout";
  } catch (const bdd::CapacityError& e) {
    row.status = "memout";
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

namespace {

nlohmann::json row_to_json(const BenchRow& r) {
  nlohmann::json j;
  j["family"] = r.cell.family;
  j["size"] = r.cell.size;
  j["solver"] = to_string(r.cell.solver);
  j["min_mode"] = to_string(r.cell.mode);
  j["status"] = r.status;
  j["realizable"] = r.realizable ? nlohmann::json(*r.realizable) : nlohmann::json(nullptr);
  j["wall_ms"] = r.wall_ms;
  j["arena_bits"] = r.arena_bits;
  j["outer_iters"] = r.outer_iters;
  j["inner_iters"] = r.inner_iters;
  j["bdd_ops"] = r.bdd_ops;
  j["repetition"] = r.repetition;
  j["verdict"] = r.verdict;
  j["message"] = r.message;
  return j;
}

void row_from_json(const nlohmann::json& j, BenchRow& r) {
  r.status = j.at("status").get<std::string>();
  if (!j.at("realizable").is_null()) r.realizable = j.at("realizable").get<bool>();
  r.wall_ms = j.at("wall_ms").get<double>();
  r.arena_bits = j.at("arena_bits").get<std::size_t>();
  r.outer_iters = j.at("outer_iters").get<std::size_t>();
  r.inner_iters = j.at("inner_iters").get<std::size_t>();
  r.bdd_ops = j.at("bdd_ops").get<std::uint64_t>();
  r.verdict = j.at("verdict").get<std::string>();
  r.message = j.at("message").get<std::string>();
}

BenchRow run_isolated(const BenchCell& cell, const BenchOptions& options) {
  int fds[2];
  if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    close(fds[0]);
    if (options.memory_limit_mb) {
      rlimit lim{};
      lim.rlim_cur = lim.rlim_max = static_cast<rlim_t>(options.memory_limit_mb) << 20;
      setrlimit(RLIMIT_AS, &lim);
    }
    const std::string text = row_to_json(run_cell(cell, options)).dump() + "\n";
    std::size_t off = 0;
    while (off < text.size()) {
      const ssize_t w = write(fds[1], text.data() + off, text.size() - off);
      if (w <= 0) break;
      off += static_cast<std::size_t>(w);
    }
    close(fds[1]);
    _exit(0);
  }
  close(fds[1]);
  std::string data;
  bool timed_out = false;
  char buf[4096];
  for (;;) {
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double left = options.time_limit_s - elapsed;
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    const int rc = poll(&p, 1, static_cast<int>(std::min(left * 1000.0, 1000.0)) + 1);
    if (rc < 0) continue;
    if (rc == 0) continue;
    const ssize_t n = read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    data.append(buf, static_cast<std::size_t>(n));
  }
  if (timed_out) kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  close(fds[0]);

  BenchRow row;
  row.cell = cell;
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (timed_out) {
    row.status = "timeout";
    return row;
  }
  try {
    row_from_json(nlohmann::json::parse(data), row);
  } catch (const std::exception&) {
    row.status = WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL ? "memout" : "error";
    row.message = WIFSIGNALED(status) ? "child terminated by signal " + std::to_string(WTERMSIG(status))
                                      : "child produced no result";
  }
  return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  std::vector<BenchRow> rows;
  const auto families = options.families.empty() ? benchmark_families() : options.families;
  for (const auto& family : families) {
    auto it = options.sizes.find(family);
    const auto sizes = it != options.sizes.end() ? it->second : default_sizes(family);
    for (const auto size : sizes) {
      for (const auto mode : options.modes) {
        for (const auto solver : options.solvers) {
          for (std::size_t rep = 0; rep < std::max<std::size_t>(options.repetitions, 1); ++rep) {
            const BenchCell cell{family, size, solver, mode};
            BenchRow row;
            try {
              row = options.isolate ? run_isolated(cell, options) : run_cell(cell, options);
            } catch (const std::exception& e) {
              row.cell = cell;
              row.status = "error";
              row.message = e.what();
            }
            row.repetition = rep;
            rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  return rows;
}

const char* const kBenchCsvHeader = "family,size,solver,min_mode,status,realizable,wall_ms,arena_bits,outer_iters,inner_iters,bdd_ops";

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << kBenchCsvHeader << "\n";
  for (const auto& r : rows) {
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
    os << r.cell.family << "," << r.cell.size << "," << to_string(r.cell.solver) << "," << to_string(r.cell.mode) << ","
       << r.status << "," << (r.realizable ? (*r.realizable ? "true" : "false") : "") << "," << wall << ",";
    if (r.status == "ok" || r.status == "error") {
      os << r.arena_bits << "," << r.outer_iters << "," << r.inner_iters << "," << r.bdd_ops;
    } else {
      os << ",,,";
    }
    os << "\n";
  }
  return os.str();
}

std::string bench_json(const std::vector<BenchRow>& rows, const BenchOptions& options) {
  nlohmann::json j;
  nlohmann::json cfg;
  cfg["time_limit_s"] = options.time_limit_s;
  cfg["memory_limit_mb"] = options.memory_limit_mb;
  cfg["repetitions"] = options.repetitions;
  cfg["min_threshold"] = options.tau;
  cfg["isolate"] = options.isolate;
  cfg["verify"] = options.verify;
  j["config"] = cfg;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(row_to_json(r));
  return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", v);
  return b;
}

}  // namespace

PlotOutput emit_plot(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t row = 0;
  // (family, solver, mode) -> size -> times
  std::map<std::tuple<std::string, std::string, std::string>, std::map<std::size_t, std::vector<double>>> series;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (!header_seen) {
      if (line.rfind(kBenchCsvHeader, 0) != 0) throw CsvError("row 1: unexpected header", row);
      header_seen = true;
      continue;
    }
    if (f.size() != 11) throw CsvError("row " + std::to_string(row) + ": expected 11 fields", row);
    if (f[4] != "ok") continue;
    try {
      std::size_t pos = 0;
      const std::size_t size = std::stoul(f[1], &pos);
      if (pos != f[1].size()) throw std::invalid_argument("size");
      const double wall = std::stod(f[6]);
      series[{f[0], f[2], f[3]}][size].push_back(wall);
    } catch (const std::exception&) {
      throw CsvError("row " + std::to_string(row) + ": bad number", row);
    }
  }

  PlotOutput out;
  std::ostringstream agg;
  agg << "family,solver,min_mode,size,median_wall_ms,runs\n";
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> lines;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& [key, by_size] : series) {
    const auto& [fam, solver, mode] = key;
    std::vector<std::pair<double, double>> pts;
    for (auto& [size, times] : by_size) {
      std::sort(times.begin(), times.end());
      const std::size_t m = times.size();
      const double med = m % 2 ? times[m / 2] : (times[m / 2 - 1] + times[m / 2]) / 2;
      agg << fam << "," << solver << "," << mode << "," << size << "," << fmt(med) << "," << m << "\n";
      pts.push_back({static_cast<double>(size), med});
      xmin = std::min(xmin, static_cast<double>(size));
      xmax = std::max(xmax, static_cast<double>(size));
      ymin = std::min(ymin, std::max(med, 0.01));
      ymax = std::max(ymax, std::max(med, 0.01));
    }
    lines.push_back({fam + " " + solver + "/" + mode, std::move(pts)});
  }
  out.aggregated_csv = agg.str();

  const double W = 640, H = 400, L = 70, R = 190, T = 20, B = 50;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">size</text>\n";
  svg << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (T + H - B) / 2
      << ")\">median wall time (ms, log)</text>\n";
  if (!lines.empty()) {
    const double lo = std::floor(std::log10(ymin)), hi = std::max(lo + 1, std::ceil(std::log10(ymax)));
    if (xmax == xmin) {
      xmin -= 1;
      xmax += 1;
    }
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (std::log10(std::max(y, 0.01)) - lo) / (hi - lo) * (H - T - B); };
    for (double d = lo; d <= hi; d += 1) {
      svg << "<text x=\"" << L - 6 << "\" y=\"" << fmt(py(std::pow(10, d)) + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    std::set<double> xs;
    for (const auto& l : lines) {
      for (const auto& p : l.second) xs.insert(p.first);
    }
    for (const double x : xs) {
      svg << "<text x=\"" << fmt(px(x)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << x << "</text>\n";
    }
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const char* c = colors[i % 8];
      std::string pts;
      for (const auto& [x, y] : lines[i].second) pts += (pts.empty() ? "" : " ") + fmt(px(x)) + "," + fmt(py(y));
      svg << "<polyline fill=\"none\" stroke=\"" << c << "\" points=\"" << pts << "\"/>\n";
      for (const auto& [x, y] : lines[i].second) {
        svg << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
      }
      const double ly = T + 14.0 * static_cast<double>(i);
      svg << "<text x=\"" << W - R + 10 << "\" y=\"" << ly + 4 << "\" fill=\"" << c << "\">" << lines[i].first << "</text>\n";
    }
  }
  svg << "</svg>\n";
  out.svg = svg.str();
  return out;
}

}  // namespace oblsynth
