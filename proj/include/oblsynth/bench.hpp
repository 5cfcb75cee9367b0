#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oblsynth/dwa.hpp"
#include "oblsynth/obligation.hpp"
#include "oblsynth/solvers.hpp"

namespace oblsynth {

struct BenchmarkInstance {
  std::string family;
  std::size_t size = 0;
  std::string formula;
  VariablePartition partition;
  bool expected_realizable = true;
  std::vector<std::string> notes;  // written as header comments

  std::string spec_text() const;
  std::string part_text() const;
  Specification specification() const;
};

/// Families run by default: counter, the four patterns, implication.
const std::vector<std::string>& benchmark_families();
/// Also accepted by make_instance: conjE_exists_dual (unrealizable), counter_repaired.
bool is_family(const std::string& family);

/// The counter family; `repaired` replaces the triple-X increment rule by a single X.
BenchmarkInstance gen_counter(std::size_t n, bool repaired = false);
/// kind is one of conjE_forall, conjE_exists, disjA_forall, disjA_exists, conjE_exists_dual.
BenchmarkInstance gen_pattern(const std::string& kind, std::size_t n);
BenchmarkInstance gen_implication(std::size_t j);
BenchmarkInstance make_instance(const std::string& family, std::size_t size);

/// Writes <family>_<size>.spec and .part into `dir`; returns the spec path.
std::string write_instance(const BenchmarkInstance& inst, const std::string& dir);

/// Drops `#` comments; used for spec and partition files.
std::string strip_comments(const std::string& text);

struct BenchCell {
  std::string family;
  std::size_t size = 0;
  SolverKind solver = SolverKind::SafeReach;
  MinMode mode = MinMode::Incremental;
};

struct BenchRow {
  BenchCell cell;
  std::string status;  // ok, timeout, memout, error
  std::optional<bool> realizable;
  double wall_ms = 0;
  std::size_t arena_bits = 0;
  std::size_t outer_iters = 0;
  std::size_t inner_iters = 0;
  std::uint64_t bdd_ops = 0;
  std::size_t repetition = 0;
  std::string verdict;  // strategy verification verdict
  std::string message;
};

struct BenchOptions {
  std::vector<std::string> families;
  std::map<std::string, std::vector<std::size_t>> sizes;  // per family; default desk-scale
  std::vector<SolverKind> solvers{SolverKind::Buchi, SolverKind::CoBuchi, SolverKind::SafeReach, SolverKind::Scc};
  std::vector<MinMode> modes{MinMode::Component, MinMode::Incremental};
  double time_limit_s = 60;
  std::size_t memory_limit_mb = 4096;
  std::size_t repetitions = 1;
  std::size_t tau = 256;
  bool isolate = true;  // one subprocess per cell
  bool verify = true;
};

/// Desk-scale sizes: counter 1..4, patterns 1..10, implication 1..8.
std::vector<std::size_t> default_sizes(const std::string& family);

/// Runs one cell in the current process.
BenchRow run_cell(const BenchCell& cell, const BenchOptions& options);
/// Runs the matrix; per-cell failures become rows, never exceptions.
std::vector<BenchRow> run_bench(const BenchOptions& options);

extern const char* const kBenchCsvHeader;
std::string bench_csv(const std::vector<BenchRow>& rows);
std::string bench_json(const std::vector<BenchRow>& rows, const BenchOptions& options);

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t row) : std::runtime_error(what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

struct PlotOutput {
  std::string svg;
  std::string aggregated_csv;
};
/// Median wall time per (family, solver, mode, size) over rows with status ok; log y axis.
PlotOutput emit_plot(const std::string& csv);

}  // namespace oblsynth
