#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linpbt/corpus.hpp"
#include "linpbt/pbt.hpp"

namespace linpbt {

// Row label for the unmutated program.
inline constexpr std::string_view kNoMutant = "none";

struct MatrixCell {
  std::string mutant;
  std::string property;
  bool killed = false;
  std::string cex;  // generated bindings of the counterexample
  double seconds = 0;
  std::uint64_t generated = 0;
  std::uint64_t tested = 0;
  friend bool operator==(const MatrixCell&, const MatrixCell&) = default;
};

struct MatrixReport {
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<MatrixCell> cells;  // row-major

  const MatrixCell* find(std::string_view mutant, std::string_view property) const;
  // Properties that killed the mutant, in column order.
  std::vector<std::string> kills(std::string_view mutant) const;

  // mutant,property,verdict,cex,seconds,generated,tested; seconds is blank without timing.
  std::string to_csv(bool timing = true) const;
  static MatrixReport from_csv(std::string_view text);
  std::string to_table(bool timing = true) const;
  std::string to_json(bool timing = true) const;
  friend bool operator==(const MatrixReport&, const MatrixReport&) = default;
};

struct MatrixOptions {
  std::vector<std::string> mutants;     // empty: every registered mutant
  std::vector<std::string> properties;  // empty: no columns
  bool include_unmutated = true;
  Strategy strategy = Exhaustive{};
  unsigned threads = 0;  // 0: hardware concurrency
};

// Runs every (mutant, property) cell; each cell gets its own store and engines.
MatrixReport run_matrix(const Spec& base, const MatrixOptions& options);

// Property suites over the IMP corpus.
const std::vector<std::string>& pbt_suite();  // dtx srx srv pr eq
const std::vector<std::string>& mbt_suite();  // exec_cl exec_lc type_cl type_lc

struct BenchRow {
  std::uint32_t bound = 0;
  double linear_seconds = 0;
  double vanilla_seconds = 0;
  std::uint64_t linear_generated = 0;
  std::uint64_t vanilla_generated = 0;
  double coverage = 0;  // fraction of linear candidates tested within the step budget
};

struct BenchOptions {
  std::string property = "eq";
  std::uint32_t from = 4;
  std::uint32_t to = 6;
  unsigned repetitions = 5;
  // Step budget for coverage: budget_factor * n^3 rule applications per search.
  double budget_factor = 200;
};

std::uint64_t coverage_budget(double factor, std::uint32_t n);

// Times the property on the linear spec and on its vanilla counterpart
// (the same-named property of the reference spec) for each size bound.
std::vector<BenchRow> run_bench(const Spec& linear, const Spec& vanilla, const BenchOptions& options);

std::string bench_table(const std::vector<BenchRow>& rows);

// Proof search recurses once per rule application, so deep runs need big stacks.
inline constexpr std::size_t kSearchStackBytes = std::size_t{1} << 30;

// Runs fn on `threads` threads with kSearchStackBytes stacks and joins them.
// Exceptions escaping fn are rethrown (the first one wins).
void run_parallel(unsigned threads, const std::function<void()>& fn);
inline void run_with_large_stack(const std::function<void()>& fn) { run_parallel(1, fn); }

}  // namespace linpbt
