#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "linpbt/certificate.hpp"
#include "linpbt/function_ref.hpp"
#include "linpbt/syntax.hpp"
#include "linpbt/term.hpp"

namespace linpbt {

struct Slot {
  Term assumption;
  Persistence persistence = Persistence::Linear;
  bool consumed = false;
};

// Ordered resource context. Persistent slots are never consumed.
struct ResourceContext {
  std::vector<Slot> slots;

  static ResourceContext from(std::span<const ContextEntry> entries);
  void add(Term t, Persistence p = Persistence::Linear) { slots.push_back({t, p, false}); }
  bool all_linear_consumed() const;
  std::size_t available_linear() const;
  // e.g. [a, [], !b] with [] marking a consumed slot.
  std::string fingerprint(const Store& store) const;
};

struct SearchOptions {
  // Abort after this many rule applications; 0 means unbounded.
  std::uint64_t step_limit = 0;
  std::ostream* trace = nullptr;
};

struct Solution {
  const ResourceContext& output;
  const Certificate& residual;
};

// Return true to stop the enumeration.
using SolutionSink = FunctionRef<bool(const Solution&)>;

// Common bookkeeping for both engines.
class Engine {
 public:
  Engine(const Program& program, Store& store, SearchOptions options)
      : program_(program), store_(store), options_(options) {}

  std::uint64_t steps() const { return steps_; }
  bool budget_exhausted() const { return aborted_; }
  void reset_counters() {
    steps_ = 0;
    aborted_ = false;
  }
  Store& store() { return store_; }
  const Program& program() const { return program_; }
  SearchOptions& options() { return options_; }

 protected:
  bool tick() {
    if (options_.step_limit != 0 && ++steps_ > options_.step_limit) {
      aborted_ = true;
      return false;
    }
    if (options_.step_limit == 0) ++steps_;
    return true;
  }

  const Program& program_;
  Store& store_;
  SearchOptions options_;
  std::uint64_t steps_ = 0;
  bool aborted_ = false;
};

// Certificate-driven proof search over the linear connectives with lazy context splitting.
// Not re-entrant: nested searches must use separate kernels over the same store.
class LinearKernel : public Engine {
 public:
  LinearKernel(const Program& program, Store& store, SearchOptions options = {})
      : Engine(program, store, options) {}

  // Enumerates solutions in search order. Returns true iff the sink (or the budget) stopped the search;
  // a stopped search leaves its bindings in the store.
  bool prove(Term goal, const ResourceContext& input, const Certificate& cert, SolutionSink sink);
  // Solutions that consume every linear slot.
  bool prove_closed(Term goal, const ResourceContext& input, const Certificate& cert, SolutionSink sink);
  // First closed solution; bindings stay in the store when found.
  bool solve_closed(Term goal, const ResourceContext& input, const Certificate& cert);
  // Negation as failure. Throws UnsoundNegation for non-ground goals.
  bool refute(Term goal, const ResourceContext& input, const Certificate& cert);

 private:
  using Cont = FunctionRef<bool(const Certificate&)>;

  bool solve(Term goal, const Certificate& cert, Cont k);
  bool solve_atom(Term atom, const Certificate& cert, Cont k);
  bool erase(const Certificate& cert, Cont k);
  void trace(Rule rule, Term goal, const Certificate& cert);

  ResourceContext work_;
  std::size_t consumed_ = 0;
  bool busy_ = false;
};

}  // namespace linpbt
