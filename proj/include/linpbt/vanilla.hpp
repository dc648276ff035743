#pragma once

#include "linpbt/kernel.hpp"

namespace linpbt {

// Certificate-driven meta-interpreter for plain Horn goals built from `,` and `true`.
class VanillaEngine : public Engine {
 public:
  VanillaEngine(const Program& program, Store& store, SearchOptions options = {})
      : Engine(program, store, options) {}

  using Sink = FunctionRef<bool(const Certificate& residual)>;

  // Enumerates solutions in search order; true iff stopped by the sink or the budget.
  bool solve(Term goal, const Certificate& cert, Sink sink);
  bool solve_first(Term goal, const Certificate& cert);
  bool refute(Term goal, const Certificate& cert);

 private:
  using Cont = FunctionRef<bool(const Certificate&)>;
  bool run(Term goal, const Certificate& cert, Cont k);
  bool run_atom(Term atom, const Certificate& cert, Cont k);
  bool busy_ = false;
};

}  // namespace linpbt
