#include "linpbt/vanilla.hpp"

#include <stdexcept>

#include "linpbt/builtins.hpp"
#include "linpbt/errors.hpp"
#include "frame.hpp"

namespace linpbt {

bool VanillaEngine::solve(Term goal, const Certificate& cert, Sink sink) {
  if (busy_) throw std::logic_error("vanilla engine re-entered; use a separate engine for nested searches");
  busy_ = true;
  struct Reset {
    bool& b;
    ~Reset() { b = false; }
  } reset{busy_};
  bool stopped = run(goal, cert, [&](const Certificate& r) { return sink(r); });
  return stopped || aborted_;
}

bool VanillaEngine::solve_first(Term goal, const Certificate& cert) {
  bool found = false;
  solve(goal, cert, [&](const Certificate&) {
    found = true;
    return true;
  });
  return found;
}

bool VanillaEngine::refute(Term goal, const Certificate& cert) {
  if (!store_.is_ground(goal)) throw UnsoundNegation("cannot refute non-ground goal " + pretty(goal, &store_));
  auto cp = store_.checkpoint();
  bool found = solve_first(goal, cert);
  store_.undo(cp);
  return !found;
}

bool VanillaEngine::run(Term goal, const Certificate& cert, Cont k) {
  if (!tick()) return true;
  GoalView v = view_goal(store_, goal, Dialect::Vanilla);
  switch (v.kind) {
    case GoalKind::Atom:
      return run_atom(v.left, cert, k);
    case GoalKind::True:
      return k(cert);
    case GoalKind::Conj: {
      const ExpertOutcome o = expert(Rule::Tensor, cert);
      const Term right = v.right;
      return run(v.left, o.first, [&](const Certificate& r1) {
        return run(right, o.second_after(r1), [&](const Certificate& r2) { return k(conclude(cert, r2)); });
      });
    }
    default:
      break;
  }
  if (store_.deref(goal).is_var()) throw Floundering("unbound goal: " + pretty(goal, &store_));
  throw IllFormedGoal(std::string(v.problem ? v.problem : "ill-formed goal") + ": " + pretty(goal, &store_));
}

bool VanillaEngine::run_atom(Term atom, const Certificate& cert, Cont k) {
  const PredicateKey key{atom.functor(), atom.arity()};
  if (const Builtin* b = find_builtin(key)) {
    auto cp = store_.checkpoint();
    if (b->fn(store_, atom.args()) && k(cert)) return true;
    store_.undo(cp);
    return false;
  }
  const std::vector<Clause>* defs = program_.clauses(key);
  if (!defs) return false;
  UnfoldPlan plan(cert, *defs);
  if (plan.empty()) return false;
  const IndexKey goal_key = atom.arity() > 0 ? IndexKey::of(store_.deref(atom.arg(0))) : IndexKey{};
  detail::Frame frame;
  std::size_t index = 0;
  Certificate cont;
  while (plan.next(index, cont)) {
    const Clause& c = (*defs)[index];
    if (!c.first_arg.compatible(goal_key)) continue;
    auto cp = store_.checkpoint();
    std::span<Term> vars = frame.reset(c.num_vars);
    bool matched = true;
    for (std::uint32_t j = 0; j < atom.arity() && matched; ++j) {
      matched = match_frozen(store_, c.head.arg(j), atom.arg(j), vars);
    }
    if (matched) {
      Term body = thaw(store_, c.body, vars);
      if (run(body, cont, [&](const Certificate& r) { return k(conclude(cert, r)); })) return true;
    }
    store_.undo(cp);
  }
  return false;
}

}  // namespace linpbt
