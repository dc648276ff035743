#include "linpbt/kernel.hpp"

#include <algorithm>
#include <stdexcept>

#include "linpbt/builtins.hpp"
#include "linpbt/errors.hpp"
#include "frame.hpp"

namespace linpbt {

ResourceContext ResourceContext::from(std::span<const ContextEntry> entries) {
  ResourceContext c;
  for (const auto& e : entries) c.add(e.assumption, e.persistence);
  return c;
}

bool ResourceContext::all_linear_consumed() const { return available_linear() == 0; }

std::size_t ResourceContext::available_linear() const {
  return static_cast<std::size_t>(std::count_if(slots.begin(), slots.end(), [](const Slot& s) {
    return s.persistence == Persistence::Linear && !s.consumed;
  }));
}

std::string ResourceContext::fingerprint(const Store& store) const {
  std::string out = "[";
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i) out += ", ";
    const Slot& s = slots[i];
    if (s.persistence == Persistence::Persistent) {
      out += "!" + pretty(s.assumption, &store);
    } else if (s.consumed) {
      out += "[]";
    } else {
      out += pretty(s.assumption, &store);
    }
  }
  return out + "]";
}

namespace {

struct BusyGuard {
  bool& flag;
  explicit BusyGuard(bool& f) : flag(f) {
    if (flag) throw std::logic_error("kernel re-entered; use a separate kernel for nested searches");
    flag = true;
  }
  ~BusyGuard() { flag = false; }
};

std::size_t consumed_linear(const ResourceContext& c) {
  return static_cast<std::size_t>(std::count_if(c.slots.begin(), c.slots.end(), [](const Slot& s) {
    return s.persistence == Persistence::Linear && s.consumed;
  }));
}

}  // namespace

bool LinearKernel::prove(Term goal, const ResourceContext& input, const Certificate& cert, SolutionSink sink) {
  BusyGuard guard(busy_);
  work_ = input;
  consumed_ = consumed_linear(work_);
  bool stopped = solve(goal, cert, [&](const Certificate& r) { return sink(Solution{work_, r}); });
  return stopped || aborted_;
}

bool LinearKernel::prove_closed(Term goal, const ResourceContext& input, const Certificate& cert,
                                SolutionSink sink) {
  std::size_t linear = static_cast<std::size_t>(std::count_if(
      input.slots.begin(), input.slots.end(), [](const Slot& s) { return s.persistence == Persistence::Linear; }));
  return prove(goal, input, cert, [&](const Solution& s) {
    if (consumed_ != linear) return false;
    return sink(s);
  });
}

bool LinearKernel::solve_closed(Term goal, const ResourceContext& input, const Certificate& cert) {
  bool found = false;
  prove_closed(goal, input, cert, [&](const Solution&) {
    found = true;
    return true;
  });
  return found;
}

bool LinearKernel::refute(Term goal, const ResourceContext& input, const Certificate& cert) {
  if (!store_.is_ground(goal)) {
    throw UnsoundNegation("cannot refute non-ground goal " + pretty(goal, &store_));
  }
  auto cp = store_.checkpoint();
  bool found = solve_closed(goal, input, cert);
  store_.undo(cp);
  return !found;
}

void LinearKernel::trace(Rule rule, Term goal, const Certificate& cert) {
  if (!options_.trace) return;
  *options_.trace << rule_name(rule) << ' ' << pretty(goal, &store_) << ' ' << work_.fingerprint(store_) << ' '
                  << cert.to_string() << '\n';
}

bool LinearKernel::solve(Term goal, const Certificate& cert, Cont k) {
  if (!tick()) return true;
  GoalView v = view_goal(store_, goal, Dialect::Linear);
  switch (v.kind) {
    case GoalKind::Atom:
      return solve_atom(v.left, cert, k);

    case GoalKind::One:
      trace(Rule::One, goal, cert);
      return k(cert);

    case GoalKind::Erase:
      trace(Rule::Erase, goal, cert);
      return erase(cert, k);

    case GoalKind::Tensor: {
      trace(Rule::Tensor, goal, cert);
      const ExpertOutcome o = expert(Rule::Tensor, cert);
      const Term right = v.right;
      return solve(v.left, o.first, [&](const Certificate& r1) {
        return solve(right, o.second_after(r1), [&](const Certificate& r2) { return k(conclude(cert, r2)); });
      });
    }

    case GoalKind::With: {
      trace(Rule::With, goal, cert);
      const ExpertOutcome o = expert(Rule::With, cert);
      std::vector<std::uint32_t> entry;
      for (std::uint32_t i = 0; i < work_.slots.size(); ++i) {
        const Slot& s = work_.slots[i];
        if (s.persistence == Persistence::Linear && !s.consumed) entry.push_back(i);
      }
      const Term right = v.right;
      return solve(v.left, o.first, [&](const Certificate& r1) {
        std::vector<std::uint32_t> used;
        for (std::uint32_t i : entry) {
          if (work_.slots[i].consumed) used.push_back(i);
        }
        for (std::uint32_t i : used) work_.slots[i].consumed = false;
        consumed_ -= used.size();
        bool stop = solve(right, o.second, [&](const Certificate& r2) {
          // Both branches must consume exactly the same slots.
          std::size_t u = 0;
          for (std::uint32_t i : entry) {
            bool in_used = u < used.size() && used[u] == i;
            if (in_used) ++u;
            if (work_.slots[i].consumed != in_used) return false;
          }
          auto joint = join_with(cert, r1, r2);
          if (!joint) return false;
          return k(*joint);
        });
        if (stop) return true;
        for (std::uint32_t i : used) work_.slots[i].consumed = true;
        consumed_ += used.size();
        return false;
      });
    }

    case GoalKind::Limp: {
      trace(Rule::Lolli, goal, cert);
      const ExpertOutcome o = expert(Rule::Lolli, cert);
      const std::size_t index = work_.slots.size();
      work_.slots.push_back({v.left, Persistence::Linear, false});
      bool stop = solve(v.right, o.first, [&](const Certificate& r) {
        if (!work_.slots[index].consumed) return false;
        Slot saved = work_.slots[index];
        work_.slots.pop_back();
        --consumed_;
        if (k(conclude(cert, r))) return true;
        work_.slots.push_back(saved);
        ++consumed_;
        return false;
      });
      if (stop) return true;
      work_.slots.pop_back();
      return false;
    }

    case GoalKind::Bang: {
      trace(Rule::Bang, goal, cert);
      const ExpertOutcome o = expert(Rule::Bang, cert);
      const std::size_t entry = consumed_;
      return solve(v.left, o.first, [&](const Certificate& r) {
        if (consumed_ != entry) return false;
        return k(conclude(cert, r));
      });
    }

    case GoalKind::True:
    case GoalKind::Conj:
    case GoalKind::IllFormed:
      break;
  }
  Term g = store_.deref(goal);
  if (g.is_var() || (g.has_functor(kLimp, 2) && store_.deref(g.arg(0)).is_var())) {
    throw Floundering(std::string(v.problem ? v.problem : "unbound goal") + ": " + pretty(goal, &store_));
  }
  throw IllFormedGoal(std::string(v.problem ? v.problem : "ill-formed goal") + ": " + pretty(goal, &store_));
}

bool LinearKernel::erase(const Certificate& cert, Cont k) {
  std::vector<std::uint32_t> avail;
  for (std::uint32_t i = 0; i < work_.slots.size(); ++i) {
    const Slot& s = work_.slots[i];
    if (s.persistence == Persistence::Linear && !s.consumed) avail.push_back(i);
  }
  const std::size_t m = avail.size();
  std::vector<std::size_t> pick;
  // Largest subsets first; lexicographic by slot position within a size.
  for (std::size_t size = m + 1; size-- > 0;) {
    pick.resize(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      for (std::size_t p : pick) work_.slots[avail[p]].consumed = true;
      consumed_ += size;
      if (k(cert)) return true;
      for (std::size_t p : pick) work_.slots[avail[p]].consumed = false;
      consumed_ -= size;
      // Advance to the next combination.
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == m - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return false;
}

bool LinearKernel::solve_atom(Term atom, const Certificate& cert, Cont k) {
  const PredicateKey key{atom.functor(), atom.arity()};
  if (const Builtin* b = find_builtin(key)) {
    auto cp = store_.checkpoint();
    if (b->fn(store_, atom.args())) {
      if (k(cert)) return true;
    }
    store_.undo(cp);
    return false;
  }

  for (std::size_t i = work_.slots.size(); i-- > 0;) {
    if (work_.slots[i].persistence != Persistence::Linear || work_.slots[i].consumed) continue;
    auto cp = store_.checkpoint();
    if (store_.unify(work_.slots[i].assumption, atom)) {
      trace(Rule::Init, atom, cert);
      work_.slots[i].consumed = true;
      ++consumed_;
      if (k(cert)) return true;
      work_.slots[i].consumed = false;
      --consumed_;
      store_.undo(cp);
    }
  }
  for (std::size_t i = work_.slots.size(); i-- > 0;) {
    if (work_.slots[i].persistence != Persistence::Persistent) continue;
    auto cp = store_.checkpoint();
    if (store_.unify(work_.slots[i].assumption, atom)) {
      trace(Rule::BangInit, atom, cert);
      if (k(cert)) return true;
      store_.undo(cp);
    }
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
      trace(Rule::Unfold, atom, cert);
      if (solve(body, cont, [&](const Certificate& r) { return k(conclude(cert, r)); })) return true;
    }
    store_.undo(cp);
  }
  return false;
}

}  // namespace linpbt
