#include "linpbt/builtins.hpp"
#include "linpbt/syntax.hpp"

namespace linpbt {

std::string to_string(const PredicateKey& k) { return symbol_name(k.functor) + "/" + std::to_string(k.arity); }

IndexKey IndexKey::of(Term t) {
  switch (t.kind()) {
    case Kind::Var:
      return {};
    case Kind::Int:
      return {Tag::Int, static_cast<std::uint64_t>(t.int_value()), 0};
    case Kind::Struct:
      return {Tag::Struct, t.functor(), t.arity()};
  }
  return {};
}

bool same_clause(const Clause& a, const Clause& b) {
  Term ta[2] = {a.head, a.body};
  Term tb[2] = {b.head, b.body};
  return a.weight == b.weight && variant(ta, tb);
}

bool is_builtin(PredicateKey k) { return find_builtin(k) != nullptr; }

std::vector<Clause>& Program::definition(PredicateKey k) {
  auto [it, inserted] = defs_.try_emplace(k);
  if (inserted) order_.push_back(k);
  return it->second;
}

void Program::add_clause(Clause c) { definition(c.key()).push_back(std::move(c)); }

std::size_t Program::clause_count() const {
  std::size_t n = 0;
  for (const auto& [k, cs] : defs_) n += cs.size();
  return n;
}

bool Program::same_clauses(const Program& other) const {
  if (defs_.size() != other.defs_.size()) return false;
  for (const auto& [k, cs] : defs_) {
    const auto* theirs = other.clauses(k);
    if (!theirs || theirs->size() != cs.size()) return false;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (!same_clause(cs[i], (*theirs)[i])) return false;
    }
  }
  return true;
}

void Program::merge(const Program& other) {
  for (PredicateKey k : other.order_) {
    auto& mine = definition(k);
    for (const Clause& c : other.defs_.at(k)) mine.push_back(c);
  }
}

GoalView view_goal(const Store& store, Term goal, Dialect dialect) {
  GoalView v;
  goal = store.deref(goal);
  if (goal.is_var()) {
    v.problem = "unbound goal";
    return v;
  }
  if (goal.is_int()) {
    v.problem = "integer used as a goal";
    return v;
  }
  const Symbol f = goal.functor();
  const std::uint32_t n = goal.arity();
  auto binary = [&](GoalKind k) {
    v.kind = k;
    v.left = goal.arg(0);
    v.right = goal.arg(1);
    return v;
  };
  auto wrong_arity = [&] {
    v.problem = "reserved functor used at the wrong arity";
    return v;
  };
  if (dialect == Dialect::Vanilla) {
    if (f == kConj && n == 2) return binary(GoalKind::Conj);
    // Facts carry the unit body, which reads as truth here.
    if ((f == kTrue || f == kOne) && n == 0) {
      v.kind = GoalKind::True;
      return v;
    }
    if ((f == kTensor || f == kWith || f == kLimp) && n == 2) {
      v.problem = "linear connective in a vanilla goal";
      return v;
    }
    if ((f == kBang && n == 1) || (f == kErase && n == 0)) {
      v.problem = "linear connective in a vanilla goal";
      return v;
    }
    v.kind = GoalKind::Atom;
    v.left = goal;
    return v;
  }
  switch (f) {
    case kTensor:
      return n == 2 ? binary(GoalKind::Tensor) : wrong_arity();
    case kWith:
      return n == 2 ? binary(GoalKind::With) : wrong_arity();
    case kLimp: {
      if (n != 2) return wrong_arity();
      Term a = store.deref(goal.arg(0));
      if (a.is_var()) {
        v.problem = "unbound antecedent of ->";
        return v;
      }
      GoalView inner = view_goal(store, a, dialect);
      if (inner.kind != GoalKind::Atom) {
        v.problem = "antecedent of -> is not an atom";
        return v;
      }
      v.kind = GoalKind::Limp;
      v.left = a;
      v.right = goal.arg(1);
      return v;
    }
    case kBang:
      if (n != 1) return wrong_arity();
      v.kind = GoalKind::Bang;
      v.left = goal.arg(0);
      return v;
    case kOne:
      if (n != 0) return wrong_arity();
      v.kind = GoalKind::One;
      return v;
    case kErase:
      if (n != 0) return wrong_arity();
      v.kind = GoalKind::Erase;
      return v;
    default:
      v.kind = GoalKind::Atom;
      v.left = goal;
      return v;
  }
}

}  // namespace linpbt
