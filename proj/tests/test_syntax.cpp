#include <gtest/gtest.h>

#include <map>
#include <string>

#include "linpbt/corpus.hpp"
#include "linpbt/errors.hpp"
#include "linpbt/syntax.hpp"

using namespace linpbt;

namespace {

GoalView view_text(Store& store, const std::string& text) { return view_goal(store, store.deref(parse_term(text, store))); }

// Checks every goal position of a goal term views as something well formed.
void expect_well_formed(Store& store, Term goal, const std::string& where) {
  goal = store.deref(goal);
  if (goal.is_var()) return;  // continuation variables are bound at run time
  GoalView v = view_goal(store, goal);
  ASSERT_NE(v.kind, GoalKind::IllFormed) << where;
  switch (v.kind) {
    case GoalKind::Tensor:
    case GoalKind::With:
      expect_well_formed(store, v.left, where);
      expect_well_formed(store, v.right, where);
      break;
    case GoalKind::Limp:
      expect_well_formed(store, v.right, where);
      break;
    case GoalKind::Bang:
      expect_well_formed(store, v.left, where);
      break;
    default:
      break;
  }
}

}  // namespace

TEST(Parser, TensorWithErase) {
  Clause c = parse_clause("pv(C) <- hyp(C) x erase.");
  EXPECT_EQ(symbol_name(c.head.functor()), "pv");
  Store store;
  std::vector<Term> frame(c.num_vars);
  Term body = thaw(store, c.body, frame);
  GoalView v = view_goal(store, body);
  ASSERT_EQ(v.kind, GoalKind::Tensor);
  EXPECT_EQ(view_goal(store, store.deref(v.left)).kind, GoalKind::Atom);
  EXPECT_EQ(view_goal(store, store.deref(v.right)).kind, GoalKind::Erase);
}

TEST(Parser, GoalVariableBody) {
  Clause c = parse_clause("eval(i(N),vi(N),K) <- K.");
  ASSERT_TRUE(c.body.is_var());
  EXPECT_EQ(c.body, c.head.arg(2));
}

TEST(Parser, LimpIsRightAssociative) {
  Store store;
  GoalView outer = view_text(store, "a -> b -> q");
  ASSERT_EQ(outer.kind, GoalKind::Limp);
  EXPECT_EQ(pretty(outer.left, &store), "a");
  GoalView inner = view_goal(store, store.deref(outer.right));
  ASSERT_EQ(inner.kind, GoalKind::Limp);
  EXPECT_EQ(pretty(inner.left, &store), "b");
  EXPECT_EQ(pretty(inner.right, &store), "q");
}

TEST(Parser, Precedence) {
  Store store;
  // x binds tighter than &, which binds tighter than ->.
  GoalView v = view_text(store, "a -> b x c & d");
  ASSERT_EQ(v.kind, GoalKind::Limp);
  GoalView w = view_goal(store, store.deref(v.right));
  ASSERT_EQ(w.kind, GoalKind::With);
  EXPECT_EQ(view_goal(store, store.deref(w.left)).kind, GoalKind::Tensor);
  GoalView t = view_text(store, "a x b x c");
  ASSERT_EQ(t.kind, GoalKind::Tensor);
  EXPECT_EQ(view_goal(store, store.deref(t.left)).kind, GoalKind::Tensor);
}

TEST(Parser, FactsHaveBodyOne) {
  Clause c = parse_clause("hyp(a).");
  EXPECT_TRUE(c.body.has_functor(kOne, 0));
}

TEST(Parser, Weights) {
  Program p = parse_program("p <- one # 3.\np.\n");
  const auto* cs = p.clauses({intern("p"), 0});
  ASSERT_NE(cs, nullptr);
  ASSERT_EQ(cs->size(), 2u);
  EXPECT_DOUBLE_EQ((*cs)[0].weight, 3.0);
  EXPECT_DOUBLE_EQ((*cs)[1].weight, 1.0);
}

TEST(Parser, CommentsAndIntegers) {
  Program p = parse_program("% comment\nn(-3). % trailing\nn(42).\n");
  EXPECT_EQ(p.clause_count(), 2u);
}

TEST(Parser, Errors) {
  EXPECT_THROW(parse_program("p <- (a x b) -> c."), ParseError);
  EXPECT_THROW(parse_program("p(a).\np(a,b).\n"), ParseError);
  EXPECT_THROW(parse_program("p <- q"), ParseError);
  EXPECT_THROW(parse_program("x(a,b) <- one."), ParseError);
  try {
    parse_program("p.\nq <- r(.\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Parser, BuiltinsHaveNoClauses) { EXPECT_THROW(parse_program("sum(1,1,3)."), ParseError); }

TEST(ViewGoal, Classification) {
  Store store;
  EXPECT_EQ(view_text(store, "x(a,erase)").kind, GoalKind::Tensor);
  EXPECT_EQ(view_text(store, "one").kind, GoalKind::One);
  EXPECT_EQ(view_text(store, "bang(p)").kind, GoalKind::Bang);
  EXPECT_EQ(view_text(store, "p(one)").kind, GoalKind::Atom);
  EXPECT_EQ(view_text(store, "x(a)").kind, GoalKind::IllFormed);
  EXPECT_EQ(view_text(store, "K").kind, GoalKind::IllFormed);
  EXPECT_EQ(view_text(store, "(a,b)").kind, GoalKind::Atom);
  EXPECT_EQ(view_goal(store, store.deref(parse_term("(a,b)", store)), Dialect::Vanilla).kind, GoalKind::Conj);
  EXPECT_EQ(view_goal(store, store.deref(parse_term("true", store)), Dialect::Vanilla).kind, GoalKind::True);
}

TEST(ViewGoal, BoundContinuation) {
  Store store;
  std::map<std::string, Term> names;
  Term k = parse_term("K", store, &names);
  ASSERT_TRUE(store.unify(k, parse_term("bang(sum(1,1,Z))", store, &names)));
  GoalView v = view_goal(store, store.deref(k));
  ASSERT_EQ(v.kind, GoalKind::Bang);
  GoalView inner = view_goal(store, store.deref(v.left));
  EXPECT_EQ(inner.kind, GoalKind::Atom);
  EXPECT_EQ(symbol_name(store.deref(inner.left).functor()), "sum");
}

TEST(Printer, DomainPrinters) {
  Store store;
  Printer ljf = Printer(&store).with(corpus::ljf_printer());
  EXPECT_EQ(ljf(parse_term("imp(a,imp(a,b))", store)), "a => (a => b)");
  EXPECT_EQ(ljf(parse_term("imp(imp(b,b),a)", store)), "(b => b) => a");
  Printer imp = Printer(&store).with(corpus::imp_printer());
  EXPECT_EQ(imp(parse_term("asn(w,minus(i(0),i(1)))", store)), "w := 0 - 1");
  EXPECT_EQ(imp(parse_term("ite(eq(v(x),v(x)),asn(w,i(0)),asn(w,i(1)))", store)),
            "if x = x then {w := 0} else {w := 1}");
  EXPECT_EQ(imp(parse_term("seq(skip,while(neg(b(ff)),skip))", store)), "skip; while ~ff do {skip}");
  EXPECT_EQ(imp(parse_term("asn(w,times(plus(i(1),v(w)),i(0)))", store)), "w := (1 + w) * 0");
  EXPECT_EQ(imp(parse_term("asn(w,minus(i(1),minus(i(0),i(1))))", store)), "w := 1 - (0 - 1)");
  EXPECT_EQ(imp(parse_term("[w = vi(-1)]", store)), "[w = -1]");
}

TEST(Printer, GenericIsReparseable) {
  const char* samples[] = {"f(X,[a,b|T],-3)", "a -> b x c & d", "bang(p(X)) x one", "[w = vi(0),x = vb(tt)]",
                           "(a x b) & c", "q((a,b))"};
  for (const char* s : samples) {
    Store store;
    Term t = parse_term(s, store);
    std::string once = pretty(t, &store);
    Term again = parse_term(once, store);
    EXPECT_TRUE(variant(store.resolve(t), store.resolve(again))) << s << " -> " << once;
  }
}

class CorpusRoundTrip : public testing::TestWithParam<std::string> {};

TEST_P(CorpusRoundTrip, ParsePrettyParse) {
  SpecFile f = parse_spec(corpus::resource(GetParam()));
  std::string text;
  for (PredicateKey k : f.program.predicates()) {
    for (const Clause& c : *f.program.clauses(k)) text += pretty(c) + "\n";
  }
  Program again = parse_program(text);
  EXPECT_TRUE(again.same_clauses(f.program));
  EXPECT_TRUE(f.program.same_clauses(again));
}

TEST_P(CorpusRoundTrip, EveryBodyIsWellFormed) {
  SpecFile f = parse_spec(corpus::resource(GetParam()));
  Store store;
  for (PredicateKey k : f.program.predicates()) {
    for (const Clause& c : *f.program.clauses(k)) {
      std::vector<Term> frame(c.num_vars);
      Term body = thaw(store, c.body, frame);
      expect_well_formed(store, body, pretty(c));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Corpus, CorpusRoundTrip,
                         testing::Values("ljf", "imp_linear", "imp_vanilla", "stack_machine"));

TEST(SpecFile, Declarations) {
  SpecFile f = parse_spec(corpus::resource("ljf"));
  ASSERT_EQ(f.properties.size(), 1u);
  const PropertyDecl& p = f.properties[0];
  EXPECT_EQ(p.name, "pvb_sound");
  ASSERT_EQ(p.stages.size(), 3u);
  EXPECT_EQ(p.stages[0].role, StageRole::Generate);
  EXPECT_EQ(p.stages[0].context_name, "atoms");
  EXPECT_EQ(p.stages[0].certificate, "height:4");
  EXPECT_EQ(p.stages[1].role, StageRole::Precondition);
  EXPECT_EQ(p.stages[2].role, StageRole::Conclude);
  ASSERT_TRUE(f.contexts.count("atoms"));
  EXPECT_EQ(f.contexts.at("atoms").entries.size(), 2u);
  EXPECT_EQ(f.contexts.at("atoms").entries[0].persistence, Persistence::Persistent);
}

TEST(SpecFile, InlineContextAndVanillaStage) {
  SpecFile f = parse_spec(
      "p(X) <- q(X).\n"
      "prop t: gen p(X) in [q(a), bang q(b)] @ size:2; forbid r(X) using vanilla @ height:3.\n");
  const PropertyDecl& p = f.properties.at(0);
  ASSERT_EQ(p.stages.size(), 2u);
  EXPECT_EQ(p.stages[0].context.size(), 2u);
  EXPECT_EQ(p.stages[1].role, StageRole::Forbid);
  EXPECT_EQ(p.stages[1].engine, Dialect::Vanilla);
}
