#include "support.hpp"

#include <algorithm>
#include <numeric>

#include "linpbt/syntax.hpp"

using namespace linpbt;

namespace support {

ResourceContext context_of(const Spec& spec, const std::string& name, Store& store) {
  ResourceContext ctx;
  const auto& decl = spec.contexts.at(name);
  std::vector<Term> frame(64);
  for (const auto& e : decl.entries) ctx.add(thaw(store, e.assumption, frame), e.persistence);
  return ctx;
}

bool provable(const Program& program, const std::string& context, const std::string& goal,
              const Certificate& cert) {
  Store store;
  std::map<std::string, Term> names;
  Term g = parse_term(goal, store, &names);
  auto entries = context.empty() ? std::vector<ContextEntry>{} : parse_context(context, store, &names);
  LinearKernel kernel(program, store);
  return kernel.solve_closed(g, ResourceContext::from(entries), cert);
}

// ---- propositional linear logic

namespace {

const char* kAtomNames[7] = {"a", "b", "c", "p", "q", "r", "s"};

using Counts = std::array<int, 7>;

struct IoBodies {
  std::vector<IoGoal> nodes;
  std::vector<std::vector<int>> clauses = std::vector<std::vector<int>>(7);

  int add(IoGoal g) {
    nodes.push_back(g);
    return static_cast<int>(nodes.size()) - 1;
  }
  int atom(int a) { return add({IoGoal::Atom, a}); }

  IoBodies() {
    // p <- a x b.   p <- c.   q <- bang(r).   r <- one.   s <- a -> (a x erase).
    clauses[3].push_back(add({IoGoal::Tensor, 0, atom(0), atom(1)}));
    clauses[3].push_back(atom(2));
    clauses[4].push_back(add({IoGoal::Bang, 0, atom(5)}));
    clauses[5].push_back(add({IoGoal::One}));
    int rest = add({IoGoal::Tensor, 0, atom(0), add({IoGoal::Erase})});
    clauses[6].push_back(add({IoGoal::Limp, 0, -1, rest}));
  }
};

const IoBodies& bodies() {
  static const IoBodies b;
  return b;
}

int total(const Counts& c) { return std::accumulate(c.begin(), c.end(), 0); }

struct IoProver {
  const IoInstance& inst;

  bool prove(const Counts& delta, const std::vector<IoGoal>& nodes, int i, unsigned h) const {
    const IoGoal& g = nodes[i];
    switch (g.kind) {
      case IoGoal::One:
        return total(delta) == 0;
      case IoGoal::Erase:
        return true;
      case IoGoal::Atom: {
        if (total(delta) == 1 && delta[g.atom] == 1) return true;
        if (total(delta) == 0 && inst.persistent[g.atom]) return true;
        if (h == 0) return false;
        const auto& b = bodies();
        for (int body : b.clauses[g.atom]) {
          if (prove(delta, b.nodes, body, h - 1)) return true;
        }
        return false;
      }
      case IoGoal::Limp: {
        Counts d = delta;
        ++d[g.atom];
        return prove(d, nodes, g.right, h);
      }
      case IoGoal::Bang:
        return total(delta) == 0 && prove(delta, nodes, g.left, h);
      case IoGoal::With:
        return prove(delta, nodes, g.left, h) && prove(delta, nodes, g.right, h);
      case IoGoal::Tensor: {
        // Every sub-multiset goes left, the rest right.
        Counts part{};
        for (;;) {
          Counts rest;
          for (int k = 0; k < 7; ++k) rest[k] = delta[k] - part[k];
          if (prove(part, nodes, g.left, h) && prove(rest, nodes, g.right, h)) return true;
          int k = 0;
          while (k < 7 && part[k] == delta[k]) part[k++] = 0;
          if (k == 7) return false;
          ++part[k];
        }
      }
    }
    return false;
  }
};

std::string io_text(const std::vector<IoGoal>& nodes, int i) {
  const IoGoal& g = nodes[i];
  switch (g.kind) {
    case IoGoal::Atom:
      return kAtomNames[g.atom];
    case IoGoal::One:
      return "one";
    case IoGoal::Erase:
      return "erase";
    case IoGoal::Tensor:
      return "(" + io_text(nodes, g.left) + " x " + io_text(nodes, g.right) + ")";
    case IoGoal::With:
      return "(" + io_text(nodes, g.left) + " & " + io_text(nodes, g.right) + ")";
    case IoGoal::Limp:
      return "(" + std::string(kAtomNames[g.atom]) + " -> " + io_text(nodes, g.right) + ")";
    case IoGoal::Bang:
      return "bang(" + io_text(nodes, g.left) + ")";
  }
  return "";
}

int random_goal(std::mt19937_64& rng, std::vector<IoGoal>& nodes, unsigned depth) {
  std::uniform_int_distribution<int> pct(0, 99);
  auto push = [&](IoGoal g) {
    nodes.push_back(g);
    return static_cast<int>(nodes.size()) - 1;
  };
  if (depth == 0 || pct(rng) < 30) {
    int r = pct(rng);
    if (r < 70) return push({IoGoal::Atom, std::uniform_int_distribution<int>(0, 6)(rng)});
    return push({r < 85 ? IoGoal::One : IoGoal::Erase});
  }
  int r = pct(rng);
  if (r < 35) {
    int l = random_goal(rng, nodes, depth - 1);
    int rr = random_goal(rng, nodes, depth - 1);
    return push({IoGoal::Tensor, 0, l, rr});
  }
  if (r < 60) {
    int l = random_goal(rng, nodes, depth - 1);
    int rr = random_goal(rng, nodes, depth - 1);
    return push({IoGoal::With, 0, l, rr});
  }
  if (r < 85) {
    int a = std::uniform_int_distribution<int>(0, 2)(rng);
    int body = random_goal(rng, nodes, depth - 1);
    return push({IoGoal::Limp, a, -1, body});
  }
  int body = random_goal(rng, nodes, depth - 1);
  return push({IoGoal::Bang, 0, body});
}

}  // namespace

const char* io_program_text() {
  return "p <- a x b.\n"
         "p <- c.\n"
         "q <- bang(r).\n"
         "r <- one.\n"
         "s <- a -> (a x erase).\n";
}

std::string IoInstance::goal_text() const { return io_text(nodes, static_cast<int>(nodes.size()) - 1); }

std::string IoInstance::context_text() const {
  std::string out;
  for (int k = 0; k < 7; ++k) {
    for (int n = 0; n < linear[k]; ++n) out += (out.empty() ? "" : ", ") + std::string(kAtomNames[k]);
    if (persistent[k]) out += (out.empty() ? "bang " : ", bang ") + std::string(kAtomNames[k]);
  }
  return out;
}

IoInstance random_io_instance(std::mt19937_64& rng, unsigned max_depth, unsigned max_linear) {
  IoInstance inst;
  int n = std::uniform_int_distribution<int>(0, static_cast<int>(max_linear))(rng);
  for (int i = 0; i < n; ++i) ++inst.linear[std::uniform_int_distribution<int>(0, 2)(rng)];
  for (int k = 0; k < 3; ++k) inst.persistent[k] = std::uniform_int_distribution<int>(0, 3)(rng) == 0;
  inst.height = std::uniform_int_distribution<unsigned>(0, 3)(rng);
  random_goal(rng, inst.nodes, max_depth);
  return inst;
}

bool io_reference(const IoInstance& inst) {
  IoProver p{inst};
  Counts delta{};
  for (int k = 0; k < 7; ++k) delta[k] = inst.linear[k];
  return p.prove(delta, inst.nodes, static_cast<int>(inst.nodes.size()) - 1, inst.height);
}

// ---- implicational logic

int FormulaPool::atom(int a) {
  auto [it, fresh] = index_.try_emplace({a, -1, -1}, static_cast<int>(nodes_.size()));
  if (fresh) nodes_.push_back({a, -1, -1});
  return it->second;
}

int FormulaPool::imp(int l, int r) {
  auto [it, fresh] = index_.try_emplace({-1, l, r}, static_cast<int>(nodes_.size()));
  if (fresh) nodes_.push_back({-1, l, r});
  return it->second;
}

std::string FormulaPool::text(int f) const {
  const Formula& n = nodes_[f];
  if (n.atom >= 0) return n.atom == 0 ? "a" : "b";
  return "imp(" + text(n.left) + "," + text(n.right) + ")";
}

std::string FormulaPool::pretty(int f) const {
  const Formula& n = nodes_[f];
  if (n.atom >= 0) return n.atom == 0 ? "a" : "b";
  auto side = [&](int g) { return nodes_[g].atom >= 0 ? pretty(g) : "(" + pretty(g) + ")"; };
  return side(n.left) + " => " + side(n.right);
}

std::vector<int> FormulaPool::with_imps(int n) {
  std::vector<int> out;
  if (n == 0) return {atom(0), atom(1)};
  for (int k = 0; k < n; ++k) {
    for (int l : with_imps(k)) {
      for (int r : with_imps(n - 1 - k)) out.push_back(imp(l, r));
    }
  }
  return out;
}

bool FormulaPool::provable(int goal) { return prove({}, goal); }

bool FormulaPool::prove(std::vector<int> gamma, int goal) {
  std::sort(gamma.begin(), gamma.end());
  auto key = std::make_pair(gamma, goal);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  auto without = [&](std::size_t i) {
    std::vector<int> g = gamma;
    g.erase(g.begin() + static_cast<std::ptrdiff_t>(i));
    return g;
  };
  bool result = false;
  const Formula& c = nodes_[goal];
  if (c.atom < 0) {
    std::vector<int> g = gamma;
    g.push_back(c.left);
    result = prove(g, c.right);
  } else if (std::find(gamma.begin(), gamma.end(), goal) != gamma.end()) {
    result = true;
  } else {
    for (std::size_t i = 0; i < gamma.size() && !result; ++i) {
      const Formula h = nodes_[gamma[i]];
      if (h.atom >= 0) continue;
      const Formula l = nodes_[h.left];
      if (l.atom >= 0) {
        if (std::find(gamma.begin(), gamma.end(), h.left) == gamma.end()) continue;
        std::vector<int> g = without(i);
        g.push_back(h.right);
        result = prove(g, goal);
      } else {
        std::vector<int> g1 = without(i);
        g1.push_back(imp(l.right, h.right));
        std::vector<int> g2 = without(i);
        g2.push_back(h.right);
        result = prove(g1, h.left) && prove(g2, goal);
      }
    }
  }
  memo_[key] = result;
  return result;
}

// ---- IMP

ImpState sigma0() {
  ImpState s;
  s["w"] = {true, 0, false};
  s["x"] = {false, 0, true};
  s["y"] = {false, 0, false};
  return s;
}

namespace {

std::string name_of(const Store& store, Term t) {
  t = store.deref(t);
  return t.is_struct() ? symbol_name(t.functor()) : std::string();
}

std::optional<bool> bool_of(const Store& store, Term t) {
  std::string n = name_of(store, t);
  if (n == "tt") return true;
  if (n == "ff") return false;
  return std::nullopt;
}

}  // namespace

std::optional<ImpValue> imp_eval(const Store& store, Term e, const ImpState& s) {
  e = store.deref(e);
  if (!e.is_struct()) return std::nullopt;
  const std::string f = symbol_name(e.functor());
  if (f == "i" && e.arity() == 1) {
    Term n = store.deref(e.arg(0));
    if (!n.is_int()) return std::nullopt;
    return ImpValue{true, n.int_value(), false};
  }
  if (f == "b" && e.arity() == 1) {
    auto b = bool_of(store, e.arg(0));
    if (!b) return std::nullopt;
    return ImpValue{false, 0, *b};
  }
  if (f == "v" && e.arity() == 1) {
    auto it = s.find(name_of(store, e.arg(0)));
    if (it == s.end()) return std::nullopt;
    return it->second;
  }
  if (f == "neg" && e.arity() == 1) {
    auto v = imp_eval(store, e.arg(0), s);
    if (!v || v->is_int) return std::nullopt;
    return ImpValue{false, 0, !v->b};
  }
  if (e.arity() != 2) return std::nullopt;
  auto l = imp_eval(store, e.arg(0), s);
  if (!l) return std::nullopt;
  auto r = imp_eval(store, e.arg(1), s);
  if (!r) return std::nullopt;
  auto wrap = [](std::uint64_t u) { return ImpValue{true, static_cast<std::int64_t>(u), false}; };
  const auto ul = static_cast<std::uint64_t>(l->i);
  const auto ur = static_cast<std::uint64_t>(r->i);
  if (f == "eq") return ImpValue{false, 0, *l == *r};
  if (f == "plus" || f == "minus" || f == "times") {
    if (!l->is_int || !r->is_int) return std::nullopt;
    if (f == "plus") return wrap(ul + ur);
    if (f == "minus") return wrap(ul - ur);
    return wrap(ul * ur);
  }
  if (f == "and" || f == "or") {
    if (l->is_int || r->is_int) return std::nullopt;
    return ImpValue{false, 0, f == "and" ? (l->b && r->b) : (l->b || r->b)};
  }
  return std::nullopt;
}

std::optional<ImpState> imp_exec(const Store& store, Term c, ImpState s, unsigned& fuel) {
  if (fuel == 0) return std::nullopt;
  --fuel;
  c = store.deref(c);
  if (!c.is_struct()) return std::nullopt;
  const std::string f = symbol_name(c.functor());
  if (f == "skip" && c.arity() == 0) return s;
  if (f == "asn" && c.arity() == 2) {
    auto it = s.find(name_of(store, c.arg(0)));
    if (it == s.end()) return std::nullopt;
    auto v = imp_eval(store, c.arg(1), s);
    if (!v) return std::nullopt;
    it->second = *v;
    return s;
  }
  if (f == "seq" && c.arity() == 2) {
    auto mid = imp_exec(store, c.arg(0), std::move(s), fuel);
    if (!mid) return std::nullopt;
    return imp_exec(store, c.arg(1), std::move(*mid), fuel);
  }
  if (f == "ite" && c.arity() == 3) {
    auto g = imp_eval(store, c.arg(0), s);
    if (!g || g->is_int) return std::nullopt;
    return imp_exec(store, c.arg(g->b ? 1 : 2), std::move(s), fuel);
  }
  if (f == "while" && c.arity() == 2) {
    for (;;) {
      auto g = imp_eval(store, c.arg(0), s);
      if (!g || g->is_int) return std::nullopt;
      if (!g->b) return s;
      auto next = imp_exec(store, c.arg(1), std::move(s), fuel);
      if (!next || fuel == 0) return std::nullopt;
      --fuel;
      s = std::move(*next);
    }
  }
  return std::nullopt;
}

std::string value_text(const ImpValue& v) {
  if (v.is_int) return "vi(" + std::to_string(v.i) + ")";
  return v.b ? "vb(tt)" : "vb(ff)";
}

std::string state_text(const ImpState& s) {
  std::string out = "[";
  for (const auto& [name, v] : s) out += (out.size() > 1 ? ", " : "") + name + " = " + value_text(v);
  return out + "]";
}

std::vector<std::string> imp_expressions(int n) {
  static std::vector<std::vector<std::string>> memo;
  if (n < 1) return {};
  if (static_cast<int>(memo.size()) >= n) return memo[n - 1];
  for (int k = static_cast<int>(memo.size()) + 1; k <= n; ++k) {
    std::vector<std::string> out;
    if (k == 1) {
      out = {"i(0)", "i(1)", "b(tt)", "b(ff)", "v(w)", "v(x)", "v(y)"};
    } else {
      for (const auto& e : memo[k - 2]) out.push_back("neg(" + e + ")");
      for (const char* op : {"plus", "minus", "times", "and", "or", "eq"}) {
        for (int l = 1; l < k - 1; ++l) {
          for (const auto& a : memo[l - 1]) {
            for (const auto& b : memo[k - 2 - l]) out.push_back(std::string(op) + "(" + a + "," + b + ")");
          }
        }
      }
    }
    memo.push_back(std::move(out));
  }
  return memo[n - 1];
}

std::vector<std::string> enumerate(const Spec& spec, const std::string& goal, const std::string& out_var,
                                   const std::string& context, const Certificate& cert) {
  Store store;
  std::map<std::string, Term> names;
  Term g = parse_term(goal, store, &names);
  ResourceContext ctx;
  if (spec.contexts.count(context)) {
    ctx = context_of(spec, context, store);
  } else if (!context.empty()) {
    ctx = ResourceContext::from(parse_context(context, store, &names));
  }
  std::vector<std::string> out;
  LinearKernel kernel(spec.program, store);
  Term var = names.at(out_var);
  kernel.prove_closed(g, ctx, cert, [&](const Solution&) {
    out.push_back(pretty(var, &store));
    return false;
  });
  return out;
}

// ---- rule suite

const std::vector<RuleCase>& rule_cases() {
  static const std::vector<RuleCase> cases = {
      {Rule::With, true, "", "a", "a & a", "height:1"},
      {Rule::With, false, "", "a, b", "a & b", "height:1"},
      {Rule::One, true, "", "", "one", "height:1"},
      {Rule::One, false, "", "a", "one", "height:1"},
      {Rule::Tensor, true, "", "a, b", "a x b", "height:1"},
      {Rule::Tensor, false, "", "a", "a x a", "height:1"},
      {Rule::Erase, true, "", "a, b", "erase", "height:1"},
      {Rule::Erase, false, "", "", "erase x a", "height:1"},
      {Rule::Lolli, true, "", "", "a -> a", "height:1"},
      {Rule::Lolli, false, "", "", "a -> one", "height:1"},
      {Rule::Bang, true, "", "bang a", "bang(a)", "height:1"},
      {Rule::Bang, false, "", "a", "bang(a)", "height:1"},
      {Rule::Init, true, "", "a", "a", "height:1"},
      {Rule::Init, false, "", "b", "a", "height:1"},
      {Rule::BangInit, true, "", "bang a", "a x a", "height:1"},
      {Rule::BangInit, false, "", "bang a", "b", "height:1"},
      {Rule::Unfold, true, "p <- one.", "", "p", "height:1"},
      {Rule::Unfold, false, "p <- one.", "", "p", "height:0"},
      {Rule::Unfold, true, "p <- one.", "", "p", "size:1"},
      {Rule::Unfold, false, "p <- one.", "", "p", "size:0"},
      {Rule::Unfold, false, "p <- one.", "", "p", "pair(height:1,size:0)"},
  };
  return cases;
}

bool run_rule_case(const RuleCase& c) {
  return provable(parse_program(c.program), c.context, c.goal, Certificate::parse(c.cert)) == c.positive;
}

}  // namespace support
