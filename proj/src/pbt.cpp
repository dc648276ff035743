#include "linpbt/pbt.hpp"

#include <algorithm>
#include <chrono>
#include <memory>

#include "linpbt/errors.hpp"
#include "linpbt/kernel.hpp"
#include "linpbt/vanilla.hpp"

namespace linpbt {

namespace {

void collect_vars(Term t, std::vector<std::uint32_t>& ids) {
  if (t.is_var()) {
    ids.push_back(t.var_id());
  } else if (t.is_struct() && !t.ground_node()) {
    for (Term a : t.args()) collect_vars(a, ids);
  }
}

std::uint32_t var_span(std::span<const ContextEntry> entries) {
  std::vector<std::uint32_t> ids;
  for (const auto& e : entries) collect_vars(e.assumption, ids);
  std::uint32_t n = 0;
  for (std::uint32_t id : ids) n = std::max(n, id + 1);
  return n;
}

bool occurs_live(const Store& store, Term var, Term t) {
  t = store.deref(t);
  if (t.is_var()) return t == var;
  if (!t.is_struct()) return false;
  for (Term a : t.args()) {
    if (occurs_live(store, var, a)) return true;
  }
  return false;
}

// Same shape with every Size leaf lowered by d and every other leaf equal.
bool size_predecessor(const Certificate& prev, const Certificate& cur, std::uint32_t& d) {
  auto a = prev.leaves();
  auto b = cur.leaves();
  if (a.size() != b.size() || prev.with_leaves(b) != cur) return false;
  bool any = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != b[i].kind) return false;
    if (a[i].kind == Certificate::Kind::Size) {
      if (a[i].bound >= b[i].bound) return false;
      std::uint32_t diff = b[i].bound - a[i].bound;
      if (any && diff != d) return false;
      d = diff;
      any = true;
    } else if (!(a[i] == b[i])) {
      return false;
    }
  }
  return any;
}

struct StageRuntime {
  const StageDecl* decl = nullptr;
  Term goal;
  ResourceContext context;
  Certificate cert;
  std::unique_ptr<LinearKernel> linear;
  std::unique_ptr<VanillaEngine> vanilla;

  Engine& engine() { return linear ? static_cast<Engine&>(*linear) : static_cast<Engine&>(*vanilla); }
};

class PropertyRun {
 public:
  PropertyRun(const Spec& spec, const PropertyDecl& prop, const RunOptions& options)
      : spec_(spec), prop_(prop), options_(options), frame_(prop.var_names.size()) {
    validate();
    gen_cert_ = generation_certificate(prop);
    std::uint32_t test_height = 0;
    for (const auto& leaf : gen_cert_.leaves()) test_height = std::max(test_height, leaf.bound);
    test_height *= 4;

    for (const StageDecl& d : prop.stages) {
      StageRuntime s;
      s.decl = &d;
      s.goal = thaw(store_, d.goal, frame_);
      if (!d.context_name.empty()) {
        auto it = spec.contexts.find(d.context_name);
        if (it == spec.contexts.end()) {
          throw ConfigurationError("property " + prop.name + ": unknown context " + d.context_name);
        }
        std::vector<Term> local(var_span(it->second.entries));
        for (const auto& e : it->second.entries) s.context.add(thaw(store_, e.assumption, local), e.persistence);
      } else {
        for (const auto& e : d.context) s.context.add(thaw(store_, e.assumption, frame_), e.persistence);
      }
      if (!d.certificate.empty()) {
        s.cert = Certificate::parse(d.certificate);
      } else {
        s.cert = Certificate::height(test_height);
      }
      SearchOptions so;
      so.trace = options.trace;
      if (d.role != StageRole::Generate) so.step_limit = options.step_limit;
      if (d.engine == Dialect::Vanilla) {
        s.vanilla = std::make_unique<VanillaEngine>(spec.reference, store_, so);
      } else {
        s.linear = std::make_unique<LinearKernel>(spec.program, store_, so);
      }
      stages_.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < stages_.size() && stages_[i].decl->role == StageRole::Generate; ++i) ++n_gen_;

    generated_var_.assign(prop.var_names.size(), false);
    for (const StageDecl& d : prop.stages) {
      if (d.role != StageRole::Generate) continue;
      std::vector<std::uint32_t> ids;
      collect_vars(d.goal, ids);
      for (std::uint32_t id : ids) generated_var_[id] = true;
    }
    residuals_.resize(n_gen_);
  }

  const Certificate& generation() const { return gen_cert_; }

  void bind(const std::vector<WitnessBinding>& witness) {
    for (const auto& b : witness) {
      if (!b.generated) continue;
      auto it = std::find(prop_.var_names.begin(), prop_.var_names.end(), b.name);
      if (it == prop_.var_names.end()) {
        throw ReplayMismatch("property " + prop_.name + " has no variable " + b.name);
      }
      Term v = frame_[static_cast<std::size_t>(it - prop_.var_names.begin())];
      if (!v) throw ReplayMismatch("variable " + b.name + " does not occur in " + prop_.name);
      if (!store_.unify(v, thaw(store_, b.value))) {
        throw ReplayMismatch("witness for " + b.name + " conflicts with the property");
      }
    }
  }

  // Runs all generator solutions under cert; true when a violation was found.
  bool exhaustive_round(const Certificate& cert, std::optional<std::uint32_t> skip_fitting) {
    round_cert_ = cert;
    skip_ = skip_fitting;
    single_ = false;
    return round();
  }

  // Tests the first generator solution only; true when it violated the property.
  bool single_round(const Certificate& cert) {
    round_cert_ = cert;
    skip_.reset();
    single_ = true;
    return round();
  }

  Outcome finish() {
    Outcome o;
    stats_.steps = steps_;
    for (auto& s : stages_) stats_.steps += s.engine().steps();
    o.stats = stats_;
    o.passed = !cex_;
    if (cex_) {
      cex_->stats = stats_;
      o.cex = std::move(cex_);
    }
    return o;
  }

  RunStats& stats() { return stats_; }

 private:
  void validate() const {
    std::size_t i = 0;
    while (i < prop_.stages.size() && prop_.stages[i].role == StageRole::Generate) ++i;
    while (i < prop_.stages.size() && prop_.stages[i].role == StageRole::Precondition) ++i;
    if (i + 1 != prop_.stages.size() ||
        (prop_.stages[i].role != StageRole::Conclude && prop_.stages[i].role != StageRole::Forbid)) {
      throw ConfigurationError("property " + prop_.name +
                               ": expected generators, then preconditions, then one conclusion");
    }
  }

  bool round() {
    stop_ = false;
    found_in_round_ = false;
    auto cp = store_.checkpoint();
    stage(0);
    store_.undo(cp);
    return found_in_round_;
  }

  // Generator stage i; the last one hands each solution to candidate().
  void stage(std::size_t i) {
    if (i == n_gen_) {
      candidate();
      return;
    }
    StageRuntime& s = stages_[i];
    auto next = [&](const Certificate& residual) {
      residuals_[i] = residual;
      auto cp = store_.checkpoint();
      if (i + 1 == n_gen_) {
        candidate();
      } else {
        stage(i + 1);
      }
      store_.undo(cp);
      return stop_;
    };
    if (s.linear) {
      s.linear->prove_closed(s.goal, s.context, round_cert_, [&](const Solution& sol) { return next(sol.residual); });
    } else {
      s.vanilla->solve(s.goal, round_cert_, [&](const Certificate& r) { return next(r); });
    }
  }

  void candidate() {
    if (skip_ && n_gen_ > 0) {
      bool fits = true;
      for (const Certificate& r : residuals_) {
        for (const auto& leaf : r.leaves()) {
          if (leaf.kind == Certificate::Kind::Size && leaf.bound < *skip_) fits = false;
        }
      }
      if (fits) return;
    }
    ++stats_.generated;
    inconclusive_ = false;
    for (std::size_t j = n_gen_; j < stages_.size(); ++j) {
      steps_ += stages_[j].engine().steps();
      stages_[j].engine().reset_counters();
    }
    if (n_gen_ < stages_.size() - 1) {
      test_from(n_gen_);
    } else {
      conclude();
    }
    if (inconclusive_) ++stats_.inconclusive;
    if (single_) stop_ = true;
  }

  // Preconditions from index i, then the conclusion.
  void test_from(std::size_t i) {
    if (i == stages_.size() - 1) {
      conclude();
      return;
    }
    StageRuntime& s = stages_[i];
    auto next = [&]() {
      auto cp = store_.checkpoint();
      test_from(i + 1);
      store_.undo(cp);
      return stop_;
    };
    if (s.linear) {
      s.linear->prove_closed(s.goal, s.context, s.cert, [&](const Solution&) { return next(); });
    } else {
      s.vanilla->solve(s.goal, s.cert, [&](const Certificate&) { return next(); });
    }
    if (s.engine().budget_exhausted()) inconclusive_ = true;
  }

  void conclude() {
    StageRuntime& s = stages_.back();
    ++stats_.tested;
    bool violated = false;
    if (s.decl->role == StageRole::Conclude) {
      if (!store_.is_ground(s.goal)) {
        std::string names;
        for (std::size_t v = 0; v < frame_.size(); ++v) {
          if (!frame_[v]) continue;
          Term d = store_.deref(frame_[v]);
          if (d.is_var() && occurs_live(store_, d, s.goal)) {
            if (!names.empty()) names += ", ";
            names += prop_.var_names[v];
          }
        }
        throw ConfigurationError("property " + prop_.name + ": conclusion is not ground after generation; unbound " +
                                 (names.empty() ? std::string("anonymous variables") : names));
      }
      bool refuted = s.linear ? s.linear->refute(s.goal, s.context, s.cert) : s.vanilla->refute(s.goal, s.cert);
      if (s.engine().budget_exhausted()) {
        inconclusive_ = true;
        return;
      }
      violated = refuted;
    } else {
      auto cp = store_.checkpoint();
      bool found = s.linear ? s.linear->solve_closed(s.goal, s.context, s.cert) : s.vanilla->solve_first(s.goal, s.cert);
      if (found && !s.engine().budget_exhausted()) {
        violated = true;
        record();
      } else if (s.engine().budget_exhausted()) {
        inconclusive_ = true;
      }
      store_.undo(cp);
      if (violated) {
        stop_ = found_in_round_ = true;
      }
      return;
    }
    if (violated) {
      record();
      stop_ = found_in_round_ = true;
    }
  }

  void record() {
    CexReport r;
    r.property = prop_.name;
    r.certificate = round_cert_.to_string();
    Printer printer = spec_.printer(&store_);
    for (std::size_t v = 0; v < frame_.size(); ++v) {
      const std::string& name = prop_.var_names[v];
      if (!frame_[v] || name.empty() || name[0] == '_') continue;
      WitnessBinding b;
      b.name = name;
      b.text = printer(frame_[v]);
      b.value = freeze(store_, frame_[v]);
      b.generated = generated_var_[v];
      r.witness.push_back(std::move(b));
    }
    cex_ = std::move(r);
  }

  const Spec& spec_;
  const PropertyDecl& prop_;
  RunOptions options_;
  Store store_;
  std::vector<Term> frame_;
  std::vector<StageRuntime> stages_;
  std::vector<bool> generated_var_;
  std::vector<Certificate> residuals_;
  std::size_t n_gen_ = 0;
  Certificate gen_cert_;
  Certificate round_cert_;
  std::optional<std::uint32_t> skip_;
  bool single_ = false;
  bool stop_ = false;
  bool found_in_round_ = false;
  bool inconclusive_ = false;
  std::uint64_t steps_ = 0;
  RunStats stats_;
  std::optional<CexReport> cex_;
};

std::vector<Certificate> default_schedule(const Certificate& c) {
  std::vector<Certificate> out;
  if (c.kind() == Certificate::Kind::Size || c.kind() == Certificate::Kind::Height) {
    for (std::uint32_t n = 1; n <= c.bound(); ++n) {
      out.push_back(c.kind() == Certificate::Kind::Size ? Certificate::size(n) : Certificate::height(n));
    }
  } else {
    out.push_back(c);
  }
  return out;
}

}  // namespace

const WitnessBinding* CexReport::binding(std::string_view name) const {
  for (const auto& b : witness) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

std::string CexReport::summary() const {
  std::string out;
  for (const auto& b : witness) {
    if (!b.generated) continue;
    if (!out.empty()) out += ", ";
    out += b.name + " = " + b.text;
  }
  return out;
}

Certificate generation_certificate(const PropertyDecl& property) {
  for (const StageDecl& d : property.stages) {
    if (d.role != StageRole::Generate) continue;
    if (d.certificate.empty()) {
      throw ConfigurationError("property " + property.name + ": generator stage has no certificate");
    }
    return Certificate::parse(d.certificate);
  }
  return Certificate::height(1);
}

Outcome run_property(const Spec& spec, const PropertyDecl& property, const Strategy& strategy,
                     const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  PropertyRun run(spec, property, options);
  if (const auto* ex = std::get_if<Exhaustive>(&strategy)) {
    std::vector<Certificate> schedule = ex->schedule.empty() ? default_schedule(run.generation()) : ex->schedule;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      std::optional<std::uint32_t> skip;
      std::uint32_t d = 0;
      if (i > 0 && size_predecessor(schedule[i - 1], schedule[i], d)) skip = d;
      if (run.exhaustive_round(schedule[i], skip)) break;
    }
  } else {
    const auto& rnd = std::get<Randomized>(strategy);
    if (rnd.trials == 0) throw ConfigurationError("randomized strategy needs at least one trial");
    Certificate base = rnd.generation ? *rnd.generation : Certificate::pair(run.generation(), Certificate::random(0));
    if (!base.has(Certificate::Kind::Random)) base = Certificate::pair(base, Certificate::random(0));
    for (std::uint32_t t = 0; t < rnd.trials; ++t) {
      if (run.single_round(base.reseeded(mix64(rnd.seed ^ mix64(t + 1))))) break;
    }
  }
  run.stats().seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run.finish();
}

bool replay(const Spec& spec, const PropertyDecl& property, const CexReport& report) {
  if (report.property != property.name) {
    throw ReplayMismatch("report is for property " + report.property + ", not " + property.name);
  }
  for (const StageDecl& d : property.stages) {
    Term g = d.goal;
    while (g.is_struct() && (g.has_functor(kTensor, 2) || g.has_functor(kConj, 2))) g = g.arg(0);
    if (!g.is_struct()) continue;
    PredicateKey key{g.functor(), g.arity()};
    const Program& p = d.engine == Dialect::Vanilla ? spec.reference : spec.program;
    if (!is_builtin(key) && !p.defines(key)) {
      throw ReplayMismatch("program no longer defines " + to_string(key));
    }
  }
  PropertyRun run(spec, property, {});
  run.bind(report.witness);
  return run.single_round(Certificate::parse(report.certificate));
}

}  // namespace linpbt
