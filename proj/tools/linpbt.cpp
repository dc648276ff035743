// linpbt: proof queries, property checks, mutation matrices and benchmarks.
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "linpbt/corpus.hpp"
#include "linpbt/errors.hpp"
#include "linpbt/harness.hpp"
#include "linpbt/kernel.hpp"
#include "linpbt/pbt.hpp"
#include "linpbt/vanilla.hpp"

using namespace linpbt;

namespace {

constexpr int kOk = 0;
constexpr int kFound = 1;
constexpr int kUsage = 2;

struct Options {
  std::string spec = "imp_linear";
  std::string cert;
  std::uint64_t seed = 0;
  std::string engine = "linear";
  std::string format = "table";
  bool trace = false;

  // prove
  std::string goal;
  std::string context;
  std::size_t max = 10;
  bool open = false;

  // check / mutants
  std::string prop;
  std::string strategy = "exhaustive";
  std::uint32_t trials = 100;
  std::string suite = "pbt";
  std::vector<std::string> props;
  std::vector<std::string> mutants;
  bool no_timing = false;
  unsigned threads = 0;

  // bench
  std::uint32_t from = 4;
  std::uint32_t to = 6;
  unsigned reps = 5;
  double budget_factor = 200;
};

Spec load(const std::string& name) {
  for (const auto& known : corpus::spec_names()) {
    if (name == known) {
      std::optional<std::filesystem::path> dir;
      if (const char* env = std::getenv("LINPBT_CORPUS_DIR"); env && *env) dir = env;
      return corpus::load_spec(name, dir);
    }
  }
  return corpus::load_spec_file(name);
}

Strategy strategy_of(const Options& o) {
  if (o.strategy == "exhaustive") {
    Exhaustive e;
    if (!o.cert.empty()) e.schedule.push_back(Certificate::parse(o.cert));
    return e;
  }
  if (o.strategy == "random") {
    Randomized r;
    r.trials = o.trials;
    r.seed = o.seed;
    if (!o.cert.empty()) r.generation = Certificate::parse(o.cert);
    return r;
  }
  throw ConfigurationError("unknown strategy " + o.strategy + " (exhaustive or random)");
}

int cmd_prove(const Options& o) {
  Spec spec = load(o.spec);
  Store store;
  std::map<std::string, Term> names;
  Term goal = parse_term(o.goal, store, &names);
  std::vector<ContextEntry> entries;
  if (!o.context.empty()) {
    if (auto it = spec.contexts.find(o.context); it != spec.contexts.end()) {
      std::vector<Term> frame(64);
      for (const auto& e : it->second.entries) entries.push_back({thaw(store, e.assumption, frame), e.persistence});
    } else {
      entries = parse_context(o.context, store, &names);
    }
  }
  const Certificate cert = Certificate::parse(o.cert.empty() ? "height:10" : o.cert);
  SearchOptions so;
  if (o.trace) so.trace = &std::cerr;
  Printer printer = spec.printer(&store);

  std::size_t count = 0;
  auto show = [&](const std::string& residual, const std::string& slots) {
    ++count;
    std::cout << "solution " << count << ":";
    bool any = false;
    for (const auto& [name, var] : names) {
      if (name.empty() || name[0] == '_') continue;
      std::cout << (any ? ", " : " ") << name << " = " << printer(var);
      any = true;
    }
    if (!any) std::cout << " yes";
    std::cout << "\n  residual " << residual;
    if (!slots.empty()) std::cout << "\n  context " << slots;
    std::cout << '\n';
    return count >= o.max;
  };

  if (o.engine == "vanilla") {
    VanillaEngine engine(spec.reference, store, so);
    engine.solve(goal, cert, [&](const Certificate& r) { return show(r.to_string(), ""); });
  } else if (o.engine == "linear") {
    LinearKernel kernel(spec.program, store, so);
    ResourceContext ctx = ResourceContext::from(entries);
    auto sink = [&](const Solution& s) { return show(s.residual.to_string(), s.output.fingerprint(store)); };
    if (o.open) {
      kernel.prove(goal, ctx, cert, sink);
    } else {
      kernel.prove_closed(goal, ctx, cert, sink);
    }
  } else {
    throw ConfigurationError("unknown engine " + o.engine + " (linear or vanilla)");
  }
  if (count == 0) std::cout << "no solution\n";
  return count ? kOk : kFound;
}

std::string stats_line(const RunStats& s) {
  std::ostringstream out;
  out << "generated " << s.generated << ", tested " << s.tested << ", inconclusive " << s.inconclusive << ", "
      << s.seconds << " s";
  return out.str();
}

int cmd_check(const Options& o) {
  Spec spec = load(o.spec);
  const PropertyDecl* prop = spec.property(o.prop);
  if (!prop) throw ConfigurationError("spec " + spec.name + " has no property " + o.prop);
  RunOptions ro;
  if (o.trace) ro.trace = &std::cerr;
  Outcome out = run_property(spec, *prop, strategy_of(o), ro);
  if (o.format == "json") {
    nlohmann::ordered_json j;
    j["property"] = prop->name;
    j["verdict"] = out.passed ? "pass" : "found";
    j["generated"] = out.stats.generated;
    j["tested"] = out.stats.tested;
    if (out.cex) {
      j["certificate"] = out.cex->certificate;
      nlohmann::ordered_json w = nlohmann::ordered_json::object();
      for (const auto& b : out.cex->witness) w[b.name] = b.text;
      j["witness"] = w;
    }
    std::cout << j.dump(2) << "\n";
  } else if (out.passed) {
    std::cout << prop->name << ": pass (" << stats_line(out.stats) << ")\n";
  } else {
    std::cout << prop->name << ": counterexample at " << out.cex->certificate << " (" << stats_line(out.stats)
              << ")\n";
    for (const auto& b : out.cex->witness) std::cout << "  " << b.name << " = " << b.text << '\n';
  }
  return out.passed ? kOk : kFound;
}

int cmd_mutants(const Options& o) {
  Spec spec = load(o.spec);
  MatrixOptions mo;
  if (!o.props.empty()) {
    mo.properties = o.props;
  } else if (o.suite == "pbt") {
    mo.properties = pbt_suite();
  } else if (o.suite == "mbt") {
    mo.properties = mbt_suite();
  } else if (o.suite == "none") {
  } else {
    throw ConfigurationError("unknown suite " + o.suite + " (pbt, mbt or none)");
  }
  mo.mutants = o.mutants;
  mo.strategy = strategy_of(o);
  mo.threads = o.threads;
  MatrixReport r = run_matrix(spec, mo);
  if (o.format == "csv") {
    std::cout << r.to_csv(!o.no_timing);
  } else if (o.format == "json") {
    std::cout << r.to_json(!o.no_timing) << '\n';
  } else {
    std::cout << r.to_table(!o.no_timing);
  }
  return kOk;
}

int cmd_bench(const Options& o) {
  Spec linear = load(o.spec);
  Spec vanilla = load("imp_vanilla");
  BenchOptions bo;
  bo.property = o.prop.empty() ? "eq" : o.prop;
  bo.from = o.from;
  bo.to = o.to;
  bo.repetitions = o.reps;
  bo.budget_factor = o.budget_factor;
  std::cout << bench_table(run_bench(linear, vanilla, bo));
  std::cout << "coverage budget: " << bo.budget_factor << " * n^3 rule applications per search\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Property-based testing for linear logic specifications"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--spec", o.spec, "bundled spec (ljf, imp_linear, imp_vanilla, stack_machine) or a file");
  app.add_option("--cert", o.cert, "certificate, e.g. height:4, size:7, random:seed=1, pair(size:5,random)");
  app.add_option("--seed", o.seed, "seed for the random strategy");
  app.add_option("--engine", o.engine, "linear or vanilla")->check(CLI::IsMember({"linear", "vanilla"}));
  app.add_option("--format", o.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  app.add_flag("--trace", o.trace, "print one line per rule application to stderr");

  auto* prove = app.add_subcommand("prove", "enumerate proofs of a goal");
  prove->add_option("--goal", o.goal, "goal term")->required();
  prove->add_option("--context", o.context, "named context or entries such as \"a, bang b\"");
  prove->add_option("--max", o.max, "stop after this many solutions");
  prove->add_flag("--open", o.open, "accept solutions that leave linear resources unused");

  auto* check = app.add_subcommand("check", "run one property");
  check->add_option("--prop", o.prop, "property name")->required();
  check->add_option("--strategy", o.strategy, "exhaustive or random");
  check->add_option("--trials", o.trials, "random trials");

  auto* mutants = app.add_subcommand("mutants", "mutation matrix");
  mutants->add_option("--suite", o.suite, "pbt, mbt or none");
  mutants->add_option("--props", o.props, "explicit property list")->delimiter(',');
  mutants->add_option("--mutants", o.mutants, "mutant ids (default: all), 'none' for the original")->delimiter(',');
  mutants->add_option("--strategy", o.strategy, "exhaustive or random");
  mutants->add_option("--trials", o.trials, "random trials");
  mutants->add_flag("--no-timing", o.no_timing, "omit wall-clock times, for byte-comparable output");
  mutants->add_option("--threads", o.threads, "worker threads (0: all cores)");

  auto* bench = app.add_subcommand("bench", "linear versus vanilla timing");
  bench->add_option("--prop", o.prop, "property present in both specs (default eq)");
  bench->add_option("--from", o.from, "first size bound");
  bench->add_option("--to", o.to, "last size bound");
  bench->add_option("--reps", o.reps, "runs averaged per bound");
  bench->add_option("--budget-factor", o.budget_factor, "c in the c*n^3 step budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  int rc = kUsage;
  run_with_large_stack([&] {
    try {
      if (*prove) rc = cmd_prove(o);
      else if (*check) rc = cmd_check(o);
      else if (*mutants) rc = cmd_mutants(o);
      else if (*bench) rc = cmd_bench(o);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      rc = kUsage;
    }
  });
  return rc;
}
