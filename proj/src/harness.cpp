#include "linpbt/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <json.hpp>

#include "linpbt/errors.hpp"

namespace linpbt {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// RFC 4180 records.
std::vector<std::vector<std::string>> csv_records(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        any = false;
        break;
      default:
        field += c;
        any = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", static_cast<int>(rows.size()) + 1, 1);
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  for (const auto& x : v) {
    if (x == s) return;
  }
  v.push_back(s);
}

}  // namespace

const MatrixCell* MatrixReport::find(std::string_view mutant, std::string_view property) const {
  for (const auto& c : cells) {
    if (c.mutant == mutant && c.property == property) return &c;
  }
  return nullptr;
}

std::vector<std::string> MatrixReport::kills(std::string_view mutant) const {
  std::vector<std::string> out;
  for (const auto& col : columns) {
    const MatrixCell* c = find(mutant, col);
    if (c && c->killed) out.push_back(col);
  }
  return out;
}

std::string MatrixReport::to_csv(bool timing) const {
  std::string out = "mutant,property,verdict,cex,seconds,generated,tested\n";
  for (const auto& c : cells) {
    out += csv_field(c.mutant) + ',' + csv_field(c.property) + ',' + (c.killed ? "found" : "pass") + ',' +
           csv_field(c.cex) + ',' + (timing ? seconds_text(c.seconds) : "") + ',' + std::to_string(c.generated) +
           ',' + std::to_string(c.tested) + '\n';
  }
  return out;
}

MatrixReport MatrixReport::from_csv(std::string_view text) {
  auto records = csv_records(text);
  if (records.empty() || records[0].size() != 7 || records[0][0] != "mutant") {
    throw ParseError("missing matrix CSV header", 1, 1);
  }
  MatrixReport r;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    const int line = static_cast<int>(i) + 1;
    if (f.size() != 7) throw ParseError("expected 7 fields", line, 1);
    MatrixCell c;
    c.mutant = f[0];
    c.property = f[1];
    if (f[2] != "found" && f[2] != "pass") throw ParseError("verdict must be found or pass", line, 1);
    c.killed = f[2] == "found";
    c.cex = f[3];
    try {
      c.seconds = f[4].empty() ? 0 : std::stod(f[4]);
      c.generated = std::stoull(f[5]);
      c.tested = std::stoull(f[6]);
    } catch (const std::exception&) {
      throw ParseError("malformed number", line, 1);
    }
    push_unique(r.rows, c.mutant);
    push_unique(r.columns, c.property);
    r.cells.push_back(std::move(c));
  }
  return r;
}

std::string MatrixReport::to_table(bool timing) const {
  std::vector<std::size_t> width;
  std::size_t first = 6;
  for (const auto& row : rows) first = std::max(first, row.size());
  auto cell_text = [&](const MatrixCell* c) {
    if (!c) return std::string("-");
    std::string s = c->killed ? "found" : "pass";
    if (timing) s += " in " + seconds_text(c->seconds);
    return s;
  };
  for (const auto& col : columns) {
    std::size_t w = col.size();
    for (const auto& row : rows) w = std::max(w, cell_text(find(row, col)).size());
    width.push_back(w);
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(first)) << "mutant";
  for (std::size_t j = 0; j < columns.size(); ++j) out << "  " << std::setw(static_cast<int>(width[j])) << columns[j];
  out << "  cex\n";
  for (const auto& row : rows) {
    out << std::setw(static_cast<int>(first)) << row;
    std::string cex;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const MatrixCell* c = find(row, columns[j]);
      out << "  " << std::setw(static_cast<int>(width[j])) << cell_text(c);
      if (c && c->killed && cex.empty()) cex = c->cex;
    }
    out << "  " << cex << '\n';
  }
  return out.str();
}

std::string MatrixReport::to_json(bool timing) const {
  nlohmann::json j;
  j["rows"] = rows;
  j["columns"] = columns;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json cell = {{"mutant", c.mutant},       {"property", c.property}, {"verdict", c.killed ? "found" : "pass"},
                           {"cex", c.cex},             {"generated", c.generated}, {"tested", c.tested}};
    if (timing) cell["seconds"] = c.seconds;
    j["cells"].push_back(std::move(cell));
  }
  return j.dump(2);
}

void run_parallel(unsigned threads, const std::function<void()>& fn) {
  struct Job {
    const std::function<void()>* fn;
    std::exception_ptr error;
  };
  std::vector<Job> jobs(std::max(1u, threads), Job{&fn, nullptr});
  std::vector<pthread_t> ids(jobs.size());
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kSearchStackBytes);
  auto entry = [](void* arg) -> void* {
    auto* job = static_cast<Job*>(arg);
    try {
      (*job->fn)();
    } catch (...) {
      job->error = std::current_exception();
    }
    return nullptr;
  };
  std::size_t started = 0;
  for (; started < jobs.size(); ++started) {
    if (pthread_create(&ids[started], &attr, entry, &jobs[started]) != 0) break;
  }
  pthread_attr_destroy(&attr);
  if (started == 0) {
    fn();
    return;
  }
  for (std::size_t i = 0; i < started; ++i) pthread_join(ids[i], nullptr);
  for (const auto& j : jobs) {
    if (j.error) std::rethrow_exception(j.error);
  }
}

const std::vector<std::string>& pbt_suite() {
  static const std::vector<std::string> s = {"dtx", "srx", "srv", "pr", "eq"};
  return s;
}

const std::vector<std::string>& mbt_suite() {
  static const std::vector<std::string> s = {"exec_cl", "exec_lc", "type_cl", "type_lc"};
  return s;
}

MatrixReport run_matrix(const Spec& base, const MatrixOptions& options) {
  MatrixReport report;
  std::vector<const Mutant*> muts;
  if (options.mutants.empty()) {
    for (const Mutant& m : corpus::mutants()) muts.push_back(&m);
  } else {
    for (const auto& id : options.mutants) {
      if (id != kNoMutant) muts.push_back(&corpus::mutant(id));
    }
  }
  bool unmutated = options.include_unmutated;
  for (const auto& id : options.mutants) unmutated = unmutated || id == kNoMutant;

  std::vector<Spec> variants;
  if (unmutated) {
    report.rows.emplace_back(kNoMutant);
    variants.push_back(base);
  }
  for (const Mutant* m : muts) {
    report.rows.push_back(m->id);
    Spec s = base;
    s.program = corpus::apply_mutant(base.program, *m);
    variants.push_back(std::move(s));
  }
  std::vector<const PropertyDecl*> props;
  for (const auto& name : options.properties) {
    const PropertyDecl* p = base.property(name);
    if (!p) throw ConfigurationError("spec " + base.name + " has no property " + name);
    props.push_back(p);
    report.columns.push_back(name);
  }

  report.cells.resize(variants.size() * props.size());
  for (std::size_t i = 0; i < variants.size(); ++i) {
    for (std::size_t j = 0; j < props.size(); ++j) {
      auto& c = report.cells[i * props.size() + j];
      c.mutant = report.rows[i];
      c.property = report.columns[j];
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k; (k = next++) < report.cells.size();) {
      try {
        const Spec& spec = variants[k / props.size()];
        const PropertyDecl& prop = *spec.property(report.columns[k % props.size()]);
        Outcome o = run_property(spec, prop, options.strategy);
        auto& c = report.cells[k];
        c.killed = !o.passed;
        if (o.cex) c.cex = o.cex->summary();
        c.seconds = o.stats.seconds;
        c.generated = o.stats.generated;
        c.tested = o.stats.tested;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, report.cells.size())));
  run_parallel(threads, worker);
  if (failure) std::rethrow_exception(failure);
  return report;
}

std::uint64_t coverage_budget(double factor, std::uint32_t n) {
  return static_cast<std::uint64_t>(std::ceil(factor * std::pow(static_cast<double>(n), 3)));
}

std::vector<BenchRow> run_bench(const Spec& linear, const Spec& vanilla, const BenchOptions& options) {
  const PropertyDecl* lp = linear.property(options.property);
  const PropertyDecl* vp = vanilla.property(options.property);
  if (!lp) throw ConfigurationError("spec " + linear.name + " has no property " + options.property);
  if (!vp) throw ConfigurationError("spec " + vanilla.name + " has no property " + options.property);
  const unsigned reps = std::max(1u, options.repetitions);
  std::vector<BenchRow> rows;
  for (std::uint32_t n = options.from; n <= options.to; ++n) {
    BenchRow row;
    row.bound = n;
    Exhaustive at_n{{Certificate::size(n)}};
    for (unsigned r = 0; r < reps; ++r) {
      Outcome lo = run_property(linear, *lp, at_n);
      Outcome vo = run_property(vanilla, *vp, at_n);
      row.linear_seconds += lo.stats.seconds / reps;
      row.vanilla_seconds += vo.stats.seconds / reps;
      row.linear_generated = lo.stats.generated;
      row.vanilla_generated = vo.stats.generated;
    }
    RunOptions budget;
    budget.step_limit = coverage_budget(options.budget_factor, n);
    Outcome co = run_property(linear, *lp, at_n, budget);
    row.coverage = co.stats.generated ? static_cast<double>(co.stats.generated - co.stats.inconclusive) /
                                            static_cast<double>(co.stats.generated)
                                      : 1.0;
    rows.push_back(row);
  }
  return rows;
}

std::string bench_table(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "size  linear(s)  vanilla(s)  ratio  generated(l)  generated(v)  coverage\n";
  for (const auto& r : rows) {
    char buf[160];
    double ratio = r.vanilla_seconds > 0 ? r.linear_seconds / r.vanilla_seconds : 0;
    std::snprintf(buf, sizeof buf, "%4u  %9.3f  %10.3f  %5.2f  %12llu  %12llu  %7.1f%%\n", r.bound, r.linear_seconds,
                  r.vanilla_seconds, ratio, static_cast<unsigned long long>(r.linear_generated),
                  static_cast<unsigned long long>(r.vanilla_generated), 100 * r.coverage);
    out << buf;
  }
  return out.str();
}

}  // namespace linpbt
