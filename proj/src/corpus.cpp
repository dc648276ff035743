#include "linpbt/corpus.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include "linpbt/errors.hpp"

namespace linpbt {

namespace detail {
extern const std::pair<std::string_view, std::string_view> kCorpusResources[];
extern const int kCorpusResourceCount;
}  // namespace detail

const PropertyDecl* Spec::property(std::string_view name) const {
  for (const auto& p : properties) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Printer Spec::printer(const Store* store) const {
  Printer p(store);
  for (const auto& d : printers) p.with(d);
  return p;
}

namespace corpus {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string text_of(std::string_view name, const std::optional<std::filesystem::path>& dir) {
  if (dir) return read_file(*dir / (std::string(name) + ".lli"));
  std::string_view r = resource(name);
  if (r.empty()) throw ConfigurationError("no bundled resource " + std::string(name));
  return std::string(r);
}

void absorb(Spec& spec, SpecFile&& file, bool properties) {
  spec.program.merge(file.program);
  for (auto& [name, decl] : file.contexts) spec.contexts.insert_or_assign(name, std::move(decl));
  if (properties) {
    for (auto& p : file.properties) spec.properties.push_back(std::move(p));
  }
}

bool is_name(Term t) { return t.is_atom(); }

bool is_truth(Term t) {
  return t.is_atom() && (symbol_name(t.functor()) == "tt" || symbol_name(t.functor()) == "ff");
}

bool has(Term t, const char* name, std::uint32_t arity) {
  return t.is_struct() && t.arity() == arity && symbol_name(t.functor()) == name;
}

struct ImpOp {
  const char* name;
  const char* text;
  int priority;
};

constexpr ImpOp kBinary[] = {
    {"or", " \\/ ", 1}, {"and", " /\\ ", 2}, {"eq", " = ", 3},   {"plus", " + ", 4},
    {"minus", " - ", 4}, {"times", " * ", 5},
};
constexpr int kAtomic = 7;

const ImpOp* binary_of(Term t) {
  if (!t.is_struct() || t.arity() != 2) return nullptr;
  const std::string& n = symbol_name(t.functor());
  for (const auto& op : kBinary) {
    if (n == op.name) return &op;
  }
  return nullptr;
}

bool is_value(const Printer& p, Term t) {
  return (has(t, "vi", 1) && p.deref(t.arg(0)).is_int()) || (has(t, "vb", 1) && is_truth(p.deref(t.arg(0))));
}

bool is_leaf_expr(const Printer& p, Term t) {
  return (has(t, "i", 1) && p.deref(t.arg(0)).is_int()) || (has(t, "b", 1) && is_truth(p.deref(t.arg(0)))) ||
         (has(t, "v", 1) && is_name(p.deref(t.arg(0))));
}

int expr_priority(const Printer& p, Term t) {
  t = p.deref(t);
  if (const ImpOp* op = binary_of(t)) return op->priority;
  if (has(t, "neg", 1)) return 6;
  return kAtomic;
}

void expr(const Printer& p, Term t, std::string& out, int min_priority) {
  t = p.deref(t);
  const int pr = expr_priority(p, t);
  const bool parens = pr < min_priority;
  if (parens) out += '(';
  if (const ImpOp* op = binary_of(t)) {
    // Left associative, except = which does not chain.
    expr(p, t.arg(0), out, pr == 3 ? pr + 1 : pr);
    out += op->text;
    expr(p, t.arg(1), out, pr + 1);
  } else if (has(t, "neg", 1)) {
    out += '~';
    expr(p, t.arg(0), out, 6);
  } else if (is_leaf_expr(p, t) || is_value(p, t)) {
    p.print(p.deref(t.arg(0)), out);
  } else {
    p.print(t, out);
  }
  if (parens) out += ')';
}

bool is_expr(const Printer& p, Term t) { return binary_of(t) || has(t, "neg", 1) || is_leaf_expr(p, t); }

void command(const Printer& p, Term t, std::string& out) {
  t = p.deref(t);
  if (has(t, "asn", 2) && is_name(p.deref(t.arg(0)))) {
    out += symbol_name(p.deref(t.arg(0)).functor());
    out += " := ";
    expr(p, t.arg(1), out, 0);
  } else if (has(t, "seq", 2)) {
    command(p, t.arg(0), out);
    out += "; ";
    command(p, t.arg(1), out);
  } else if (has(t, "ite", 3)) {
    out += "if ";
    expr(p, t.arg(0), out, 0);
    out += " then {";
    command(p, t.arg(1), out);
    out += "} else {";
    command(p, t.arg(2), out);
    out += '}';
  } else if (has(t, "while", 2)) {
    out += "while ";
    expr(p, t.arg(0), out, 0);
    out += " do {";
    command(p, t.arg(1), out);
    out += '}';
  } else {
    p.print(t, out);
  }
}

bool is_command(const Printer& p, Term t) {
  return (has(t, "asn", 2) && is_name(p.deref(t.arg(0)))) || has(t, "seq", 2) || has(t, "ite", 3) ||
         has(t, "while", 2);
}

}  // namespace

const std::vector<std::string>& spec_names() {
  static const std::vector<std::string> names = {"ljf", "imp_linear", "imp_vanilla", "stack_machine"};
  return names;
}

std::string_view resource(std::string_view name) {
  for (int i = 0; i < detail::kCorpusResourceCount; ++i) {
    if (detail::kCorpusResources[i].first == name) return detail::kCorpusResources[i].second;
  }
  return {};
}

Spec load_spec(std::string_view name, const std::optional<std::filesystem::path>& dir) {
  Spec spec;
  spec.name = std::string(name);
  if (name == "ljf") {
    absorb(spec, parse_spec(text_of("ljf", dir)), true);
    spec.reference = spec.program;
    spec.printers.push_back(ljf_printer());
  } else if (name == "imp_linear" || name == "stack_machine") {
    absorb(spec, parse_spec(text_of("imp_linear", dir)), name == "imp_linear");
    absorb(spec, parse_spec(text_of("stack_machine", dir)), name == "stack_machine");
    spec.reference = parse_spec(text_of("imp_vanilla", dir)).program;
    spec.printers.push_back(imp_printer());
  } else if (name == "imp_vanilla") {
    absorb(spec, parse_spec(text_of("imp_vanilla", dir)), true);
    spec.reference = spec.program;
    spec.printers.push_back(imp_printer());
  } else {
    throw ConfigurationError("unknown spec " + std::string(name));
  }
  return spec;
}

Spec load_spec_file(const std::filesystem::path& path) {
  Spec spec;
  spec.name = path.stem().string();
  absorb(spec, parse_spec(read_file(path)), true);
  spec.reference = spec.program;
  return spec;
}

// ---- mutants

namespace {

std::size_t find_clause(const std::vector<Clause>& def, const Clause& c) {
  for (std::size_t i = 0; i < def.size(); ++i) {
    if (same_clause(def[i], c)) return i;
  }
  return def.size();
}

[[noreturn]] void mismatch(const Mutant& m, const Clause& c, const char* what) {
  throw ConfigurationError("mutant " + m.id + ": " + what + " " + pretty(c));
}

}  // namespace

std::vector<Mutant> parse_mutants(std::string_view text, const Program& base) {
  std::vector<Mutant> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    if (line.rfind("mutant ", 0) == 0) {
      std::istringstream header(line.substr(7));
      Mutant m;
      header >> m.id >> m.target;
      std::getline(header >> std::ws, m.description);
      if (m.id.empty() || m.target.empty()) throw ParseError("mutant header needs an id and a target", lineno, 1);
      out.push_back(std::move(m));
      continue;
    }
    if (out.empty()) throw ParseError("edit before any mutant header", lineno, 1);
    MutantEdit e;
    switch (line[0]) {
      case '-': e.op = MutantEdit::Op::Remove; break;
      case '+': e.op = MutantEdit::Op::Add; break;
      case '>': e.op = MutantEdit::Op::Anchor; break;
      default: throw ParseError("expected '-', '+' or '>'", lineno, static_cast<int>(first) + 1);
    }
    try {
      e.clause = parse_clause(line.substr(1));
    } catch (const ParseError& err) {
      throw ParseError(err.what(), lineno, 1);
    }
    out.back().edits.push_back(std::move(e));
  }

  // Resolve positions by replaying each mutant on a scratch copy of the base.
  for (Mutant& m : out) {
    Program scratch = base;
    std::optional<std::pair<PredicateKey, std::size_t>> cursor;
    for (MutantEdit& e : m.edits) {
      const PredicateKey key = e.clause.key();
      auto& def = scratch.definition(key);
      switch (e.op) {
        case MutantEdit::Op::Remove: {
          std::size_t i = find_clause(def, e.clause);
          if (i == def.size()) mismatch(m, e.clause, "no clause to remove:");
          def.erase(def.begin() + static_cast<std::ptrdiff_t>(i));
          e.position = i;
          cursor = {key, i};
          break;
        }
        case MutantEdit::Op::Anchor: {
          std::size_t i = find_clause(def, e.clause);
          if (i == def.size()) mismatch(m, e.clause, "anchor not found:");
          e.position = i;
          cursor = {key, i + 1};
          break;
        }
        case MutantEdit::Op::Add: {
          std::size_t i = cursor && cursor->first == key ? cursor->second : def.size();
          def.insert(def.begin() + static_cast<std::ptrdiff_t>(i), e.clause);
          e.position = i;
          cursor = {key, i + 1};
          break;
        }
      }
    }
  }
  return out;
}

const std::vector<Mutant>& mutants() {
  static const std::vector<Mutant> registry = parse_mutants(resource("mutants"), load_spec("imp_linear").program);
  return registry;
}

const Mutant& mutant(std::string_view id) {
  for (const Mutant& m : mutants()) {
    if (m.id == id) return m;
  }
  throw ConfigurationError("unknown mutant " + std::string(id));
}

Program apply_mutant(const Program& p, const Mutant& m) {
  Program out = p;
  for (const MutantEdit& e : m.edits) {
    auto& def = out.definition(e.clause.key());
    switch (e.op) {
      case MutantEdit::Op::Remove:
        if (e.position >= def.size() || !same_clause(def[e.position], e.clause)) {
          mismatch(m, e.clause, "program lacks");
        }
        def.erase(def.begin() + static_cast<std::ptrdiff_t>(e.position));
        break;
      case MutantEdit::Op::Anchor:
        if (e.position >= def.size() || !same_clause(def[e.position], e.clause)) {
          mismatch(m, e.clause, "program lacks");
        }
        break;
      case MutantEdit::Op::Add:
        if (e.position > def.size()) mismatch(m, e.clause, "cannot place");
        def.insert(def.begin() + static_cast<std::ptrdiff_t>(e.position), e.clause);
        break;
    }
  }
  return out;
}

Program revert_mutant(const Program& mutated, const Mutant& m) {
  Program out = mutated;
  for (auto it = m.edits.rbegin(); it != m.edits.rend(); ++it) {
    const MutantEdit& e = *it;
    auto& def = out.definition(e.clause.key());
    switch (e.op) {
      case MutantEdit::Op::Add:
        if (e.position >= def.size() || !same_clause(def[e.position], e.clause)) {
          mismatch(m, e.clause, "mutated program lacks");
        }
        def.erase(def.begin() + static_cast<std::ptrdiff_t>(e.position));
        break;
      case MutantEdit::Op::Anchor:
        break;
      case MutantEdit::Op::Remove:
        if (e.position > def.size()) mismatch(m, e.clause, "cannot restore");
        def.insert(def.begin() + static_cast<std::ptrdiff_t>(e.position), e.clause);
        break;
    }
  }
  return out;
}

// ---- printers

DomainPrinter imp_printer() {
  return [](const Printer& p, Term t, std::string& out) {
    if (is_command(p, t)) {
      command(p, t, out);
      return true;
    }
    if (is_expr(p, t) || is_value(p, t)) {
      expr(p, t, out, 0);
      return true;
    }
    return false;
  };
}

DomainPrinter ljf_printer() {
  return [](const Printer& p, Term t, std::string& out) {
    if (!has(t, "imp", 2)) return false;
    for (int i = 0; i < 2; ++i) {
      Term side = p.deref(t.arg(static_cast<std::uint32_t>(i)));
      bool nested = has(side, "imp", 2);
      if (nested) out += '(';
      p.print(side, out);
      if (nested) out += ')';
      if (i == 0) out += " => ";
    }
    return true;
  };
}

}  // namespace corpus

}  // namespace linpbt
