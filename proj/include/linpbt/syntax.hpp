#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "linpbt/term.hpp"

namespace linpbt {

struct PredicateKey {
  Symbol functor = 0;
  std::uint32_t arity = 0;
  friend bool operator==(const PredicateKey&, const PredicateKey&) = default;
};

struct PredicateKeyHash {
  std::size_t operator()(const PredicateKey& k) const noexcept {
    return (static_cast<std::size_t>(k.functor) << 8) ^ k.arity;
  }
};

std::string to_string(const PredicateKey& k);

// First-argument index: clauses whose key differs from the goal's cannot match.
struct IndexKey {
  enum class Tag : std::uint8_t { Any, Struct, Int } tag = Tag::Any;
  std::uint64_t value = 0;
  std::uint32_t arity = 0;

  static IndexKey of(Term t);  // t must already be dereferenced
  bool compatible(const IndexKey& other) const {
    return tag == Tag::Any || other.tag == Tag::Any ||
           (tag == other.tag && value == other.value && arity == other.arity);
  }
};

// Program clause Head <- Body with clause-local variables 0..num_vars-1.
struct Clause {
  std::shared_ptr<const TermBuffer> buffer;
  Term head;
  Term body;
  std::uint32_t num_vars = 0;
  double weight = 1.0;
  int line = 0;
  IndexKey first_arg;

  PredicateKey key() const { return {head.functor(), head.arity()}; }
};

// Clause-list equality up to variable renaming.
bool same_clause(const Clause& a, const Clause& b);

// Builtins are evaluated natively and never have clauses.
bool is_builtin(PredicateKey k);

class Program {
 public:
  const std::vector<Clause>* clauses(PredicateKey k) const {
    auto it = defs_.find(k);
    return it == defs_.end() ? nullptr : &it->second;
  }
  std::vector<Clause>& definition(PredicateKey k);
  void add_clause(Clause c);
  bool defines(PredicateKey k) const { return defs_.count(k) != 0; }
  const std::vector<PredicateKey>& predicates() const { return order_; }
  std::size_t clause_count() const;
  // Clause lists equal in order, up to renaming.
  bool same_clauses(const Program& other) const;
  // Appends every clause of other, in order.
  void merge(const Program& other);

 private:
  std::unordered_map<PredicateKey, std::vector<Clause>, PredicateKeyHash> defs_;
  std::vector<PredicateKey> order_;
};

// ---- goal views

enum class GoalKind : std::uint8_t { Atom, One, Erase, Limp, Bang, Tensor, With, True, Conj, IllFormed };

enum class Dialect : std::uint8_t { Linear, Vanilla };

struct GoalView {
  GoalKind kind = GoalKind::IllFormed;
  Term left;    // atom, antecedent, bang body, or first conjunct
  Term right;   // second operand or implication body
  const char* problem = nullptr;
};

// Reads a dereferenced goal through the reserved functors of the dialect.
GoalView view_goal(const Store& store, Term goal, Dialect dialect = Dialect::Linear);

// ---- declarations beyond plain clauses

enum class Persistence : std::uint8_t { Linear, Persistent };

struct ContextEntry {
  Term assumption;
  Persistence persistence = Persistence::Linear;
};

enum class StageRole : std::uint8_t { Generate, Precondition, Conclude, Forbid };

struct StageDecl {
  StageRole role = StageRole::Generate;
  Term goal;                         // in the property's buffer
  Dialect engine = Dialect::Linear;  // "using vanilla" selects the vanilla engine
  std::string context_name;          // named context, if any
  std::vector<ContextEntry> context; // inline context, if any
  std::string certificate;           // literal text, empty if absent
  int line = 0;
};

struct PropertyDecl {
  std::string name;
  std::shared_ptr<const TermBuffer> buffer;
  std::vector<std::string> var_names;  // local id -> source name
  std::vector<StageDecl> stages;
  int line = 0;
};

struct ContextDecl {
  std::string name;
  std::shared_ptr<const TermBuffer> buffer;
  std::vector<ContextEntry> entries;
};

struct SpecFile {
  Program program;
  std::vector<PropertyDecl> properties;
  std::map<std::string, ContextDecl> contexts;
};

// Parses a specification file: clauses, context and prop declarations.
SpecFile parse_spec(std::string_view text);
// Parses clauses only; declarations are rejected.
Program parse_program(std::string_view text);
// Parses a single term into the store; names maps source variable names to store variables.
Term parse_term(std::string_view text, Store& store, std::map<std::string, Term>* names = nullptr);
// Parses a comma-separated context such as "a, bang b, var(x,V)".
std::vector<ContextEntry> parse_context(std::string_view text, Store& store,
                                        std::map<std::string, Term>* names = nullptr);
// Parses a single clause text such as "p(X) <- q(X)." into its own buffer.
Clause parse_clause(std::string_view text);

// ---- printing

class Printer;
// Handles a term by writing to out, or returns false to fall back to generic printing.
using DomainPrinter = std::function<bool(const Printer&, Term, std::string& out)>;

class Printer {
 public:
  explicit Printer(const Store* store = nullptr) : store_(store) {}
  Printer& with(DomainPrinter p) {
    domains_.push_back(std::move(p));
    return *this;
  }
  void set_store(const Store* store) { store_ = store; }

  std::string operator()(Term t) const;
  void print(Term t, std::string& out, int context_priority = 1200) const;
  // Generic, re-parseable rendering, bypassing domain printers at this node.
  void print_generic(Term t, std::string& out, int context_priority) const;
  Term deref(Term t) const { return store_ ? store_->deref(t) : t; }

 private:
  const Store* store_;
  std::vector<DomainPrinter> domains_;
};

// Generic re-parseable rendering.
std::string pretty(Term t, const Store* store = nullptr);
std::string pretty(const Clause& c);

}  // namespace linpbt
