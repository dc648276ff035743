#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace linpbt {

using Symbol = std::uint32_t;

// Symbols interned before anything else, so their ids are fixed.
enum Reserved : Symbol {
  kTensor = 0,  // x/2
  kWith,        // &/2
  kLimp,        // ->/2
  kBang,        // bang/1
  kOne,         // one/0
  kErase,       // erase/0
  kConj,        // ,/2 (vanilla)
  kTrue,        // true/0 (vanilla)
  kNil,         // []
  kCons,        // '.'/2
  kEquals,      // =/2
  kNoHint,      // placeholder hint for anonymous variables
  kReservedCount
};

Symbol intern(std::string_view name);
const std::string& symbol_name(Symbol s);

enum class Kind : std::uint8_t { Var, Struct, Int };

struct Node;

// A handle to an immutable term node. Variables are nodes too; their
// bindings live in a Store, never in the node.
class Term {
 public:
  Term() = default;
  explicit Term(const Node* node) : node_(node) {}

  static Term atom(Symbol s);

  Kind kind() const;
  bool is_var() const { return kind() == Kind::Var; }
  bool is_struct() const { return kind() == Kind::Struct; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_atom() const { return is_struct() && arity() == 0; }
  // True when the node contains no variable nodes at all.
  bool ground_node() const;

  Symbol functor() const;
  std::uint32_t arity() const;
  Term arg(std::uint32_t i) const { return args()[i]; }
  std::span<const Term> args() const;
  bool has_functor(Symbol f, std::uint32_t n) const {
    return is_struct() && functor() == f && arity() == n;
  }

  std::int64_t int_value() const;
  std::uint32_t var_id() const;
  Symbol var_hint() const;

  const Node* node() const { return node_; }
  explicit operator bool() const { return node_ != nullptr; }
  friend bool operator==(Term a, Term b) { return a.node_ == b.node_; }

 private:
  const Node* node_ = nullptr;
};

struct Node {
  Kind kind;
  bool ground;
  std::uint16_t reserved;
  std::uint32_t aux;       // arity (Struct) or hint (Var)
  std::uint64_t payload;   // functor (Struct), id (Var), value bits (Int)

  const Term* args() const { return reinterpret_cast<const Term*>(this + 1); }
};
static_assert(sizeof(Node) == 16);
static_assert(sizeof(Term) == sizeof(void*));

inline Kind Term::kind() const { return node_->kind; }
inline bool Term::ground_node() const { return node_->ground; }
inline Symbol Term::functor() const { return static_cast<Symbol>(node_->payload); }
inline std::uint32_t Term::arity() const { return node_->aux; }
inline std::span<const Term> Term::args() const { return {node_->args(), node_->aux}; }
inline std::int64_t Term::int_value() const { return static_cast<std::int64_t>(node_->payload); }
inline std::uint32_t Term::var_id() const { return static_cast<std::uint32_t>(node_->payload); }
inline Symbol Term::var_hint() const { return node_->aux; }

// Bump allocator with stack-like release.
class Arena {
 public:
  struct Mark {
    std::size_t chunk = 0;
    std::size_t offset = 0;
  };

  explicit Arena(std::size_t first_chunk = 4096) : next_size_(first_chunk) {}
  Arena(const Arena&) = delete;
  Arena& operator=(const Arena&) = delete;

  void* allocate(std::size_t bytes);
  Mark mark() const { return {current_, offset_}; }
  void release(Mark m);
  std::size_t bytes_reserved() const;

 private:
  struct Chunk {
    std::unique_ptr<std::byte[]> data;
    std::size_t size;
  };
  std::vector<Chunk> chunks_;
  std::size_t current_ = 0;
  std::size_t offset_ = 0;
  std::size_t next_size_;
};

// Interface the parser uses to build terms.
class TermFactory {
 public:
  virtual ~TermFactory() = default;
  virtual Term make_struct(Symbol f, std::span<const Term> args) = 0;
  virtual Term make_int(std::int64_t v) = 0;
  // Variables are numbered by the caller within the scope it owns.
  virtual Term make_var(std::uint32_t id, Symbol hint) = 0;
};

// Long-lived term storage with clause-local variable numbering.
class TermBuffer final : public TermFactory {
 public:
  TermBuffer() : arena_(512) {}
  Term make_struct(Symbol f, std::span<const Term> args) override;
  Term make_int(std::int64_t v) override;
  Term make_var(std::uint32_t id, Symbol hint) override;

 private:
  Arena arena_;
};

// Search-time term store: arena, bindings by variable id, and a trail.
class Store final : public TermFactory {
 public:
  struct Checkpoint {
    Arena::Mark arena;
    std::size_t trail = 0;
    std::uint32_t next_var = 0;
  };

  explicit Store(bool occurs_check = true) : arena_(1 << 16), occurs_check_(occurs_check) {}
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  Term make_struct(Symbol f, std::span<const Term> args) override;
  Term make_int(std::int64_t v) override;
  // The id argument is ignored: store variables get fresh global ids.
  Term make_var(std::uint32_t id, Symbol hint) override;
  Term fresh_var(Symbol hint = kNoHint) { return make_var(0, hint); }

  Term deref(Term t) const {
    while (t.is_var()) {
      Term b = bindings_[t.var_id()];
      if (!b) return t;
      t = b;
    }
    return t;
  }

  // Most general unifier; on failure the store is left as on entry.
  bool unify(Term a, Term b);
  bool is_ground(Term t) const;
  bool occurs_check() const { return occurs_check_; }
  void set_occurs_check(bool on) { occurs_check_ = on; }

  Checkpoint checkpoint() const { return {arena_.mark(), trail_.size(), next_var_}; }
  void undo(const Checkpoint& c);

  std::uint32_t variable_count() const { return next_var_; }
  std::size_t trail_size() const { return trail_.size(); }
  bool is_bound(Term var) const { return static_cast<bool>(bindings_[var.var_id()]); }

  // Structural equality after dereferencing.
  bool equal(Term a, Term b) const;
  // Copy of t with all bound variables replaced by their values.
  Term resolve(Term t);

 private:
  bool unify_rec(Term a, Term b);
  bool occurs(std::uint32_t var, Term t) const;
  void bind(Term var, Term value);

  Arena arena_;
  std::vector<Term> bindings_;
  std::vector<std::uint32_t> trail_;
  std::uint32_t next_var_ = 0;
  bool occurs_check_;
};

// A term frozen outside any store, with variables numbered 0..num_vars-1.
struct Frozen {
  std::shared_ptr<const TermBuffer> buffer;
  Term term;
  std::uint32_t num_vars = 0;
  std::vector<Symbol> hints;
};

// Copies the dereferenced term out of the store.
Frozen freeze(const Store& store, Term t);
// Copies a frozen-side term into the store; frame maps local ids to store terms
// and is filled with fresh variables on demand. Ground subterms are shared.
Term thaw(Store& store, Term frozen, std::span<Term> frame);
Term thaw(Store& store, const Frozen& f);

// Unifies a frozen-side term (e.g. a clause head) with a store term, filling frame.
bool match_frozen(Store& store, Term frozen, Term live, std::span<Term> frame);

// Structural equality up to consistent variable renaming.
bool variant(Term a, Term b);
// Pairwise variant check with one renaming shared across all positions.
bool variant(std::span<const Term> a, std::span<const Term> b);

}  // namespace linpbt
