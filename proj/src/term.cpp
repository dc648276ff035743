#include "linpbt/term.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <mutex>
#include <unordered_map>

namespace linpbt {

namespace {

struct SymbolTable {
  std::mutex mutex;
  std::deque<std::string> names;
  std::deque<Node> atoms;
  std::unordered_map<std::string_view, Symbol> ids;

  SymbolTable() {
    for (const char* n : {"x", "&", "->", "bang", "one", "erase", ",", "true", "[]", ".", "=", "_"}) {
      add(n);
    }
  }

  Symbol add(std::string_view name) {
    auto id = static_cast<Symbol>(names.size());
    names.emplace_back(name);
    atoms.push_back(Node{Kind::Struct, true, 0, 0, id});
    ids.emplace(names.back(), id);
    return id;
  }
};

SymbolTable& table() {
  static SymbolTable t;
  return t;
}

constexpr std::size_t kAlign = 8;

Node* new_struct(Arena& arena, Symbol f, std::span<const Term> args) {
  void* mem = arena.allocate(sizeof(Node) + args.size() * sizeof(Term));
  auto* n = new (mem) Node{Kind::Struct, true, 0, static_cast<std::uint32_t>(args.size()), f};
  auto* out = reinterpret_cast<Term*>(n + 1);
  for (std::size_t i = 0; i < args.size(); ++i) {
    out[i] = args[i];
    n->ground = n->ground && args[i].ground_node();
  }
  return n;
}

Node* new_int(Arena& arena, std::int64_t v) {
  void* mem = arena.allocate(sizeof(Node));
  return new (mem) Node{Kind::Int, true, 0, 0, static_cast<std::uint64_t>(v)};
}

Node* new_var(Arena& arena, std::uint32_t id, Symbol hint) {
  void* mem = arena.allocate(sizeof(Node));
  return new (mem) Node{Kind::Var, false, 0, hint, id};
}

}  // namespace

Symbol intern(std::string_view name) {
  auto& t = table();
  std::lock_guard lock(t.mutex);
  if (auto it = t.ids.find(name); it != t.ids.end()) return it->second;
  return t.add(name);
}

const std::string& symbol_name(Symbol s) {
  auto& t = table();
  std::lock_guard lock(t.mutex);
  return t.names.at(s);
}

Term Term::atom(Symbol s) {
  auto& t = table();
  std::lock_guard lock(t.mutex);
  return Term(&t.atoms.at(s));
}

// ---- Arena

void* Arena::allocate(std::size_t bytes) {
  bytes = (bytes + kAlign - 1) & ~(kAlign - 1);
  while (true) {
    if (current_ < chunks_.size()) {
      Chunk& c = chunks_[current_];
      if (offset_ + bytes <= c.size) {
        void* p = c.data.get() + offset_;
        offset_ += bytes;
        return p;
      }
      if (current_ + 1 < chunks_.size() && chunks_[current_ + 1].size >= bytes) {
        ++current_;
        offset_ = 0;
        continue;
      }
      if (current_ + 1 < chunks_.size()) {
        // Next chunk too small for this request: drop the tail chunks.
        chunks_.resize(current_ + 1);
      }
    }
    std::size_t size = std::max(next_size_, bytes);
    next_size_ = std::min<std::size_t>(next_size_ * 2, std::size_t{1} << 24);
    chunks_.push_back({std::make_unique<std::byte[]>(size), size});
    current_ = chunks_.size() - 1;
    offset_ = 0;
  }
}

void Arena::release(Mark m) {
  current_ = m.chunk;
  offset_ = m.offset;
}

std::size_t Arena::bytes_reserved() const {
  std::size_t total = 0;
  for (const auto& c : chunks_) total += c.size;
  return total;
}

// ---- TermBuffer

Term TermBuffer::make_struct(Symbol f, std::span<const Term> args) {
  if (args.empty()) return Term::atom(f);
  return Term(new_struct(arena_, f, args));
}

Term TermBuffer::make_int(std::int64_t v) { return Term(new_int(arena_, v)); }

Term TermBuffer::make_var(std::uint32_t id, Symbol hint) { return Term(new_var(arena_, id, hint)); }

// ---- Store

Term Store::make_struct(Symbol f, std::span<const Term> args) {
  if (args.empty()) return Term::atom(f);
  return Term(new_struct(arena_, f, args));
}

Term Store::make_int(std::int64_t v) { return Term(new_int(arena_, v)); }

Term Store::make_var(std::uint32_t /*id*/, Symbol hint) {
  std::uint32_t id = next_var_++;
  if (bindings_.size() <= id) bindings_.resize(std::max<std::size_t>(64, bindings_.size() * 2));
  bindings_[id] = Term();
  return Term(new_var(arena_, id, hint));
}

void Store::bind(Term var, Term value) {
  bindings_[var.var_id()] = value;
  trail_.push_back(var.var_id());
}

void Store::undo(const Checkpoint& c) {
  while (trail_.size() > c.trail) {
    bindings_[trail_.back()] = Term();
    trail_.pop_back();
  }
  arena_.release(c.arena);
  next_var_ = c.next_var;
}

bool Store::occurs(std::uint32_t var, Term t) const {
  t = deref(t);
  if (t.ground_node()) return false;
  switch (t.kind()) {
    case Kind::Var:
      return t.var_id() == var;
    case Kind::Int:
      return false;
    case Kind::Struct:
      for (Term a : t.args()) {
        if (occurs(var, a)) return true;
      }
      return false;
  }
  return false;
}

bool Store::unify_rec(Term a, Term b) {
  a = deref(a);
  b = deref(b);
  if (a == b) return true;
  if (a.is_var()) {
    if (b.is_var()) {
      // Bind the younger variable to the older one.
      if (a.var_id() < b.var_id()) std::swap(a, b);
      bind(a, b);
      return true;
    }
    if (occurs_check_ && occurs(a.var_id(), b)) return false;
    bind(a, b);
    return true;
  }
  if (b.is_var()) {
    if (occurs_check_ && occurs(b.var_id(), a)) return false;
    bind(b, a);
    return true;
  }
  if (a.kind() != b.kind()) return false;
  if (a.is_int()) return a.int_value() == b.int_value();
  if (a.functor() != b.functor() || a.arity() != b.arity()) return false;
  const std::uint32_t n = a.arity();
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!unify_rec(a.arg(i), b.arg(i))) return false;
  }
  return true;
}

bool Store::unify(Term a, Term b) {
  const std::size_t mark = trail_.size();
  if (unify_rec(a, b)) return true;
  while (trail_.size() > mark) {
    bindings_[trail_.back()] = Term();
    trail_.pop_back();
  }
  return false;
}

bool Store::is_ground(Term t) const {
  t = deref(t);
  if (t.ground_node()) return true;
  if (t.is_var()) return false;
  for (Term a : t.args()) {
    if (!is_ground(a)) return false;
  }
  return true;
}

bool Store::equal(Term a, Term b) const {
  a = deref(a);
  b = deref(b);
  if (a == b) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::Var:
      return false;
    case Kind::Int:
      return a.int_value() == b.int_value();
    case Kind::Struct:
      if (a.functor() != b.functor() || a.arity() != b.arity()) return false;
      for (std::uint32_t i = 0; i < a.arity(); ++i) {
        if (!equal(a.arg(i), b.arg(i))) return false;
      }
      return true;
  }
  return false;
}

Term Store::resolve(Term t) {
  t = deref(t);
  if (t.ground_node() || t.is_var()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (Term a : t.args()) {
    Term r = resolve(a);
    changed = changed || r != a;
    args.push_back(r);
  }
  return changed ? make_struct(t.functor(), args) : t;
}

// ---- freezing

namespace {

struct Freezer {
  const Store& store;
  TermBuffer& buffer;
  std::unordered_map<std::uint32_t, Term> vars;
  std::vector<Symbol> hints;

  Term copy(Term t) {
    t = store.deref(t);
    if (t.is_atom()) return t;
    switch (t.kind()) {
      case Kind::Var: {
        auto [it, inserted] = vars.try_emplace(t.var_id());
        if (inserted) {
          it->second = buffer.make_var(static_cast<std::uint32_t>(hints.size()), t.var_hint());
          hints.push_back(t.var_hint());
        }
        return it->second;
      }
      case Kind::Int:
        return buffer.make_int(t.int_value());
      case Kind::Struct: {
        std::vector<Term> args;
        args.reserve(t.arity());
        for (Term a : t.args()) args.push_back(copy(a));
        return buffer.make_struct(t.functor(), args);
      }
    }
    return t;
  }
};

}  // namespace

Frozen freeze(const Store& store, Term t) {
  auto buffer = std::make_shared<TermBuffer>();
  Freezer f{store, *buffer, {}, {}};
  Term copy = f.copy(t);
  return Frozen{std::move(buffer), copy, static_cast<std::uint32_t>(f.hints.size()),
                std::move(f.hints)};
}

Term thaw(Store& store, Term t, std::span<Term> frame) {
  if (t.ground_node()) return t;
  switch (t.kind()) {
    case Kind::Var: {
      Term& slot = frame[t.var_id()];
      if (!slot) slot = store.fresh_var(t.var_hint());
      return slot;
    }
    case Kind::Int:
      return t;
    case Kind::Struct: {
      const std::uint32_t n = t.arity();
      Term small[8];
      std::vector<Term> large;
      Term* args = small;
      if (n > 8) {
        large.resize(n);
        args = large.data();
      }
      for (std::uint32_t i = 0; i < n; ++i) args[i] = thaw(store, t.arg(i), frame);
      return store.make_struct(t.functor(), std::span<const Term>(args, n));
    }
  }
  return t;
}

Term thaw(Store& store, const Frozen& f) {
  std::vector<Term> frame(f.num_vars);
  return thaw(store, f.term, frame);
}

bool match_frozen(Store& store, Term frozen, Term live, std::span<Term> frame) {
  if (frozen.ground_node()) return store.unify(frozen, live);
  if (frozen.is_var()) {
    Term& slot = frame[frozen.var_id()];
    if (!slot) {
      slot = live;
      return true;
    }
    return store.unify(slot, live);
  }
  live = store.deref(live);
  if (live.is_var()) return store.unify(live, thaw(store, frozen, frame));
  if (!live.is_struct() || live.functor() != frozen.functor() || live.arity() != frozen.arity()) {
    return false;
  }
  const std::uint32_t n = frozen.arity();
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!match_frozen(store, frozen.arg(i), live.arg(i), frame)) return false;
  }
  return true;
}

namespace {

bool variant_rec(Term a, Term b, std::unordered_map<std::uint32_t, std::uint32_t>& ab,
                 std::unordered_map<std::uint32_t, std::uint32_t>& ba) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::Var: {
      auto i1 = ab.try_emplace(a.var_id(), b.var_id()).first;
      auto i2 = ba.try_emplace(b.var_id(), a.var_id()).first;
      return i1->second == b.var_id() && i2->second == a.var_id();
    }
    case Kind::Int:
      return a.int_value() == b.int_value();
    case Kind::Struct:
      if (a.functor() != b.functor() || a.arity() != b.arity()) return false;
      for (std::uint32_t i = 0; i < a.arity(); ++i) {
        if (!variant_rec(a.arg(i), b.arg(i), ab, ba)) return false;
      }
      return true;
  }
  return false;
}

}  // namespace

bool variant(Term a, Term b) {
  std::unordered_map<std::uint32_t, std::uint32_t> ab;
  std::unordered_map<std::uint32_t, std::uint32_t> ba;
  return variant_rec(a, b, ab, ba);
}

bool variant(std::span<const Term> a, std::span<const Term> b) {
  if (a.size() != b.size()) return false;
  std::unordered_map<std::uint32_t, std::uint32_t> ab;
  std::unordered_map<std::uint32_t, std::uint32_t> ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!variant_rec(a[i], b[i], ab, ba)) return false;
  }
  return true;
}

}  // namespace linpbt
