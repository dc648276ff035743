#include "linpbt/builtins.hpp"

#include <array>
#include <cstdint>
#include <optional>

#include "linpbt/errors.hpp"

namespace linpbt {

namespace {

// Unbound input is an error; a bound non-integer simply makes the builtin fail.
std::optional<std::int64_t> int_input(Store& s, Term t, const char* who) {
  t = s.deref(t);
  if (t.is_var()) throw InstantiationError(std::string(who) + ": unbound input");
  if (!t.is_int()) return std::nullopt;
  return t.int_value();
}

template <class F>
bool arith(Store& s, std::span<const Term> a, const char* who, F f) {
  auto x = int_input(s, a[0], who);
  auto y = int_input(s, a[1], who);
  if (!x || !y) return false;
  auto r = f(static_cast<std::uint64_t>(*x), static_cast<std::uint64_t>(*y));
  return s.unify(a[2], s.make_int(static_cast<std::int64_t>(r)));
}

template <class F>
bool compare(Store& s, std::span<const Term> a, const char* who, F f) {
  auto x = int_input(s, a[0], who);
  auto y = int_input(s, a[1], who);
  return x && y && f(*x, *y);
}

bool sum(Store& s, std::span<const Term> a) {
  return arith(s, a, "sum/3", [](std::uint64_t x, std::uint64_t y) { return x + y; });
}
bool sub(Store& s, std::span<const Term> a) {
  return arith(s, a, "sub/3", [](std::uint64_t x, std::uint64_t y) { return x - y; });
}
bool mul(Store& s, std::span<const Term> a) {
  return arith(s, a, "mul/3", [](std::uint64_t x, std::uint64_t y) { return x * y; });
}
bool lt(Store& s, std::span<const Term> a) {
  return compare(s, a, "lt/2", [](std::int64_t x, std::int64_t y) { return x < y; });
}
bool leq(Store& s, std::span<const Term> a) {
  return compare(s, a, "leq/2", [](std::int64_t x, std::int64_t y) { return x <= y; });
}
bool gt(Store& s, std::span<const Term> a) {
  return compare(s, a, "gt/2", [](std::int64_t x, std::int64_t y) { return x > y; });
}
bool geq(Store& s, std::span<const Term> a) {
  return compare(s, a, "geq/2", [](std::int64_t x, std::int64_t y) { return x >= y; });
}

bool neq(Store& s, std::span<const Term> a) {
  if (!s.is_ground(a[0]) || !s.is_ground(a[1])) throw InstantiationError("neq/2: arguments must be ground");
  return !s.equal(a[0], a[1]);
}

bool atom(Store& s, std::span<const Term> a) { return s.deref(a[0]).is_atom(); }
bool integer(Store& s, std::span<const Term> a) { return s.deref(a[0]).is_int(); }

const std::array<Builtin, 10>& table() {
  static const std::array<Builtin, 10> t = {{
      {{intern("sum"), 3}, sum},
      {{intern("sub"), 3}, sub},
      {{intern("mul"), 3}, mul},
      {{intern("lt"), 2}, lt},
      {{intern("leq"), 2}, leq},
      {{intern("gt"), 2}, gt},
      {{intern("geq"), 2}, geq},
      {{intern("neq"), 2}, neq},
      {{intern("atom"), 1}, atom},
      {{intern("int"), 1}, integer},
  }};
  return t;
}

}  // namespace

const Builtin* find_builtin(PredicateKey k) {
  for (const Builtin& b : table()) {
    if (b.key == k) return &b;
  }
  return nullptr;
}

std::span<const Builtin> builtins() { return table(); }

}  // namespace linpbt
