#pragma once

#include <span>

#include "linpbt/syntax.hpp"
#include "linpbt/term.hpp"

namespace linpbt {

// Deterministic native predicate: binds outputs and returns true, or fails.
using BuiltinFn = bool (*)(Store&, std::span<const Term>);

struct Builtin {
  PredicateKey key;
  BuiltinFn fn;
};

// sum/3 sub/3 mul/3 (wrapping int64), lt/2 leq/2 gt/2 geq/2, neq/2 on ground terms, atom/1, int/1.
const Builtin* find_builtin(PredicateKey k);
std::span<const Builtin> builtins();

}  // namespace linpbt
