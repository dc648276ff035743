#include <cctype>

#include "linpbt/syntax.hpp"

namespace linpbt {

namespace {

bool bare_atom(const std::string& name) {
  if (name.empty() || !std::islower(static_cast<unsigned char>(name[0]))) return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

void write_atom(Symbol s, std::string& out) {
  const std::string& name = symbol_name(s);
  if (s == kNil) {
    out += "[]";
  } else if (bare_atom(name)) {
    out += name;
  } else {
    out += '\'';
    for (char c : name) {
      if (c == '\'') out += '\'';
      out += c;
    }
    out += '\'';
  }
}

struct Op {
  int priority;
  bool right_assoc;
  bool left_assoc;
  const char* text;
};

const Op* binary_op(Term t) {
  static const Op tensor{700, false, true, " x "};
  static const Op with{800, false, true, " & "};
  static const Op limp{900, true, false, " -> "};
  static const Op conj{1000, true, false, ", "};
  static const Op equals{500, false, false, " = "};
  if (t.arity() != 2) return nullptr;
  switch (t.functor()) {
    case kTensor: return &tensor;
    case kWith: return &with;
    case kLimp: return &limp;
    case kConj: return &conj;
    case kEquals: return &equals;
    default: return nullptr;
  }
}

}  // namespace

std::string Printer::operator()(Term t) const {
  std::string out;
  print(t, out);
  return out;
}

void Printer::print(Term t, std::string& out, int context_priority) const {
  t = deref(t);
  for (const auto& d : domains_) {
    if (d(*this, t, out)) return;
  }
  print_generic(t, out, context_priority);
}

void Printer::print_generic(Term t, std::string& out, int context_priority) const {
  t = deref(t);
  switch (t.kind()) {
    case Kind::Var: {
      Symbol hint = t.var_hint();
      if (hint != kNoHint) out += symbol_name(hint);
      out += '_';
      out += std::to_string(t.var_id());
      return;
    }
    case Kind::Int:
      out += std::to_string(t.int_value());
      return;
    case Kind::Struct:
      break;
  }
  if (t.arity() == 0) {
    write_atom(t.functor(), out);
    return;
  }
  if (t.has_functor(kCons, 2)) {
    out += '[';
    print(t.arg(0), out, 999);
    Term rest = deref(t.arg(1));
    while (rest.has_functor(kCons, 2)) {
      out += ',';
      print(rest.arg(0), out, 999);
      rest = deref(rest.arg(1));
    }
    if (!rest.has_functor(kNil, 0)) {
      out += '|';
      print(rest, out, 999);
    }
    out += ']';
    return;
  }
  if (const Op* op = binary_op(t)) {
    bool parens = op->priority > context_priority;
    if (parens) out += '(';
    print(t.arg(0), out, op->left_assoc ? op->priority : op->priority - 1);
    out += op->text;
    print(t.arg(1), out, op->right_assoc ? op->priority : op->priority - 1);
    if (parens) out += ')';
    return;
  }
  if (t.has_functor(kBang, 1)) {
    bool parens = 600 > context_priority;
    if (parens) out += '(';
    out += "bang ";
    print(t.arg(0), out, 600);
    if (parens) out += ')';
    return;
  }
  write_atom(t.functor(), out);
  out += '(';
  for (std::uint32_t i = 0; i < t.arity(); ++i) {
    if (i) out += ',';
    print(t.arg(i), out, 999);
  }
  out += ')';
}

std::string pretty(Term t, const Store* store) { return Printer(store)(t); }

std::string pretty(const Clause& c) {
  Printer p;
  std::string out;
  p.print(c.head, out, 1200);
  if (!c.body.has_functor(kOne, 0)) {
    out += " <- ";
    p.print(c.body, out, 1200);
  }
  if (c.weight != 1.0) {
    out += " # ";
    std::string w = std::to_string(c.weight);
    while (w.back() == '0') w.pop_back();
    if (w.back() == '.') w.pop_back();
    out += w;
  }
  out += '.';
  return out;
}

}  // namespace linpbt
