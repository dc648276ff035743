#include <cctype>
#include <charconv>
#include <set>

#include "linpbt/errors.hpp"
#include "linpbt/syntax.hpp"

namespace linpbt {

namespace {

enum class Tok {
  End, Ident, Quoted, Var, Int, Decimal,
  LParen, RParen, LBrack, RBrack, Bar, Comma, Dot,
  Amp, Arrow, LArrow, Equals, Hash, At, Semi, Colon, Slash
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  double decimal = 0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  const Token& peek() {
    if (!has_peek_) {
      peeked_ = scan();
      has_peek_ = true;
    }
    return peeked_;
  }

  Token next() {
    peek();
    has_peek_ = false;
    return std::move(peeked_);
  }

  // Second token of lookahead; only used right after peek().
  Token peek2() {
    peek();
    std::size_t saved_pos = pos_;
    int saved_line = line_;
    int saved_col = col_;
    Token t = scan();
    pos_ = saved_pos;
    line_ = saved_line;
    col_ = saved_col;
    return t;
  }

  // Raw text up to ';' or '.' at bracket depth 0. Nothing may be peeked.
  std::string raw_certificate() {
    skip_space();
    int depth = 0;
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (depth == 0 && (c == ';' || c == '.')) break;
      advance();
    }
    std::string out(src_.substr(start, pos_ - start));
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    return out;
  }

  [[noreturn]] void fail(const std::string& msg, int line, int col) const { throw ParseError(msg, line, col); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const { fail(msg, t.line, t.column); }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  Token scan() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    auto single = [&](Tok k) {
      advance();
      t.kind = k;
      return t;
    };
    if (std::islower(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
      t.kind = Tok::Ident;
      t.text = src_.substr(start, pos_ - start);
      return t;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
      t.kind = Tok::Var;
      t.text = src_.substr(start, pos_ - start);
      return t;
    }
    bool negative = c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || negative) {
      std::size_t start = pos_;
      if (negative) advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        t.kind = Tok::Decimal;
        t.text = src_.substr(start, pos_ - start);
        t.decimal = std::stod(t.text);
        return t;
      }
      t.kind = Tok::Int;
      t.text = src_.substr(start, pos_ - start);
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
      if (ec != std::errc()) fail("integer literal out of range", t.line, t.column);
      return t;
    }
    if (c == '\'') {
      advance();
      std::string text;
      while (true) {
        if (pos_ >= src_.size()) fail("unterminated quoted atom", t.line, t.column);
        char q = src_[pos_];
        advance();
        if (q == '\'') {
          if (pos_ < src_.size() && src_[pos_] == '\'') {
            text.push_back('\'');
            advance();
            continue;
          }
          break;
        }
        text.push_back(q);
      }
      t.kind = Tok::Quoted;
      t.text = std::move(text);
      return t;
    }
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '[': return single(Tok::LBrack);
      case ']': return single(Tok::RBrack);
      case '|': return single(Tok::Bar);
      case ',': return single(Tok::Comma);
      case '.': return single(Tok::Dot);
      case '&': return single(Tok::Amp);
      case '=': return single(Tok::Equals);
      case '#': return single(Tok::Hash);
      case '@': return single(Tok::At);
      case ';': return single(Tok::Semi);
      case ':': return single(Tok::Colon);
      case '/': return single(Tok::Slash);
      case '-':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
          advance();
          return single(Tok::Arrow);
        }
        break;
      case '<':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
          advance();
          return single(Tok::LArrow);
        }
        break;
      default:
        break;
    }
    fail(std::string("unexpected character '") + c + "'", line_, col_);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token peeked_;
  bool has_peek_ = false;
};

bool is_connective(Term t) {
  if (!t.is_struct()) return false;
  switch (t.functor()) {
    case kTensor: case kWith: case kLimp: return t.arity() == 2;
    case kBang: return t.arity() == 1;
    case kOne: case kErase: return t.arity() == 0;
    default: return false;
  }
}

// Variable naming scope: one per clause, one per property.
struct Scope {
  std::map<std::string, Term>* names;
  std::map<std::string, Term> own;
  std::vector<std::string> order;
  std::uint32_t next_id = 0;

  explicit Scope(std::map<std::string, Term>* external = nullptr) : names(external ? external : &own) {}
};

struct Infix {
  int priority;
  bool right_assoc;
  bool left_assoc;
  Symbol functor;
};

class Parser {
 public:
  Parser(std::string_view src, TermFactory& factory) : lex_(src), factory_(&factory) {}

  Lexer& lexer() { return lex_; }
  void set_factory(TermFactory& f) { factory_ = &f; }
  void set_scope(Scope* s) { scope_ = s; }

  Term parse(int max_priority) {
    int left_priority = 0;
    Term left = primary(max_priority, left_priority);
    return infix(left, left_priority, max_priority);
  }

  Token expect(Tok kind, const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != kind) lex_.fail_at(t, std::string("expected ") + what + describe(t));
    return lex_.next();
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return " but reached end of input";
    if (!t.text.empty()) return " near '" + t.text + "'";
    return "";
  }

 private:
  Term variable(const Token& t) {
    if (t.text == "_") return factory_->make_var(scope_->next_id++, kNoHint);
    auto it = scope_->names->find(t.text);
    if (it != scope_->names->end()) return it->second;
    Term v = factory_->make_var(scope_->next_id++, intern(t.text));
    scope_->names->emplace(t.text, v);
    scope_->order.push_back(t.text);
    return v;
  }

  static bool starts_term(const Token& t) {
    switch (t.kind) {
      case Tok::Ident: case Tok::Quoted: case Tok::Var: case Tok::Int: case Tok::LParen: case Tok::LBrack:
        return true;
      default:
        return false;
    }
  }

  Term primary(int max_priority, int& priority) {
    Token t = lex_.next();
    priority = 0;
    switch (t.kind) {
      case Tok::Int:
        return factory_->make_int(t.value);
      case Tok::Var:
        return variable(t);
      case Tok::LParen: {
        Term inner = parse(1200);
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::LBrack:
        return list();
      case Tok::Ident:
      case Tok::Quoted: {
        Symbol f = intern(t.text);
        if (lex_.peek().kind == Tok::LParen) {
          lex_.next();
          std::vector<Term> args;
          args.push_back(parse(999));
          while (lex_.peek().kind == Tok::Comma) {
            lex_.next();
            args.push_back(parse(999));
          }
          expect(Tok::RParen, "')' or ','");
          return factory_->make_struct(f, args);
        }
        if (t.kind == Tok::Ident && f == kBang && max_priority >= 600 && starts_term(lex_.peek())) {
          Term body = parse(600);
          priority = 600;
          return factory_->make_struct(kBang, std::span<const Term>(&body, 1));
        }
        return Term::atom(f);
      }
      default:
        lex_.fail_at(t, "expected a term" + describe(t));
    }
  }

  Term list() {
    if (lex_.peek().kind == Tok::RBrack) {
      lex_.next();
      return Term::atom(kNil);
    }
    std::vector<Term> items;
    items.push_back(parse(999));
    while (lex_.peek().kind == Tok::Comma) {
      lex_.next();
      items.push_back(parse(999));
    }
    Term tail = Term::atom(kNil);
    if (lex_.peek().kind == Tok::Bar) {
      lex_.next();
      tail = parse(999);
    }
    expect(Tok::RBrack, "']'");
    for (auto it = items.rbegin(); it != items.rend(); ++it) {
      Term pair[2] = {*it, tail};
      tail = factory_->make_struct(kCons, pair);
    }
    return tail;
  }

  std::optional<Infix> infix_operator(const Token& t) const {
    switch (t.kind) {
      case Tok::Ident:
        if (t.text == "x") return Infix{700, false, true, kTensor};
        return std::nullopt;
      case Tok::Amp: return Infix{800, false, true, kWith};
      case Tok::Arrow: return Infix{900, true, false, kLimp};
      case Tok::Comma: return Infix{1000, true, false, kConj};
      case Tok::Equals: return Infix{500, false, false, kEquals};
      default: return std::nullopt;
    }
  }

  Term infix(Term left, int left_priority, int max_priority) {
    while (true) {
      const Token& t = lex_.peek();
      auto op = infix_operator(t);
      if (!op || op->priority > max_priority) return left;
      int left_max = op->left_assoc ? op->priority : op->priority - 1;
      if (left_priority > left_max) return left;
      Token tok = lex_.next();
      if (op->functor == kLimp && (left.is_int() || is_connective(left))) {
        lex_.fail_at(tok, "the antecedent of -> must be an atom");
      }
      int right_max = op->right_assoc ? op->priority : op->priority - 1;
      Term right = parse(right_max);
      Term pair[2] = {left, right};
      left = factory_->make_struct(op->functor, pair);
      left_priority = op->priority;
      if (op->functor == kEquals && lex_.peek().kind == Tok::Equals) {
        lex_.fail_at(lex_.peek(), "'=' is not associative");
      }
    }
  }

  Lexer lex_;
  TermFactory* factory_;
  Scope* scope_ = nullptr;
};

bool reserved_head(Term head) {
  if (!head.is_struct()) return true;
  if (is_connective(head)) return true;
  Symbol f = head.functor();
  return (f == kConj && head.arity() == 2) || (f == kTrue && head.arity() == 0) || f == kCons ||
         f == kNil || (f == kEquals && head.arity() == 2);
}

class SpecParser {
 public:
  explicit SpecParser(std::string_view text, bool allow_declarations)
      : buffer_(std::make_shared<TermBuffer>()), parser_(text, *buffer_), allow_decls_(allow_declarations) {}

  SpecFile run() {
    Lexer& lex = parser_.lexer();
    while (lex.peek().kind != Tok::End) {
      const Token& t = lex.peek();
      if (t.kind == Tok::Ident && (t.text == "context" || t.text == "prop")) {
        Token second = lex.peek2();
        if (second.kind == Tok::Ident) {
          if (!allow_decls_) lex.fail_at(t, "declarations are not allowed here");
          if (t.text == "context") {
            context_decl();
          } else {
            property_decl();
          }
          continue;
        }
      }
      out_.program.add_clause(clause());
    }
    return std::move(out_);
  }

  Clause clause() {
    Lexer& lex = parser_.lexer();
    Scope scope;
    parser_.set_scope(&scope);
    const Token start = lex.peek();
    Term head = parser_.parse(1200);
    if (head.is_var()) lex.fail_at(start, "clause head is a variable");
    if (reserved_head(head)) lex.fail_at(start, "clause head uses a reserved functor or is not an atom");
    PredicateKey key{head.functor(), head.arity()};
    if (is_builtin(key)) lex.fail_at(start, "clause head redefines builtin " + to_string(key));
    auto [it, inserted] = arities_.try_emplace(head.functor(), head.arity());
    if (!inserted && it->second != head.arity()) {
      lex.fail_at(start, "arity clash for " + symbol_name(head.functor()) + ": used with arity " +
                             std::to_string(it->second) + " and " + std::to_string(head.arity()));
    }
    Term body = Term::atom(kOne);
    if (lex.peek().kind == Tok::LArrow) {
      lex.next();
      body = parser_.parse(1200);
    }
    double weight = 1.0;
    if (lex.peek().kind == Tok::Hash) {
      lex.next();
      weight = number();
    }
    parser_.expect(Tok::Dot, "'.' at end of clause");
    Clause c;
    c.buffer = buffer_;
    c.head = head;
    c.body = body;
    c.num_vars = scope.next_id;
    c.weight = weight;
    c.line = start.line;
    c.first_arg = head.arity() > 0 ? IndexKey::of(head.arg(0)) : IndexKey{};
    return c;
  }

 private:
  double number() {
    Lexer& lex = parser_.lexer();
    Token t = lex.next();
    double value = 0;
    if (t.kind == Tok::Int) {
      value = static_cast<double>(t.value);
      if (lex.peek().kind == Tok::Slash) {
        lex.next();
        Token d = parser_.expect(Tok::Int, "denominator");
        if (d.value <= 0) lex.fail_at(d, "weight denominator must be positive");
        value /= static_cast<double>(d.value);
      }
    } else if (t.kind == Tok::Decimal) {
      value = t.decimal;
    } else {
      lex.fail_at(t, "expected a weight");
    }
    if (!(value > 0)) lex.fail_at(t, "clause weight must be positive");
    return value;
  }

  std::vector<ContextEntry> entries(Tok terminator) {
    std::vector<ContextEntry> out;
    Lexer& lex = parser_.lexer();
    if (lex.peek().kind == terminator) return out;
    while (true) {
      Term t = parser_.parse(999);
      if (t.has_functor(kBang, 1)) {
        out.push_back({t.arg(0), Persistence::Persistent});
      } else {
        out.push_back({t, Persistence::Linear});
      }
      if (lex.peek().kind != Tok::Comma) break;
      lex.next();
    }
    return out;
  }

  void context_decl() {
    Lexer& lex = parser_.lexer();
    lex.next();
    Token name = parser_.expect(Tok::Ident, "context name");
    parser_.expect(Tok::Colon, "':'");
    Scope scope;
    parser_.set_scope(&scope);
    ContextDecl decl;
    decl.name = name.text;
    decl.buffer = buffer_;
    decl.entries = entries(Tok::Dot);
    parser_.expect(Tok::Dot, "'.' at end of context");
    if (out_.contexts.count(decl.name)) lex.fail_at(name, "duplicate context " + decl.name);
    out_.contexts.emplace(decl.name, std::move(decl));
  }

  void property_decl() {
    Lexer& lex = parser_.lexer();
    Token kw = lex.next();
    Token name = parser_.expect(Tok::Ident, "property name");
    parser_.expect(Tok::Colon, "':'");
    Scope scope;
    parser_.set_scope(&scope);
    PropertyDecl decl;
    decl.name = name.text;
    decl.buffer = buffer_;
    decl.line = kw.line;
    while (true) {
      decl.stages.push_back(stage());
      if (lex.peek().kind == Tok::Semi) {
        lex.next();
        continue;
      }
      parser_.expect(Tok::Dot, "';' or '.' after a stage");
      break;
    }
    decl.var_names.resize(scope.next_id);
    for (const auto& [var_name, var] : scope.own) decl.var_names[var.var_id()] = var_name;
    for (const auto& p : out_.properties) {
      if (p.name == decl.name) lex.fail_at(name, "duplicate property " + decl.name);
    }
    out_.properties.push_back(std::move(decl));
  }

  StageDecl stage() {
    Lexer& lex = parser_.lexer();
    Token role = parser_.expect(Tok::Ident, "stage role (gen, pre, conclude, forbid)");
    StageDecl s;
    s.line = role.line;
    if (role.text == "gen") {
      s.role = StageRole::Generate;
    } else if (role.text == "pre") {
      s.role = StageRole::Precondition;
    } else if (role.text == "conclude") {
      s.role = StageRole::Conclude;
    } else if (role.text == "forbid") {
      s.role = StageRole::Forbid;
    } else {
      lex.fail_at(role, "unknown stage role '" + role.text + "'");
    }
    s.goal = parser_.parse(1200);
    while (true) {
      const Token& t = lex.peek();
      if (t.kind == Tok::Ident && t.text == "in") {
        lex.next();
        if (lex.peek().kind == Tok::LBrack) {
          lex.next();
          s.context = entries(Tok::RBrack);
          parser_.expect(Tok::RBrack, "']'");
        } else {
          s.context_name = parser_.expect(Tok::Ident, "context name").text;
        }
      } else if (t.kind == Tok::Ident && t.text == "using") {
        lex.next();
        Token engine = parser_.expect(Tok::Ident, "engine name");
        if (engine.text == "vanilla") {
          s.engine = Dialect::Vanilla;
        } else if (engine.text == "linear") {
          s.engine = Dialect::Linear;
        } else {
          lex.fail_at(engine, "unknown engine '" + engine.text + "'");
        }
      } else if (t.kind == Tok::At) {
        lex.next();
        s.certificate = lex.raw_certificate();
        if (s.certificate.empty()) lex.fail_at(t, "empty certificate after '@'");
      } else {
        break;
      }
    }
    return s;
  }

  std::shared_ptr<TermBuffer> buffer_;
  Parser parser_;
  bool allow_decls_;
  SpecFile out_;
  std::unordered_map<Symbol, std::uint32_t> arities_;
};

}  // namespace

SpecFile parse_spec(std::string_view text) { return SpecParser(text, true).run(); }

Program parse_program(std::string_view text) { return SpecParser(text, false).run().program; }

Clause parse_clause(std::string_view text) {
  SpecParser p(text, false);
  SpecFile f = p.run();
  if (f.program.clause_count() != 1) throw ParseError("expected exactly one clause", 1, 1);
  return f.program.clauses(f.program.predicates().front())->front();
}

Term parse_term(std::string_view text, Store& store, std::map<std::string, Term>* names) {
  Parser parser(text, store);
  Scope scope(names);
  parser.set_scope(&scope);
  Term t = parser.parse(1200);
  const Token& rest = parser.lexer().peek();
  if (rest.kind == Tok::Dot) parser.lexer().next();
  const Token& end = parser.lexer().peek();
  if (end.kind != Tok::End) parser.lexer().fail_at(end, "unexpected text after term" + Parser::describe(end));
  return t;
}

std::vector<ContextEntry> parse_context(std::string_view text, Store& store,
                                        std::map<std::string, Term>* names) {
  Parser parser(text, store);
  Scope scope(names);
  parser.set_scope(&scope);
  std::vector<ContextEntry> out;
  if (parser.lexer().peek().kind == Tok::End) return out;
  while (true) {
    Term t = parser.parse(999);
    if (t.has_functor(kBang, 1)) {
      out.push_back({t.arg(0), Persistence::Persistent});
    } else {
      out.push_back({t, Persistence::Linear});
    }
    if (parser.lexer().peek().kind != Tok::Comma) break;
    parser.lexer().next();
  }
  const Token& end = parser.lexer().peek();
  if (end.kind != Tok::End) parser.lexer().fail_at(end, "unexpected text in context" + Parser::describe(end));
  return out;
}

}  // namespace linpbt
