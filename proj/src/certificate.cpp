#include "linpbt/certificate.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "linpbt/errors.hpp"

namespace linpbt {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double unit_interval(std::uint64_t state) {
  return (static_cast<double>(state >> 11) + 0.5) * 0x1.0p-53;
}

namespace {

std::uint64_t split_state(std::uint64_t state, std::uint64_t branch) {
  return mix64(state ^ (0xD1B54A32D192ED03ULL * (branch + 1)));
}

}  // namespace

// ---- construction

Certificate Certificate::height(std::uint32_t n) {
  Certificate c;
  c.leaves_[0] = {Kind::Height, n, 0};
  return c;
}

Certificate Certificate::size(std::uint32_t n) {
  Certificate c = height(0);
  c.leaves_[0] = {Kind::Size, n, 0};
  return c;
}

Certificate Certificate::random(std::uint64_t seed, std::uint32_t guard) {
  Certificate c = height(0);
  c.leaves_[0] = {Kind::Random, guard, seed};
  return c;
}

Certificate Certificate::pair(const Certificate& a, const Certificate& b) {
  if (a.count_ + b.count_ > kMaxLeaves) {
    throw ConfigurationError("certificate pairs more than " + std::to_string(kMaxLeaves) + " components");
  }
  Certificate c;
  c.count_ = static_cast<std::uint8_t>(a.count_ + b.count_);
  std::copy_n(a.leaves_.begin(), a.count_, c.leaves_.begin());
  std::copy_n(b.leaves_.begin(), b.count_, c.leaves_.begin() + a.count_);
  c.shape_[0] = -1;
  std::copy_n(a.shape_.begin(), a.shape_len_, c.shape_.begin() + 1);
  std::copy_n(b.shape_.begin(), b.shape_len_, c.shape_.begin() + 1 + a.shape_len_);
  c.shape_len_ = static_cast<std::uint8_t>(1 + a.shape_len_ + b.shape_len_);
  return c;
}

std::size_t Certificate::subtree_end(std::size_t pos) const {
  int pending = 1;
  while (pending > 0) {
    pending += shape_[pos] < 0 ? 1 : -1;
    ++pos;
  }
  return pos;
}

Certificate Certificate::sub(std::size_t begin) const {
  std::size_t end = subtree_end(begin);
  std::size_t first_leaf = 0;
  for (std::size_t i = 0; i < begin; ++i) first_leaf += shape_[i] >= 0 ? 1 : 0;
  Certificate c;
  c.count_ = 0;
  c.shape_len_ = static_cast<std::uint8_t>(end - begin);
  std::copy(shape_.begin() + static_cast<std::ptrdiff_t>(begin), shape_.begin() + static_cast<std::ptrdiff_t>(end),
            c.shape_.begin());
  for (std::size_t i = begin; i < end; ++i) {
    if (shape_[i] >= 0) c.leaves_[c.count_++] = leaves_[first_leaf++];
  }
  return c;
}

Certificate Certificate::left() const {
  if (kind() != Kind::Pair) throw ConfigurationError("left() of a non-pair certificate");
  return sub(1);
}

Certificate Certificate::right() const {
  if (kind() != Kind::Pair) throw ConfigurationError("right() of a non-pair certificate");
  return sub(subtree_end(1));
}

bool Certificate::has(Kind k) const {
  return std::any_of(leaves_.begin(), leaves_.begin() + count_, [k](const Leaf& l) { return l.kind == k; });
}

Certificate Certificate::with_leaves(std::span<const Leaf> ls) const {
  Certificate c = *this;
  std::copy(ls.begin(), ls.end(), c.leaves_.begin());
  return c;
}

Certificate Certificate::reseeded(std::uint64_t seed) const {
  Certificate c = *this;
  for (std::size_t i = 0; i < count_; ++i) {
    if (c.leaves_[i].kind == Kind::Random) c.leaves_[i].state = split_state(seed, i);
  }
  return c;
}

bool operator==(const Certificate& a, const Certificate& b) {
  return a.count_ == b.count_ && a.shape_len_ == b.shape_len_ &&
         std::equal(a.leaves_.begin(), a.leaves_.begin() + a.count_, b.leaves_.begin()) &&
         std::equal(a.shape_.begin(), a.shape_.begin() + a.shape_len_, b.shape_.begin());
}

std::string Certificate::render(std::size_t& shape_pos, std::size_t& leaf_pos) const {
  if (shape_[shape_pos++] < 0) {
    std::string l = render(shape_pos, leaf_pos);
    std::string r = render(shape_pos, leaf_pos);
    return "pair(" + l + "," + r + ")";
  }
  const Leaf& leaf = leaves_[leaf_pos++];
  switch (leaf.kind) {
    case Kind::Height: return "height:" + std::to_string(leaf.bound);
    case Kind::Size: return "size:" + std::to_string(leaf.bound);
    case Kind::Random:
      return "random:seed=" + std::to_string(leaf.state) + ",guard=" + std::to_string(leaf.bound);
    case Kind::Pair: break;
  }
  return "?";
}

std::string Certificate::to_string() const {
  std::size_t s = 0;
  std::size_t l = 0;
  return render(s, l);
}

// ---- parsing

namespace {

class CertParser {
 public:
  explicit CertParser(std::string_view text) : text_(text) {}

  Certificate parse_all() {
    Certificate c = parse();
    skip();
    if (pos_ != text_.size()) fail("unexpected text");
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("certificate '" + std::string(text_) + "': " + msg, 1, static_cast<int>(pos_) + 1);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view word) {
    skip();
    if (text_.substr(pos_, word.size()) == word) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view word) {
    if (!accept(word)) fail("expected '" + std::string(word) + "'");
  }

  std::uint64_t number() {
    skip();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc()) fail("expected a non-negative integer");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  std::uint32_t bound() {
    std::uint64_t v = number();
    if (v > 1'000'000) fail("bound too large");
    return static_cast<std::uint32_t>(v);
  }

  bool random_option_follows() {
    std::size_t save = pos_;
    bool yes = accept(",") && (accept("seed") || accept("guard"));
    pos_ = save;
    return yes;
  }

  Certificate parse() {
    if (accept("pair")) {
      expect("(");
      Certificate a = parse();
      expect(",");
      Certificate b = parse();
      expect(")");
      return Certificate::pair(a, b);
    }
    if (accept("height")) {
      expect(":");
      return Certificate::height(bound());
    }
    if (accept("size")) {
      expect(":");
      return Certificate::size(bound());
    }
    if (accept("random")) {
      std::uint64_t seed = 0;
      std::uint32_t guard = Certificate::kDefaultGuard;
      if (accept(":")) {
        do {
          if (accept("seed")) {
            expect("=");
            seed = number();
          } else if (accept("guard")) {
            expect("=");
            guard = bound();
          } else {
            fail("expected seed= or guard=");
          }
        } while (random_option_follows() && accept(","));
      }
      return Certificate::random(seed, guard);
    }
    fail("expected height:, size:, random or pair(");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Certificate Certificate::parse(std::string_view text) { return CertParser(text).parse_all(); }

// ---- experts

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::With: return "with";
    case Rule::One: return "one";
    case Rule::Tensor: return "tensor";
    case Rule::Erase: return "erase";
    case Rule::Lolli: return "lolli";
    case Rule::Bang: return "bang";
    case Rule::Init: return "init";
    case Rule::BangInit: return "init!";
    case Rule::Unfold: return "unfold";
  }
  return "?";
}

Certificate ExpertOutcome::second_after(const Certificate& first_residual) const {
  if (threaded == 0) return second;
  Certificate c = second;
  auto out = c.leaves();
  auto in = first_residual.leaves();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (threaded & (1u << i)) out[i] = in[i];
  }
  return c;
}

ExpertOutcome expert(Rule rule, const Certificate& cert) {
  ExpertOutcome o;
  o.accepted = true;
  o.first = cert;
  switch (rule) {
    case Rule::One:
    case Rule::Erase:
    case Rule::Init:
    case Rule::BangInit:
    case Rule::Lolli:
    case Rule::Bang:
      return o;
    case Rule::With:
    case Rule::Tensor: {
      o.second = cert;
      auto l = o.first.leaves();
      auto r = o.second.leaves();
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (l[i].kind == Certificate::Kind::Random) {
          l[i].state = split_state(cert.leaves()[i].state, 0);
          r[i].state = split_state(cert.leaves()[i].state, 1);
        } else if (l[i].kind == Certificate::Kind::Size && rule == Rule::Tensor) {
          o.threaded |= static_cast<std::uint8_t>(1u << i);
        }
      }
      return o;
    }
    case Rule::Unfold:
      throw ConfigurationError("unfold is decided by UnfoldPlan");
  }
  return o;
}

Certificate conclude(const Certificate& input, const Certificate& premise_residual) {
  Certificate out = input;
  auto o = out.leaves();
  auto r = premise_residual.leaves();
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (o[i].kind == Certificate::Kind::Size) o[i].bound = r[i].bound;
  }
  return out;
}

std::optional<Certificate> join_with(const Certificate& input, const Certificate& r1, const Certificate& r2) {
  auto a = r1.leaves();
  auto b = r2.leaves();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind == Certificate::Kind::Size && a[i].bound != b[i].bound) return std::nullopt;
  }
  return conclude(input, r1);
}

// ---- unfolding

UnfoldPlan::UnfoldPlan(const Certificate& cert, std::span<const Clause> candidates)
    : cert_(cert), shared_(cert), total_(candidates.size()) {
  auto leaves = shared_.leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i].bound == 0) {
      empty_ = true;
      return;
    }
    leaves[i].bound -= 1;
    if (leaves[i].kind == Certificate::Kind::Random && order_leaf_ < 0) order_leaf_ = static_cast<int>(i);
  }
  if (order_leaf_ < 0) return;
  // Weighted permutation without replacement: sort by log(u)/w, largest first.
  std::uint64_t state = cert.leaves()[static_cast<std::size_t>(order_leaf_)].state;
  std::vector<std::pair<double, std::uint32_t>> keys;
  keys.reserve(total_);
  for (std::uint32_t i = 0; i < total_; ++i) {
    double u = unit_interval(split_state(state, 1000 + i));
    keys.emplace_back(std::log(u) / candidates[i].weight, i);
  }
  std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  order_.reserve(total_);
  for (const auto& k : keys) order_.push_back(k.second);
}

bool UnfoldPlan::next(std::size_t& index, Certificate& continuation) {
  if (empty_ || pos_ >= total_) return false;
  index = order_leaf_ < 0 ? pos_ : order_[pos_];
  continuation = shared_;
  if (order_leaf_ >= 0) {
    auto out = continuation.leaves();
    auto in = cert_.leaves();
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i].kind == Certificate::Kind::Random) out[i].state = split_state(in[i].state, 2000 + pos_);
    }
  }
  ++pos_;
  return true;
}

std::vector<std::pair<std::size_t, Certificate>> unfold_expert(const Certificate& cert,
                                                               std::span<const Clause> candidates) {
  std::vector<std::pair<std::size_t, Certificate>> out;
  UnfoldPlan plan(cert, candidates);
  std::size_t i = 0;
  Certificate c;
  while (plan.next(i, c)) out.emplace_back(i, c);
  return out;
}

}  // namespace linpbt
