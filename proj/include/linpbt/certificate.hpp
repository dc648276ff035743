#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linpbt/syntax.hpp"

namespace linpbt {

// Proof certificate: a Height, Size or Random leaf, or a Pair of certificates.
// Stored flat: up to kMaxLeaves leaves plus a prefix-encoded shape.
class Certificate {
 public:
  enum class Kind : std::uint8_t { Height, Size, Random, Pair };

  struct Leaf {
    Kind kind = Kind::Height;
    std::uint32_t bound = 0;  // height, size allowance, or random guard
    std::uint64_t state = 0;  // random stream state
    friend bool operator==(const Leaf&, const Leaf&) = default;
  };

  static constexpr std::size_t kMaxLeaves = 4;
  static constexpr std::uint32_t kDefaultGuard = 20;

  Certificate() : count_(1), shape_len_(1) {}
  static Certificate height(std::uint32_t n);
  static Certificate size(std::uint32_t n);
  static Certificate random(std::uint64_t seed, std::uint32_t guard = kDefaultGuard);
  static Certificate pair(const Certificate& a, const Certificate& b);
  // height:N | size:N | random:seed=S,guard=G | pair(C1,C2)
  static Certificate parse(std::string_view text);

  Kind kind() const { return shape_[0] < 0 ? Kind::Pair : leaves_[0].kind; }
  // Root leaf data; only for non-pair certificates.
  std::uint32_t bound() const { return leaves_[0].bound; }
  std::uint64_t state() const { return leaves_[0].state; }
  Certificate left() const;
  Certificate right() const;

  std::span<const Leaf> leaves() const { return {leaves_.data(), count_}; }
  std::span<Leaf> leaves() { return {leaves_.data(), count_}; }
  bool has(Kind k) const;
  // Same shape, leaf values replaced.
  Certificate with_leaves(std::span<const Leaf> ls) const;
  // Every Random leaf reseeded from seed (leaf i gets a distinct stream).
  Certificate reseeded(std::uint64_t seed) const;

  std::string to_string() const;
  friend bool operator==(const Certificate& a, const Certificate& b);

 private:
  std::string render(std::size_t& shape_pos, std::size_t& leaf_pos) const;
  std::size_t subtree_end(std::size_t shape_pos) const;
  Certificate sub(std::size_t shape_begin) const;

  std::array<Leaf, kMaxLeaves> leaves_{};
  // Prefix encoding: -1 is a pair node, otherwise a leaf marker.
  std::array<std::int8_t, 2 * kMaxLeaves - 1> shape_{};
  std::uint8_t count_ = 0;
  std::uint8_t shape_len_ = 0;
};

// Rules that consult an expert. BangInit is the init rule on a persistent slot.
enum class Rule : std::uint8_t { With, One, Tensor, Erase, Lolli, Bang, Init, BangInit, Unfold };

const char* rule_name(Rule r);

// Continuation certificates granted by an expert.
struct ExpertOutcome {
  bool accepted = false;
  Certificate first;   // sole or left premise
  Certificate second;  // right premise of x and &
  // Leaves of `second` that are threaded from the left premise's residual (Size under x).
  std::uint8_t threaded = 0;

  Certificate second_after(const Certificate& first_residual) const;
};

ExpertOutcome expert(Rule rule, const Certificate& cert);

// Residual for a conclusion: Size leaves from the premise residual, other leaves from the input.
Certificate conclude(const Certificate& input, const Certificate& premise_residual);

// & with Size: both premises must leave the same residual; returns the joint residual.
std::optional<Certificate> join_with(const Certificate& input, const Certificate& r1, const Certificate& r2);

// Clause candidates for unfolding an atom, in expert order, with continuation certificates.
class UnfoldPlan {
 public:
  UnfoldPlan(const Certificate& cert, std::span<const Clause> candidates);
  // Next candidate index into the span, or false when exhausted.
  bool next(std::size_t& index, Certificate& continuation);
  bool empty() const { return empty_; }

 private:
  Certificate cert_;
  Certificate shared_;  // continuation for deterministic orders
  std::size_t total_ = 0;
  std::size_t pos_ = 0;
  bool empty_ = false;
  int order_leaf_ = -1;  // first Random leaf, if any
  std::vector<std::uint32_t> order_;
};

// Materialised view of an UnfoldPlan, convenient for tests.
std::vector<std::pair<std::size_t, Certificate>> unfold_expert(const Certificate& cert,
                                                               std::span<const Clause> candidates);

// Deterministic 64-bit mixing used for random streams.
std::uint64_t mix64(std::uint64_t x);
// Uniform double in [0, 1) from a state.
double unit_interval(std::uint64_t state);

}  // namespace linpbt
