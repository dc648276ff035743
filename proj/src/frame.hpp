#pragma once

#include <algorithm>
#include <array>
#include <span>
#include <vector>

#include "linpbt/term.hpp"

namespace linpbt::detail {

// Clause-variable frame reused across unfolding candidates.
class Frame {
 public:
  std::span<Term> reset(std::uint32_t n) {
    if (n > small_.size()) {
      large_.assign(n, Term());
      return large_;
    }
    std::fill_n(small_.begin(), n, Term());
    return {small_.data(), n};
  }

 private:
  std::array<Term, 24> small_{};
  std::vector<Term> large_;
};

}  // namespace linpbt::detail
