#pragma once
// Independent oracles and fixtures shared by the unit tests and the acceptance binary.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "linpbt/certificate.hpp"
#include "linpbt/corpus.hpp"
#include "linpbt/kernel.hpp"
#include "linpbt/term.hpp"

namespace support {

// Thaws a named context of the spec into the store.
linpbt::ResourceContext context_of(const linpbt::Spec& spec, const std::string& name, linpbt::Store& store);

// True iff the goal has a closed proof in the context under the certificate.
bool provable(const linpbt::Program& program, const std::string& context, const std::string& goal,
              const linpbt::Certificate& cert);

// ---- propositional linear logic, eager context splitting

// Atoms 0..2 are a b c (usable as resources); 3..6 are p q r s, defined by io_program().
struct IoGoal {
  enum Kind { Atom, One, Erase, Tensor, With, Limp, Bang } kind = One;
  int atom = 0;
  int left = -1;
  int right = -1;
};

struct IoInstance {
  std::vector<IoGoal> nodes;  // root is the last node
  std::array<int, 7> linear{};
  std::array<bool, 7> persistent{};
  unsigned height = 3;

  std::string goal_text() const;
  std::string context_text() const;
};

const char* io_program_text();
IoInstance random_io_instance(std::mt19937_64& rng, unsigned max_depth, unsigned max_linear);
// Uniform provability by trying every split of the linear multiset.
bool io_reference(const IoInstance& inst);

// ---- implicational intuitionistic logic, direct sequent rules

struct Formula {
  int atom = -1;  // 0 = a, 1 = b; -1 for an implication
  int left = -1;
  int right = -1;
};

class FormulaPool {
 public:
  int atom(int a);
  int imp(int l, int r);
  const Formula& operator[](int i) const { return nodes_[i]; }
  std::string text(int f) const;     // imp(a,b)
  std::string pretty(int f) const;   // a => b
  // All formulas over {a, b} with exactly n implications.
  std::vector<int> with_imps(int n);
  // Contraction-free decision procedure.
  bool provable(int goal);

 private:
  bool prove(std::vector<int> gamma, int goal);
  std::vector<Formula> nodes_;
  std::map<std::array<int, 3>, int> index_;
  std::map<std::pair<std::vector<int>, int>, bool> memo_;
};

// ---- IMP reference interpreter over parsed terms

struct ImpValue {
  bool is_int = true;
  std::int64_t i = 0;
  bool b = false;
  friend bool operator==(const ImpValue&, const ImpValue&) = default;
};

using ImpState = std::map<std::string, ImpValue>;

ImpState sigma0();
std::optional<ImpValue> imp_eval(const linpbt::Store& store, linpbt::Term e, const ImpState& s);
// Nullopt when evaluation gets stuck or the fuel runs out.
std::optional<ImpState> imp_exec(const linpbt::Store& store, linpbt::Term c, ImpState s, unsigned& fuel);
// vi(3) / vb(tt)
std::string value_text(const ImpValue& v);
// [w = vi(0), x = vb(tt), y = vb(ff)]
std::string state_text(const ImpState& s);

// Every expression over the IMP constructors with exactly n nodes.
std::vector<std::string> imp_expressions(int n);

// Solutions of a closed generator query, rendered as re-parseable text.
std::vector<std::string> enumerate(const linpbt::Spec& spec, const std::string& goal, const std::string& out_var,
                                   const std::string& context, const linpbt::Certificate& cert);

// ---- the kernel rule suite

struct RuleCase {
  linpbt::Rule rule;
  bool positive;
  const char* program;
  const char* context;
  const char* goal;
  const char* cert;
};

inline void PrintTo(const RuleCase& c, std::ostream* os) {
  *os << "[" << c.context << "] |- " << c.goal << " @ " << c.cert;
}

const std::vector<RuleCase>& rule_cases();
bool run_rule_case(const RuleCase& c);

}  // namespace support
