#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "linpbt/certificate.hpp"
#include "linpbt/corpus.hpp"
#include "linpbt/term.hpp"

namespace linpbt {

// Deterministic deepening: generator stages are run under each certificate
// in turn. An empty schedule derives 1..N from the generator's own bound.
struct Exhaustive {
  std::vector<Certificate> schedule;
};

// Each trial draws the first generator solution under the generation
// certificate reseeded for that trial. Without a generation certificate the
// generator's own bound is paired with a random stream.
struct Randomized {
  std::uint32_t trials = 100;
  std::uint64_t seed = 0;
  std::optional<Certificate> generation;
};

using Strategy = std::variant<Exhaustive, Randomized>;

struct RunOptions {
  // Step budget for each candidate's test stages; 0 means unbounded.
  std::uint64_t step_limit = 0;
  std::ostream* trace = nullptr;
};

struct RunStats {
  std::uint64_t generated = 0;
  std::uint64_t tested = 0;      // conclusions evaluated
  std::uint64_t inconclusive = 0;  // candidates whose tests ran out of budget
  std::uint64_t steps = 0;
  double seconds = 0;
};

struct WitnessBinding {
  std::string name;
  std::string text;  // printed with the spec's domain printers
  Frozen value;
  bool generated = false;  // bound by a generator stage
};

struct CexReport {
  std::string property;
  std::vector<WitnessBinding> witness;
  std::string certificate;  // generation certificate at which it was found
  RunStats stats;

  const WitnessBinding* binding(std::string_view name) const;
  // "F = a => b" lines joined by ", "
  std::string summary() const;
};

struct Outcome {
  bool passed = true;
  RunStats stats;
  std::optional<CexReport> cex;
};

// Runs generators, then preconditions, then tests the conclusion of every
// candidate; stops at the first violation.
Outcome run_property(const Spec& spec, const PropertyDecl& property, const Strategy& strategy,
                     const RunOptions& options = {});

// True iff the recorded witness still violates the property under the recorded
// certificate. Throws ReplayMismatch for a report from another property or an
// incompatible program.
bool replay(const Spec& spec, const PropertyDecl& property, const CexReport& report);

// Certificate declared on the first generator stage; throws ConfigurationError if absent.
Certificate generation_certificate(const PropertyDecl& property);

}  // namespace linpbt
