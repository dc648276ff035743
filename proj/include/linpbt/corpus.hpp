#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linpbt/syntax.hpp"

namespace linpbt {

// A loaded specification: the program under test, the program run by the
// vanilla engine, property and context declarations, and domain printers.
struct Spec {
  std::string name;
  Program program;
  Program reference;
  std::vector<PropertyDecl> properties;
  std::map<std::string, ContextDecl> contexts;
  std::vector<DomainPrinter> printers;

  const PropertyDecl* property(std::string_view name) const;
  Printer printer(const Store* store) const;
};

struct MutantEdit {
  enum class Op { Remove, Add, Anchor } op;
  Clause clause;
  // Index in the clause's definition at the moment the edit applies.
  std::size_t position = 0;
};

struct Mutant {
  std::string id;
  std::string target;  // eval | exec | type
  std::string description;
  std::vector<MutantEdit> edits;
};

namespace corpus {

// Bundled spec names: ljf, imp_linear, imp_vanilla, stack_machine.
const std::vector<std::string>& spec_names();

// Raw text of a bundled resource (e.g. "ljf", "mutants"); empty if unknown.
std::string_view resource(std::string_view name);

// Loads a bundled spec, or the files of the same name from dir when given.
// imp_linear and stack_machine share one program (IMP plus the stack machine)
// and use imp_vanilla as their reference.
Spec load_spec(std::string_view name, const std::optional<std::filesystem::path>& dir = std::nullopt);
// A user-supplied file; it serves as its own reference program.
Spec load_spec_file(const std::filesystem::path& path);

// Edit positions are resolved against base; a mismatch is a ConfigurationError.
std::vector<Mutant> parse_mutants(std::string_view text, const Program& base);
// The bundled registry, resolved against the bundled imp_linear program.
const std::vector<Mutant>& mutants();
const Mutant& mutant(std::string_view id);

// Throws ConfigurationError when the program does not have the clauses the mutant expects.
Program apply_mutant(const Program& p, const Mutant& m);
Program revert_mutant(const Program& mutated, const Mutant& m);

// IMP syntax: `w := 0 - 1`, `if x = x then {w := 0} else {w := 1}`; values print bare.
DomainPrinter imp_printer();
// LJF formulas: imp(a,b) as `a => b`, nested implications parenthesised.
DomainPrinter ljf_printer();

}  // namespace corpus

}  // namespace linpbt
