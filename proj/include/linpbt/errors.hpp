#pragma once

#include <stdexcept>
#include <string>

namespace linpbt {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Arithmetic or comparison builtin called with an unbound input.
class InstantiationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The goal to be solved is an unbound variable.
class Floundering : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A goal that does not view as any connective or atom.
class IllFormedGoal : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Negation-as-failure asked to refute a non-ground goal.
class UnsoundNegation : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigurationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ReplayMismatch : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace linpbt
