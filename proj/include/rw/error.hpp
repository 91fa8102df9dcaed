#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rw {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A metavariable application showed up where only object-level terms are allowed.
struct RhsOnlyError : Error {
  using Error::Error;
};

struct PositionError : Error {
  using Error::Error;
};

// Broken internal invariant (malformed tree, arity mismatch on the stack...).
struct InternalError : Error {
  using Error::Error;
};

// Step budget exhausted during normalization.
struct DivergenceError : Error {
  explicit DivergenceError(std::size_t budget)
      : Error("step budget of " + std::to_string(budget) + " rewrite steps exhausted"), budget(budget) {}
  std::size_t budget;
};

struct ParseError : Error {
  ParseError(int line, int column, std::vector<std::string> expected, const std::string& found);
  int line;
  int column;
  std::vector<std::string> expected;
};

// Undeclared or redeclared identifier.
struct ScopeError : Error {
  ScopeError(int line, int column, const std::string& message);
  int line;
  int column;
};

struct Violation {
  std::string message;
  std::string where;  // offending pattern variable or position
};

struct ValidationError : Error {
  ValidationError(const std::string& rule_label, std::vector<Violation> violations);
  std::vector<Violation> violations;
};

}  // namespace rw
