#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rw/pattern.hpp"
#include "rw/term.hpp"

namespace rw {

struct SymbolDecl {
  Symbol symbol;
  std::optional<Term> type;  // parsed and kept, never checked
  int line = 0;
};

struct RuleBlock {
  std::vector<Rule> rules;
  int line = 0;
};

struct Compute {
  Term term;
  int line = 0;
};

struct Assert {
  Term lhs;
  Term rhs;
  int line = 0;
};

using Item = std::variant<SymbolDecl, RuleBlock, Compute, Assert>;

struct SourceFile {
  std::vector<Item> items;

  // Every rule of every block, in file order.
  std::vector<Rule> rules() const;
  std::set<Symbol> symbols() const;
};

// Symbols visible to parse_term. With `implicit_symbols`, any identifier that
// is not λ-bound is taken to be a symbol instead of raising a scope error.
struct Scope {
  std::set<Symbol> symbols;
  bool implicit_symbols = false;
};

// Throws ParseError, ScopeError, or ValidationError for ill-formed rules.
SourceFile parse_file(std::string_view text);
Term parse_term(std::string_view text, const Scope& scope);

struct PrintOptions {
  bool unicode = false;
};

std::string print_term(const Term& t, PrintOptions opts = {});
std::string print_pattern(const Pattern& p, PrintOptions opts = {});
std::string print_rule(const Rule& r, PrintOptions opts = {});

}  // namespace rw
