#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rw/pattern.hpp"
#include "rw/term.hpp"

namespace rw {

// Binders of a pattern variable are recorded twice: as the rule's own binder
// identities (for display) and as the positions of the abstractions that
// introduce them. The positions are rule-independent, so two rows imposing the
// same condition share one constraint key.

// Repeated pattern variable: the terms at `a` and `b` must be equal once each
// is abstracted over its own formals. Stored with (a, formals_a) <= (b, formals_b).
struct NlConstraint {
  NlConstraint(Position a, Position b, std::vector<Position> formals_a = {}, std::vector<Position> formals_b = {});

  Position a;
  Position b;
  std::vector<Position> formals_a;
  std::vector<Position> formals_b;

  bool operator==(const NlConstraint&) const = default;
};

// Closedness: free traversed binders of the term at `pos` must be among `allowed`.
struct ClConstraint {
  Position pos;
  std::vector<VarId> allowed;
  std::vector<Position> allowed_binders;

  // Identity is the position plus the binder positions.
  bool operator==(const ClConstraint& o) const { return pos == o.pos && allowed_binders == o.allowed_binders; }
};

using ConstraintKey = std::variant<NlConstraint, ClConstraint>;

// Where the value of a right-hand-side variable lives in the original lhs.
struct EnvBinding {
  Position pos;
  std::vector<VarId> formals;
  std::vector<Position> formal_binders;
};

struct ClauseRow {
  std::vector<Pattern> patterns;
  std::vector<NlConstraint> nl;
  std::vector<ClConstraint> cl;
  std::vector<std::pair<Name, EnvBinding>> env;
  Term rhs;
  std::string source;
  std::size_t rule_index = 0;

  bool unconstrained() const { return nl.empty() && cl.empty(); }
  bool all_wildcards() const;
};

struct ClauseMatrix {
  std::vector<ClauseRow> rows;
  std::size_t width = 0;

  bool empty() const { return rows.empty(); }
};

// All rules must share head and arity (throws std::invalid_argument otherwise).
ClauseMatrix from_rules(Symbol head, std::span<const Rule> rules);

// Decomposition operators on the first column.
ClauseMatrix specialise(Symbol f, std::size_t arity, const ClauseMatrix& m);
ClauseMatrix spec_lambda(const ClauseMatrix& m);
ClauseMatrix spec_default(const ClauseMatrix& m);

ClauseMatrix cond_succ(const ConstraintKey& k, const ClauseMatrix& m);
ClauseMatrix cond_fail(const ConstraintKey& k, const ClauseMatrix& m);

// Exchanges column 1 and column i (1-based).
ClauseMatrix swap_columns(const ClauseMatrix& m, std::size_t i);

}  // namespace rw
