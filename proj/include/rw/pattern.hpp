#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rw/error.hpp"
#include "rw/term.hpp"

namespace rw {

class Pattern;
struct PatternNode;

// $x[y1 ... yk]; an anonymous PatVar is the wildcard `_`.
struct PatVar {
  std::optional<Name> name;
  std::vector<Var> args;
};

// f p1 ... pn, possibly a partial application.
struct PatSymb;
// λy, p
struct PatAbst;

class Pattern {
public:
  static Pattern wildcard();
  static Pattern var(Name name, std::vector<Var> args = {});
  static Pattern var(std::string_view name, std::vector<Var> args = {}) { return var(Name(name), std::move(args)); }
  static Pattern symb(Symbol s, std::vector<Pattern> args = {});
  static Pattern symb(std::string_view s, std::vector<Pattern> args = {}) { return symb(Symbol(s), std::move(args)); }
  static Pattern abst(const Var& binder, Pattern body);

  const PatVar* as_var() const;
  const PatSymb* as_symb() const;
  const PatAbst* as_abst() const;

  bool is_wildcard() const;
  // Symbol application or abstraction: something a switch can branch on.
  bool has_head() const { return !as_var(); }

  std::size_t size() const;

  // Structural equality; binders and bound-variable arguments compare by identity.
  bool operator==(const Pattern& o) const;

private:
  explicit Pattern(std::shared_ptr<const PatternNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const PatternNode> node_;
};

struct PatSymb {
  Symbol symbol;
  std::vector<Pattern> args;
};

struct PatAbst {
  Var binder;
  Pattern body;
};

struct PatternNode {
  std::variant<PatVar, PatSymb, PatAbst> data;
};

struct Rule {
  Symbol head;
  std::vector<Pattern> lhs_args;
  Term rhs;
  std::string label;

  std::size_t arity() const { return lhs_args.size(); }
};

// Witness of a successful match: the value of a pattern variable is the
// abstraction of `body` over `formals`.
struct Closure {
  std::vector<VarId> formals;
  Term body;
};

using Substitution = std::map<Name, Closure>;

// Empty result means the rule is well formed.
std::vector<Violation> validate_rule(const Rule& rule);
// Throws ValidationError listing every violation.
void require_valid(const Rule& rule);

// Plug-in points for matching modulo the calculus. `whnf` is applied to a
// subject before its head is inspected; `normalize` is applied before
// occurrence checks and non-linearity comparisons. Both default to identity,
// which yields purely syntactic (α) matching.
struct MatchHooks {
  std::function<Term(const Term&)> whnf;
  std::function<Term(const Term&)> normalize;
};

// Declarative matching p⃗ ≼_V t⃗. `bound` is the initial set V.
std::optional<Substitution> match_patterns(std::span<const Pattern> patterns, std::span<const Term> terms,
                                           const VarSet& bound = {}, const MatchHooks& hooks = {});

// Equality of two closures of the same arity, formals identified pointwise.
bool closures_equal(const Closure& a, const Closure& b, const MatchHooks& hooks);

// Replaces each $x[u⃗] in rhs by σ(x) applied to u⃗. Binders of rhs are
// renamed freshly so repeated instantiations never share binder identities.
Term apply_subst(const Substitution& sigma, const Term& rhs);
Term apply_subst(std::span<const std::pair<Name, Closure>> sigma, const Term& rhs);

struct NaiveMatch {
  const Rule* rule;
  Term result;
};

// First rule (in the given order) whose lhs matches a prefix of args; the
// instantiated rhs is applied to the unmatched suffix.
std::optional<NaiveMatch> naive_rewrite_head(std::span<const Rule> rules, Symbol head, std::span<const Term> args,
                                             const MatchHooks& hooks = {});

// Every applicable rule, in order. Used as the reference when checking the
// decision-tree engine.
std::vector<NaiveMatch> naive_all_matches(std::span<const Rule> rules, Symbol head, std::span<const Term> args,
                                          const MatchHooks& hooks = {});

}  // namespace rw
