#include <doctest.h>

#include <random>

#include "support/build.hpp"
#include "rw/term.hpp"

using namespace rw;
using namespace rw::testing;

namespace {

// Random term over symbols f/2, a, b and the variables in `scope`.
Term random_term(std::mt19937_64& rng, int depth, std::vector<Var>& scope, const std::vector<Var>& free) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 2);
  switch (pick(rng)) {
    case 0:
      return Term::symb(rng() % 2 ? "a" : "b");
    case 1:
    case 2: {
      std::vector<Var> pool = scope;
      pool.insert(pool.end(), free.begin(), free.end());
      if (pool.empty()) return Term::symb("a");
      return Term::var(pool[rng() % pool.size()]);
    }
    case 3:
      return Term::apps(Term::symb("f"), {random_term(rng, depth - 1, scope, free), random_term(rng, depth - 1, scope, free)});
    case 4: {
      const Var y = fresh_var("y");
      scope.push_back(y);
      Term body = random_term(rng, depth - 1, scope, free);
      scope.pop_back();
      return Term::abst(y, std::nullopt, body);
    }
    default:
      return Term::app(random_term(rng, depth - 1, scope, free), random_term(rng, depth - 1, scope, free));
  }
}

// Copy of `t` with every binder replaced by a fresh one.
Term rename_binders(const Term& t) {
  if (const auto* a = t.as_app()) return Term::app(rename_binders(a->fun), rename_binders(a->arg));
  if (const auto* l = t.as_abst()) {
    const Var y = fresh_var(l->binder.name);
    return Term::abst(y, std::nullopt, rename_binders(subst(l->body, {{l->binder.id, Term::var(y)}})));
  }
  return t;
}

}  // namespace

TEST_CASE("free_vars ignores bound occurrences") {
  const Var x = fresh_var("x"), y = fresh_var("y");
  const Term t = Term::apps(Term::symb("f"), {Term::var(x), Term::abst(y, std::nullopt, Term::var(y))});
  CHECK(free_vars(t) == VarSet{x.id});
  CHECK(occurs_free(x.id, t));
  CHECK_FALSE(occurs_free(y.id, t));
  CHECK(free_vars(term("\\z, f z z")).empty());
}

TEST_CASE("subst replaces free occurrences and avoids capture") {
  const Var x = fresh_var("x"), y = fresh_var("y");
  const Term t = Term::abst(y, std::nullopt, Term::app(Term::var(x), Term::var(y)));
  const Term r = subst(t, {{x.id, Term::var(y)}});
  const auto* a = r.as_abst();
  REQUIRE(a);
  CHECK_FALSE(a->binder == y);
  // λy', y y'
  const Var z = fresh_var("z");
  CHECK(alpha_eq(r, Term::abst(z, std::nullopt, Term::app(Term::var(y), Term::var(z)))));
  CHECK_FALSE(alpha_eq(r, Term::abst(y, std::nullopt, Term::app(Term::var(y), Term::var(y)))));

  // Bound occurrences of the substituted variable are untouched.
  const Term u = Term::abst(x, std::nullopt, Term::var(x));
  CHECK(alpha_eq(subst(u, {{x.id, Term::symb("a")}}), u));
}

TEST_CASE("alpha_eq identifies terms up to binder renaming") {
  CHECK(alpha_eq(term("\\x, \\y, f x y"), term("\\u, \\v, f u v")));
  CHECK_FALSE(alpha_eq(term("\\x, \\y, f x y"), term("\\u, \\v, f v u")));
  CHECK_FALSE(alpha_eq(term("f a"), term("f b")));
  const Var x = fresh_var("x"), y = fresh_var("y");
  CHECK_FALSE(alpha_eq(Term::var(x), Term::var(y)));
  CHECK(alpha_eq(Term::var(x), Term::var(x)));
}

TEST_CASE("positions address spine arguments, abstraction bodies and product parts") {
  const Term t = term("f (c (c e)) b");
  CHECK(show(subterm_at(t, Position{1})) == "c (c e)");
  CHECK(show(subterm_at(t, Position{1, 1, 1})) == "e");
  CHECK(show(subterm_at(t, Position{2})) == "b");
  CHECK(show(subterm_at(t, Position{})) == "f (c (c e)) b");
  CHECK_THROWS_AS(subterm_at(t, Position{3}), PositionError);

  const std::vector<Term> ts{term("a"), term("\\x, g x")};
  CHECK(show(subterm_at(ts, Position{2, 1, 1})) == show(subterm_at(term("\\x, g x"), Position{1, 1})));

  const auto ps = positions(t);
  CHECK(ps == std::set<Position>{Position{}, Position{1}, Position{1, 1}, Position{1, 1, 1}, Position{2}});
}

TEST_CASE("Position rendering and prefix order") {
  CHECK(Position{}.to_string() == "ε");
  CHECK(Position{2, 1, 1}.to_string() == "2.1.1");
  CHECK(Position{2}.is_prefix_of(Position{2, 1}));
  CHECK_FALSE(Position{2, 1}.is_prefix_of(Position{2}));
  CHECK(Position{2}.child(1) == Position{2, 1});
}

TEST_CASE("term_size counts nodes") {
  CHECK(term_size(term("a")) == 1);
  CHECK(term_size(term("f a")) == 3);
}

TEST_CASE("property: alpha_hash is compatible with alpha_eq") {
  std::mt19937_64 rng(11);
  const std::vector<Var> free{fresh_var("p"), fresh_var("q")};
  for (int i = 0; i < 300; ++i) {
    std::vector<Var> scope;
    const Term t = random_term(rng, 4, scope, free);
    const Term u = rename_binders(t);
    CHECK(alpha_eq(t, u));
    CHECK(alpha_hash(t) == alpha_hash(u));
    std::vector<Var> scope2;
    const Term v = random_term(rng, 4, scope2, free);
    if (alpha_eq(t, v)) CHECK(alpha_hash(t) == alpha_hash(v));
  }
}

TEST_CASE("property: substituting a variable that is not free is the identity up to alpha") {
  std::mt19937_64 rng(12);
  const Var p = fresh_var("p"), q = fresh_var("q");
  for (int i = 0; i < 300; ++i) {
    std::vector<Var> scope;
    const Term t = random_term(rng, 4, scope, {p});
    CHECK(alpha_eq(subst(t, {{q.id, term("f a b")}}), t));
    CHECK(free_vars(subst(t, {{p.id, term("a")}})).empty());
  }
}
