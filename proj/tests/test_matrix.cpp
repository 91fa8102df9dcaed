#include <doctest.h>

#include "support/build.hpp"
#include "rw/matrix.hpp"

using namespace rw;
using namespace rw::testing;

namespace {

const char* kConstrained =
    "symbol f; symbol a; symbol b; symbol 0; symbol 1; symbol 2;\n"
    "rule f a (λx, λy, $g[x]) ↪ 0\n"
    "with f $x $x ↪ 1\n"
    "with f a b ↪ 2;\n";

ClauseRow row(std::vector<Pattern> ps, std::string_view rhs, std::size_t index) {
  return ClauseRow{std::move(ps), {}, {}, {}, Term::symb(rhs), std::string(rhs), index};
}

std::vector<std::size_t> rule_indices(const ClauseMatrix& m) {
  std::vector<std::size_t> out;
  for (const auto& r : m.rows) out.push_back(r.rule_index);
  return out;
}

// Four rows over r/0, r/1, q/0 and f/1 used to exercise the decomposition operators.
struct Decomposition {
  Var x = fresh_var("x");
  Var x2 = fresh_var("x");
  ClauseMatrix m;

  Decomposition() {
    const auto r = [](std::vector<Pattern> args = {}) { return Pattern::symb("r", std::move(args)); };
    m.width = 2;
    m.rows.push_back(row({r({Pattern::var("x")}), Pattern::symb("q")}, "r1", 1));
    m.rows.push_back(row({r(), Pattern::symb("f", {Pattern::var("x")})}, "r2", 2));
    m.rows.push_back(row({Pattern::var("x"), r()}, "r3", 3));
    m.rows.push_back(row({Pattern::abst(x, Pattern::var("x", {x})), Pattern::abst(x2, r())}, "r4", 4));
  }
};

}  // namespace

TEST_CASE("from_rules encodes closedness and non-linearity constraints") {
  const auto rs = rules_of(kConstrained);
  const ClauseMatrix m = from_rules(Symbol("f"), rs);
  REQUIRE(m.rows.size() == 3);
  CHECK(m.width == 2);

  const auto& pat = rs[0].lhs_args[1].as_abst();
  REQUIRE(pat);
  const VarId x = pat->binder.id;

  const auto& r1 = m.rows[0];
  REQUIRE(r1.cl.size() == 1);
  CHECK(r1.cl[0].pos == Position{2, 1, 1});
  CHECK(r1.cl[0].allowed == std::vector<VarId>{x});
  CHECK(r1.cl[0].allowed_binders == std::vector<Position>{Position{2}});
  CHECK(r1.nl.empty());

  const auto& r2 = m.rows[1];
  CHECK(r2.cl.empty());
  REQUIRE(r2.nl.size() == 1);
  CHECK(r2.nl[0] == NlConstraint(Position{1}, Position{2}));

  CHECK(m.rows[2].unconstrained());

  // Pattern variables are erased to wildcards.
  CHECK(m.rows[1].all_wildcards());
  CHECK(m.rows[0].patterns[1] == Pattern::abst(pat->binder, Pattern::abst(pat->body.as_abst()->binder, Pattern::wildcard())));
}

TEST_CASE("from_rules records where rhs variables are found") {
  const auto ex1 = rules_of("symbol a; symbol b; symbol c; symbol e; symbol f;"
                            "rule f (c (c $x)) a --> $x with f $x b --> $x;");
  const ClauseMatrix m = from_rules(Symbol("f"), ex1);
  REQUIRE(m.rows.size() == 2);
  for (const auto& r : m.rows) CHECK(r.unconstrained());
  REQUIRE(m.rows[0].env.size() == 1);
  CHECK(m.rows[0].env[0].first == Name("x"));
  CHECK(m.rows[0].env[0].second.pos == Position{1, 1, 1});
  REQUIRE(m.rows[1].env.size() == 1);
  CHECK(m.rows[1].env[0].second.pos == Position{1});

  const auto plus = rules_of("symbol 0; symbol +; rule + 0 $m --> $m;");
  const ClauseMatrix p = from_rules(Symbol("+"), plus);
  REQUIRE(p.rows[0].env.size() == 1);
  CHECK(p.rows[0].env[0].second.pos == Position{2});
}

TEST_CASE("from_rules rejects mixed heads and arities") {
  const auto rs = rules_of("symbol f; symbol g; symbol a; rule f a --> a with f a a --> a with g a --> a;");
  CHECK_THROWS_AS(from_rules(Symbol("f"), std::span(rs).first(2)), std::invalid_argument);
  CHECK_THROWS_AS(from_rules(Symbol("f"), std::span(rs).subspan(2)), std::invalid_argument);
  CHECK(from_rules(Symbol("f"), std::span<const Rule>{}).empty());
}

TEST_CASE("specialise keeps rows whose first column admits the symbol at that arity") {
  const Decomposition d;
  const ClauseMatrix s = specialise(Symbol("r"), 1, d.m);
  CHECK(s.width == 2);
  REQUIRE(s.rows.size() == 2);
  CHECK(s.rows[0].patterns == std::vector<Pattern>{Pattern::var("x"), Pattern::symb("q")});
  CHECK(s.rows[1].patterns == std::vector<Pattern>{Pattern::wildcard(), Pattern::symb("r")});
  CHECK(rule_indices(s) == std::vector<std::size_t>{1, 3});

  const ClauseMatrix s0 = specialise(Symbol("r"), 0, d.m);
  CHECK(s0.width == 1);
  CHECK(rule_indices(s0) == std::vector<std::size_t>{2, 3});
}

TEST_CASE("spec_lambda opens abstractions and keeps variable rows") {
  const Decomposition d;
  const ClauseMatrix l = spec_lambda(d.m);
  CHECK(l.width == 2);
  REQUIRE(l.rows.size() == 2);
  CHECK(l.rows[0].patterns == std::vector<Pattern>{Pattern::wildcard(), Pattern::symb("r")});
  CHECK(l.rows[1].patterns == std::vector<Pattern>{Pattern::var("x", {d.x}), Pattern::abst(d.x2, Pattern::symb("r"))});
  CHECK(rule_indices(l) == std::vector<std::size_t>{3, 4});
}

TEST_CASE("spec_default keeps only variable rows") {
  const Decomposition d;
  const ClauseMatrix df = spec_default(d.m);
  CHECK(df.width == 1);
  REQUIRE(df.rows.size() == 1);
  CHECK(df.rows[0].patterns == std::vector<Pattern>{Pattern::symb("r")});
  CHECK(rule_indices(df) == std::vector<std::size_t>{3});
}

TEST_CASE("decomposition of an empty matrix is empty") {
  const ClauseMatrix empty{{}, 2};
  CHECK(specialise(Symbol("r"), 1, empty).empty());
  CHECK(spec_lambda(empty).empty());
  CHECK(spec_default(empty).empty());
}

TEST_CASE("spec_lambda carries closedness constraints along") {
  const auto rs = rules_of("symbol diff; symbol 0; rule diff (λx, $v) ↪ λx, 0;");
  const ClauseMatrix m = from_rules(Symbol("diff"), rs);
  REQUIRE(m.rows[0].cl.size() == 1);
  const ClauseMatrix l = spec_lambda(m);
  REQUIRE(l.rows.size() == 1);
  CHECK(l.rows[0].cl == m.rows[0].cl);
  CHECK(l.rows[0].cl[0].allowed.empty());
}

TEST_CASE("cond_succ discharges a constraint and cond_fail drops the rows that need it") {
  const ClauseMatrix m = from_rules(Symbol("f"), rules_of(kConstrained));
  const ConstraintKey nl = m.rows[1].nl[0];
  const ConstraintKey cl = m.rows[0].cl[0];

  const ClauseMatrix ns = cond_succ(nl, m);
  CHECK(ns.rows.size() == 3);
  CHECK(ns.rows[1].nl.empty());
  CHECK(ns.rows[0].cl.size() == 1);
  CHECK(rule_indices(cond_fail(nl, m)) == std::vector<std::size_t>{0, 2});

  const ClauseMatrix cs = cond_succ(cl, m);
  CHECK(cs.rows[0].cl.empty());
  CHECK(cs.rows[1].nl.size() == 1);
  CHECK(rule_indices(cond_fail(cl, m)) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("swap_columns exchanges the first column with another") {
  const Decomposition d;
  const ClauseMatrix s = swap_columns(d.m, 2);
  CHECK(s.rows[0].patterns[0] == Pattern::symb("q"));
  CHECK(swap_columns(s, 2).rows[0].patterns == d.m.rows[0].patterns);
  CHECK_THROWS_AS(swap_columns(d.m, 3), std::out_of_range);
}

TEST_CASE("NlConstraint is stored in a canonical order") {
  CHECK(NlConstraint(Position{2}, Position{1}) == NlConstraint(Position{1}, Position{2}));
  const NlConstraint c(Position{3}, Position{1, 1});
  CHECK(c.a == Position{1, 1});
  CHECK(c.b == Position{3});
}
