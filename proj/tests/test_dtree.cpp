#include <doctest.h>

#include <random>

#include "support/build.hpp"
#include "support/oracle.hpp"
#include "rw/dtree.hpp"

using namespace rw;
using namespace rw::testing;

namespace {

const char* kExample1 =
    "symbol a; symbol b; symbol c; symbol e; symbol f;\n"
    "rule f (c (c $x)) a --> $x with f $x b --> $x;\n";

DecisionTree tree_of(std::string_view text, Symbol head, std::size_t arity,
                     Heuristic h = Heuristic::MaxConstructors) {
  const auto trees = trees_of_ruleset(rules_of(text), h);
  return trees.at(HeadKey{head, arity});
}

DecisionTree example1_golden() {
  const Term x = Term::meta(Name("x"));
  const auto c1 = [](DecisionTree child) { return make_switch({SymbolCase{Symbol("c"), 1, std::move(child)}}); };
  return make_swap(2, make_switch({SymbolCase{Symbol("a"), 0, c1(c1(make_leaf(x)))},
                                   SymbolCase{Symbol("b"), 0, make_leaf(x)}}));
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

// Every slot read by a node was filled by a Store above it, and every formal
// index refers to a binder opened above it.
void check_slots(const DecisionTree& t, std::size_t stores, std::size_t binders) {
  const auto ok_ref = [&](const SlotRef& r) {
    CHECK(r.slot < stores);
    for (auto f : r.formals) CHECK(f < binders);
  };
  if (const auto* l = t.as_leaf()) {
    for (const auto& [name, ref] : l->env) ok_ref(ref);
  } else if (const auto* s = t.as_swap()) {
    check_slots(s->child, stores, binders);
  } else if (const auto* s = t.as_store()) {
    check_slots(s->child, stores + 1, binders);
  } else if (const auto* sw = t.as_switch()) {
    for (const auto& c : sw->cases) check_slots(c.child, stores, binders);
    if (sw->abst) check_slots(*sw->abst, stores, binders + 1);
    if (sw->fallback) check_slots(*sw->fallback, stores, binders);
  } else if (const auto* n = t.as_bin_nl()) {
    ok_ref(n->left);
    ok_ref(n->right);
    check_slots(n->succ, stores, binders);
    check_slots(n->fail, stores, binders);
  } else if (const auto* c = t.as_bin_cl()) {
    CHECK(c->slot < stores);
    for (auto a : c->allowed) CHECK(a < binders);
    check_slots(c->succ, stores, binders);
    check_slots(c->fail, stores, binders);
  }
}

}  // namespace

TEST_CASE("an empty matrix compiles to Fail") {
  CHECK(compile(ClauseMatrix{{}, 2}, CompileState::initial(2)).is_fail());
  CHECK(trees_of_ruleset({}).empty());
}

TEST_CASE("Example 1 compiles to the expected tree modulo Store nodes") {
  const DecisionTree t = tree_of(kExample1, Symbol("f"), 2);
  CHECK(same_shape(erase_stores(t), example1_golden()));
  const auto* sw = t.as_swap();
  REQUIRE(sw);
  CHECK(sw->column == 2);
  // $x is stored once on each path to a leaf.
  const auto st = tree_stats(t);
  CHECK(st.stores == 2);
  CHECK(st.leaves == 2);
  CHECK(st.fails == 0);
  CHECK_FALSE(same_shape(t, example1_golden()));
}

TEST_CASE("left-to-right compilation of Example 1 starts with the first column") {
  const DecisionTree lr = tree_of(kExample1, Symbol("f"), 2, Heuristic::LeftRight);
  CHECK_FALSE(lr.as_swap());
  CHECK_FALSE(same_shape(erase_stores(lr), erase_stores(tree_of(kExample1, Symbol("f"), 2))));
}

TEST_CASE("a non-linear rule stores both arguments and compares them") {
  const DecisionTree t = tree_of("symbol eq; symbol true; rule eq $x $x --> true;", Symbol("eq"), 2);
  const auto st = tree_stats(t);
  CHECK(st.stores == 2);
  CHECK(st.bin_nl == 1);
  const DecisionTree* cur = &t;
  while (cur->as_store() || cur->as_swap()) cur = cur->as_store() ? &cur->as_store()->child : &cur->as_swap()->child;
  const auto* nl = cur->as_bin_nl();
  REQUIRE(nl);
  CHECK(nl->left.slot != nl->right.slot);
  REQUIRE(nl->succ.as_leaf());
  CHECK(show(nl->succ.as_leaf()->rhs) == "true");
  CHECK(nl->fail.is_fail());
}

TEST_CASE("a closedness constraint compiles to BinCl under the abstraction case") {
  const DecisionTree t = tree_of("symbol diff; symbol 0; rule diff (λx, $v) ↪ λx, 0;", Symbol("diff"), 1);
  const auto* sw = t.as_switch();
  REQUIRE(sw);
  REQUIRE(sw->abst);
  CHECK(sw->cases.empty());
  CHECK(tree_stats(t).bin_cl == 1);
  check_slots(t, 0, 0);
}

TEST_CASE("choose_action follows the heuristic and row priority") {
  const auto ex1 = from_rules(Symbol("f"), rules_of(kExample1));
  const Action a = choose_action(ex1, CompileState::initial(2));
  REQUIRE(std::holds_alternative<action::SpecializeColumn>(a));
  CHECK(std::get<action::SpecializeColumn>(a).column == 2);
  const Action lr = choose_action(ex1, CompileState::initial(2), Heuristic::LeftRight);
  CHECK(std::get<action::SpecializeColumn>(lr).column == 1);

  ClauseMatrix wild{{ClauseRow{{Pattern::wildcard()}, {}, {}, {}, Term::symb("a"), "w", 0}}, 1};
  const Action y = choose_action(wild, CompileState::initial(1));
  REQUIRE(std::holds_alternative<action::YieldRow>(y));
  CHECK(std::get<action::YieldRow>(y).row == 1);

  const auto eq = from_rules(Symbol("eq"), rules_of("symbol eq; symbol true; rule eq $x $x --> true;"));
  CHECK(std::holds_alternative<action::StoreColumn>(choose_action(eq, CompileState::initial(2))));
  CompileState stored = CompileState::initial(2);
  stored.slots = {{Position{1}, 0}, {Position{2}, 1}};
  stored.store_size = 2;
  const Action s = choose_action(eq, stored);
  REQUIRE(std::holds_alternative<action::SolveNl>(s));
  CHECK(std::get<action::SolveNl>(s).constraint == NlConstraint(Position{1}, Position{2}));

  CHECK_THROWS_AS(choose_action(ClauseMatrix{{}, 1}, CompileState::initial(1)), InternalError);
}

TEST_CASE("trees_of_ruleset groups rules by head and arity") {
  const auto plus = trees_of_ruleset(rules_of(
      "symbol 0; symbol s; symbol plus; rule plus 0 --> s 0 with plus (s $n) $m --> s (plus $n $m);"));
  REQUIRE(plus.size() == 2);
  CHECK(plus.count(HeadKey{Symbol("plus"), 1}) == 1);
  CHECK(plus.count(HeadKey{Symbol("plus"), 2}) == 1);

  const auto ex1 = trees_of_ruleset(rules_of(kExample1));
  REQUIRE(ex1.size() == 1);
  CHECK(ex1.begin()->first == HeadKey{Symbol("f"), 2});

  std::vector<Rule> bad = rules_of(kExample1);
  bad[0].rhs = Term::meta(Name("y"));
  CHECK_THROWS_AS(trees_of_ruleset(bad), ValidationError);
}

TEST_CASE("to_dot renders leaves, failures and case labels") {
  CHECK(to_dot(make_fail()).find("label=\"✗\"") != std::string::npos);
  CHECK(to_dot(make_leaf(Term::meta(Name("x")))).find("label=\"$x\"") != std::string::npos);

  const std::string dot = to_dot(tree_of(kExample1, Symbol("f"), 2), "f");
  CHECK(dot.rfind("digraph \"f\" {", 0) == 0);
  CHECK(count(dot, "[label=\"a/0\"]") == 1);
  CHECK(count(dot, "[label=\"b/0\"]") == 1);
  CHECK(count(dot, "[label=\"c/1\"]") == 2);
  CHECK(count(dot, "->") == tree_stats(tree_of(kExample1, Symbol("f"), 2)).nodes() - 1);
}

TEST_CASE("to_text puts the root on the first line") {
  const std::string text = to_text(tree_of(kExample1, Symbol("f"), 2));
  CHECK(text.rfind("Swap 2\n", 0) == 0);
  CHECK(text.find("b/0 -> ") != std::string::npos);
}

TEST_CASE("heuristic names round-trip") {
  for (auto h : {Heuristic::MaxConstructors, Heuristic::LeftRight}) CHECK(heuristic_from_name(heuristic_name(h)) == h);
  CHECK_FALSE(heuristic_from_name("best"));
}

TEST_CASE("property: compilation is deterministic and reads only filled slots") {
  std::mt19937_64 rng(seed_from_env(7));
  for (int i = 0; i < 300; ++i) {
    const OracleCase c = random_case(rng);
    for (auto h : {Heuristic::MaxConstructors, Heuristic::LeftRight}) {
      const auto a = trees_of_ruleset(c.rules, h);
      const auto b = trees_of_ruleset(c.rules, h);
      REQUIRE(a.size() == b.size());
      for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        CHECK(ia->first == ib->first);
        CHECK(same_shape(ia->second, ib->second));
        check_slots(ia->second, 0, 0);
      }
    }
  }
}
