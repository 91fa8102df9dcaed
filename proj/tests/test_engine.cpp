#include <doctest.h>

#include "support/build.hpp"
#include "rw/corpus.hpp"
#include "rw/engine.hpp"

using namespace rw;
using namespace rw::testing;

namespace {

const char* kExample1 =
    "symbol a; symbol b; symbol c; symbol e; symbol f;\n"
    "rule f (c (c $x)) a --> $x with f $x b --> $x;\n";

const char* kArith =
    "symbol 0; symbol s; symbol +;\n"
    "rule + 0 $m --> $m with + (s $n) $m --> s (+ $n $m);\n";

const char* kHigherOrder =
    "symbol 0; symbol s; symbol c; symbol sin; symbol cos; symbol *; symbol diff;\n"
    "symbol eq; symbol true; symbol +; symbol map; symbol id; symbol plus; symbol nil;\n"
    "rule + 0 $m --> $m with + (s $n) $m --> s (+ $n $m);\n"
    "rule diff (λx, sin $v[x]) ↪ * (diff (λx, $v[x])) cos with diff (λx, $v) ↪ λx, 0;\n"
    "rule eq $x $x --> true;\n"
    "rule map id $l --> $l;\n"
    "rule plus 0 --> id;\n";

EvalContext context(std::string_view text, EngineKind engine = EngineKind::Tree) {
  EvalOptions opts;
  opts.engine = engine;
  return EvalContext(rules_of(text), opts);
}

std::string rewrite(const EvalContext& ctx, std::string_view text) {
  const Spine sp = spine(term(text));
  const auto r = rewrite_head(ctx, *sp.head.as_symb(), sp.args);
  return r ? show(*r) : "<none>";
}

}  // namespace

TEST_CASE("the Example 1 tree takes the b case without storing anything") {
  const EvalContext ctx(rules_of(kExample1));
  Normalizer n(ctx);
  const Term x = Term::meta(Name("x"));
  const auto c1 = [](DecisionTree child) { return make_switch({SymbolCase{Symbol("c"), 1, std::move(child)}}); };
  const DecisionTree tree = make_swap(2, make_switch({SymbolCase{Symbol("a"), 0, c1(c1(make_leaf(x)))},
                                                      SymbolCase{Symbol("b"), 0, make_leaf(x)}}));
  MachineState st = MachineState::from_args(std::vector<Term>{term("f a"), term("b")});
  std::vector<TraceEvent> trace;
  const auto m = match_tree(n, tree, st, &trace);
  REQUIRE(m);
  CHECK(m->arity == 2);
  REQUIRE(trace.size() == 3);
  CHECK(trace[0].node == "Swap 2");
  CHECK(show(trace[0].stack[0]) == "f a");
  CHECK(show(trace[0].stack[1]) == "b");
  CHECK(trace[1].node == "Switch");
  CHECK(show(trace[1].stack[0]) == "b");
  CHECK(show(trace[1].stack[1]) == "f a");
  CHECK(trace[1].branch == "b/0");
  CHECK(trace[2].node == "Leaf");
  CHECK(trace[2].stack.size() == 1);
  for (const auto& ev : trace) CHECK(ev.store_size == 0);
  CHECK(st.store.empty());
}

TEST_CASE("from_args puts the first argument on top") {
  const MachineState st = MachineState::from_args(std::vector<Term>{term("a"), term("b")});
  REQUIRE(st.stack.size() == 2);
  CHECK(show(st.stack.back()) == "a");
}

TEST_CASE("instantiate reads variables from the store") {
  MachineState st;
  st.store.push_back(StoredTerm{term("s 0"), 0});
  const Leaf leaf{Term::app(Term::symb("g"), Term::meta(Name("m"))), {{Name("m"), SlotRef{0, {}}}}, "r", 0};
  CHECK(show(instantiate(leaf, st)) == "g (s 0)");

  // A variable with a formal is abstracted over the binder recorded in the snapshot.
  const Var z = fresh_var("z");
  MachineState ho;
  ho.binders.push_back(z);
  ho.store.push_back(StoredTerm{Term::app(Term::symb("sin"), Term::var(z)), 1});
  const Var x = fresh_var("x");
  const Leaf hleaf{Term::abst(x, std::nullopt, Term::meta(Name("v"), {Term::app(Term::symb("h"), Term::var(x))})),
                   {{Name("v"), SlotRef{0, {0}}}}, "r", 0};
  CHECK(alpha_eq(instantiate(hleaf, ho), term("\\x, sin (h x)")));

  const Leaf broken{Term::meta(Name("m")), {{Name("m"), SlotRef{3, {}}}}, "r", 0};
  CHECK_THROWS_AS(instantiate(broken, st), InternalError);
}

TEST_CASE("head rewriting on both engines") {
  for (auto engine : {EngineKind::Tree, EngineKind::Naive}) {
    CAPTURE(static_cast<int>(engine));
    const auto ex1 = context(kExample1, engine);
    CHECK(rewrite(ex1, "f (c e) b") == "c e");
    CHECK(rewrite(ex1, "f (c (c e)) a") == "e");
    CHECK(rewrite(ex1, "f (c e) a") == "<none>");
    CHECK(rewrite(ex1, "f (c (c e)) b a") == "c (c e) a");

    const auto arith = context(kArith, engine);
    CHECK(rewrite(arith, "+ 0 (s 0)") == "s 0");
    CHECK(rewrite(arith, "+ (s 0) (s 0)") == "s (+ 0 (s 0))");
    CHECK(rewrite(arith, "+ 0") == "<none>");

    const auto ho = context(kHigherOrder, engine);
    CHECK(rewrite(ho, "plus 0 0 nil") == "id 0 nil");
    CHECK(rewrite(ho, "diff (λx, sin x)") == "* (diff (\\x, x)) cos");
    CHECK(rewrite(ho, "diff (λx, sin c)") == "* (diff (\\x, c)) cos");
  }
}

TEST_CASE("whnf stops at the head, snf normalizes everywhere") {
  const auto ctx = context(kArith);
  CHECK(show(whnf(ctx, term("+ (s 0) 0"))) == "s (+ 0 0)");
  CHECK(show(snf(ctx, term("+ (s 0) 0"))) == "s 0");
  CHECK(show(whnf(ctx, term("(\\x, s x) 0"))) == "s 0");
  CHECK(show(snf(ctx, term("\\y, + 0 y"))) == "\\y, y");
  CHECK(show(whnf(ctx, term("\\y, + 0 y"))) == "\\y, + 0 y");
}

TEST_CASE("the higher-order suite on both engines") {
  for (auto engine : {EngineKind::Tree, EngineKind::Naive}) {
    CAPTURE(static_cast<int>(engine));
    const auto ctx = context(kHigherOrder, engine);
    const auto nf = [&](std::string_view t) { return show(snf(ctx, term(t))); };
    CHECK(nf("diff (λx, c)") == "\\x, 0");
    CHECK(nf("diff (λx, sin x)") == "* (diff (\\x, x)) cos");
    CHECK(nf("eq 0 0") == "true");
    CHECK(nf("eq 0 (s 0)") == "eq 0 (s 0)");
    CHECK(nf("eq (+ 0 0) 0") == "true");
    CHECK(nf("map (plus 0) nil") == "nil");
  }
}

TEST_CASE("alpha equality mode compares stored terms syntactically") {
  EvalOptions opts;
  opts.equality = EqualityMode::Alpha;
  const EvalContext ctx(rules_of(kHigherOrder), opts);
  // The arguments are only equal after normalization.
  Normalizer n(ctx);
  CHECK_FALSE(n.rewrite_head(Symbol("eq"), std::vector<Term>{term("+ 0 0"), term("0")}));
  CHECK(n.rewrite_head(Symbol("eq"), std::vector<Term>{term("0"), term("0")}));
}

TEST_CASE("convertibility") {
  const auto ctx = context(kArith);
  CHECK(convertible(ctx, term("+ (s 0) (s 0)"), term("s (s 0)")));
  CHECK(convertible(ctx, term("\\x, + 0 x"), term("\\y, y")));
  CHECK_FALSE(convertible(ctx, term("+ 0 0"), term("s 0")));
}

TEST_CASE("fib 10 agrees across engines") {
  const SourceFile sf = fib_corpus(10);
  const Term goal = std::get<Compute>(sf.items.back()).term;
  for (auto engine : {EngineKind::Tree, EngineKind::Naive}) {
    EvalOptions opts;
    opts.engine = engine;
    const EvalContext ctx(sf.rules(), opts);
    CHECK(from_unary(snf(ctx, goal)) == 55u);
  }
  CHECK(from_unary(unary(7)) == 7u);
  CHECK_FALSE(from_unary(term("s a")));
}

TEST_CASE("the step budget turns divergence into an error") {
  EvalOptions opts;
  opts.max_steps = 1000;
  for (auto engine : {EngineKind::Tree, EngineKind::Naive}) {
    opts.engine = engine;
    const EvalContext ctx(rules_of("symbol loop; rule loop --> loop;"), opts);
    Normalizer n(ctx);
    CHECK_THROWS_AS(n.normalize(term("loop")), DivergenceError);
    CHECK(n.steps() > 1000);
  }
  const EvalContext omega(rules_of("symbol a;"), opts);
  CHECK_THROWS_AS(snf(omega, term("(\\x, x x) (\\x, x x)")), DivergenceError);
}

TEST_CASE("invalid rules are rejected when the context is built") {
  std::vector<Rule> rs = rules_of(kArith);
  rs[0].rhs = Term::meta(Name("zz"));
  CHECK_THROWS_AS(EvalContext{rs}, ValidationError);
}

TEST_CASE("rules_for and trees_for are indexed by head symbol") {
  const EvalContext ctx(rules_of(kHigherOrder));
  CHECK(ctx.rules_for(Symbol("+")).size() == 2);
  CHECK(ctx.rules_for(Symbol("nil")).empty());
  const auto ts = ctx.trees_for(Symbol("diff"));
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].arity == 1);
}
