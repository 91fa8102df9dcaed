#include "rw/dtree.hpp"

#include <algorithm>
#include <set>

#include "rw/error.hpp"

namespace rw {

const DecisionTree* Switch::find(Symbol s, std::size_t arity) const {
  if (!index.empty()) {
    auto it = index.find(s);
    if (it == index.end()) return nullptr;
    for (const auto& [k, i] : it->second) {
      if (k == arity) return &cases[i].child;
    }
    return nullptr;
  }
  for (const auto& c : cases) {
    if (c.symbol == s && c.arity == arity) return &c.child;
  }
  return nullptr;
}

DecisionTree make_tree(TreeNode n) { return DecisionTree(std::make_shared<const TreeNode>(std::move(n))); }

DecisionTree make_leaf(Term rhs, std::vector<std::pair<Name, SlotRef>> env, std::string source) {
  return make_tree(TreeNode{Leaf{std::move(rhs), std::move(env), std::move(source), 0}});
}

DecisionTree make_fail() {
  static const DecisionTree fail = make_tree(TreeNode{Fail{}});
  return fail;
}

DecisionTree make_swap(std::size_t column, DecisionTree child) {
  if (column < 2) throw InternalError("Swap column must be at least 2");
  return make_tree(TreeNode{Swap{column, std::move(child)}});
}

DecisionTree make_store(DecisionTree child) { return make_tree(TreeNode{Store{std::move(child)}}); }

DecisionTree make_switch(std::vector<SymbolCase> cases, std::optional<DecisionTree> abst,
                         std::optional<DecisionTree> fallback) {
  Switch sw{std::move(cases), std::move(abst), std::move(fallback), {}};
  constexpr std::size_t kIndexThreshold = 8;
  if (sw.cases.size() >= kIndexThreshold) {
    for (std::size_t i = 0; i < sw.cases.size(); ++i) {
      sw.index[sw.cases[i].symbol].emplace_back(sw.cases[i].arity, i);
    }
  }
  return make_tree(TreeNode{std::move(sw)});
}

DecisionTree make_bin_nl(DecisionTree succ, SlotRef left, SlotRef right, DecisionTree fail) {
  return make_tree(TreeNode{BinNl{std::move(succ), std::move(left), std::move(right), std::move(fail)}});
}

DecisionTree make_bin_cl(DecisionTree succ, std::size_t slot, std::vector<std::size_t> allowed, DecisionTree fail) {
  return make_tree(TreeNode{BinCl{std::move(succ), slot, std::move(allowed), std::move(fail)}});
}

CompileState CompileState::initial(std::size_t arity) {
  CompileState st;
  for (unsigned i = 1; i <= arity; ++i) st.columns.push_back(Position{i});
  return st;
}

const char* heuristic_name(Heuristic h) {
  return h == Heuristic::LeftRight ? "left-right" : "max-constructors";
}

std::optional<Heuristic> heuristic_from_name(std::string_view s) {
  if (s == "max-constructors") return Heuristic::MaxConstructors;
  if (s == "left-right") return Heuristic::LeftRight;
  return std::nullopt;
}

namespace {

bool env_resolved(const ClauseRow& r, const CompileState& st) {
  return std::all_of(r.env.begin(), r.env.end(), [&](const auto& e) { return st.slots.count(e.second.pos) > 0; });
}

// Positions whose value must be in the store before the row can yield.
bool row_needs(const ClauseRow& r, const Position& p) {
  for (const auto& n : r.nl) {
    if (n.a == p || n.b == p) return true;
  }
  for (const auto& c : r.cl) {
    if (c.pos == p) return true;
  }
  for (const auto& e : r.env) {
    if (e.second.pos == p) return true;
  }
  return false;
}

bool needed(const ClauseMatrix& m, const Position& p) {
  return std::any_of(m.rows.begin(), m.rows.end(), [&](const ClauseRow& r) { return row_needs(r, p); });
}

std::size_t constraints_under(const ClauseMatrix& m, const Position& p) {
  std::size_t n = 0;
  for (const auto& r : m.rows) {
    for (const auto& c : r.nl) n += (p.is_prefix_of(c.a) || p.is_prefix_of(c.b)) ? 1 : 0;
    for (const auto& c : r.cl) n += p.is_prefix_of(c.pos) ? 1 : 0;
  }
  return n;
}

std::size_t head_count(const ClauseMatrix& m, std::size_t col) {
  std::size_t n = 0;
  for (const auto& r : m.rows) n += r.patterns[col].has_head() ? 1 : 0;
  return n;
}

std::size_t binder_index(const CompileState& st, const Position& p) {
  auto it = std::find(st.binders.begin(), st.binders.end(), p);
  if (it == st.binders.end()) throw InternalError("binder at " + p.to_string() + " was not traversed");
  return static_cast<std::size_t>(it - st.binders.begin());
}

SlotRef slot_ref(const CompileState& st, const Position& p, const std::vector<Position>& formals) {
  SlotRef ref{st.slots.at(p), {}};
  for (const auto& f : formals) ref.formals.push_back(binder_index(st, f));
  return ref;
}

DecisionTree compile_rec(const ClauseMatrix& m, const CompileState& st, Heuristic h);

CompileState with_slot(const CompileState& st, const Position& p) {
  CompileState out = st;
  out.slots.emplace(p, out.store_size++);
  return out;
}

DecisionTree switch_first(const ClauseMatrix& m, const CompileState& st0, Heuristic h) {
  const Position rho = st0.columns.front();
  const bool store = !st0.slots.count(rho) && needed(m, rho);
  const CompileState st = store ? with_slot(st0, rho) : st0;

  std::vector<std::pair<Symbol, std::size_t>> sigma;
  bool any_abst = false;
  bool any_var = false;
  for (const auto& r : m.rows) {
    const auto& p = r.patterns.front();
    if (const auto* s = p.as_symb()) {
      std::pair<Symbol, std::size_t> key{s->symbol, s->args.size()};
      if (std::find(sigma.begin(), sigma.end(), key) == sigma.end()) sigma.push_back(key);
    } else if (p.as_abst()) {
      any_abst = true;
    } else {
      any_var = true;
    }
  }

  const std::vector<Position> rest(st.columns.begin() + 1, st.columns.end());
  std::vector<SymbolCase> cases;
  for (const auto& [f, k] : sigma) {
    CompileState sub = st;
    sub.columns.clear();
    for (unsigned i = 1; i <= k; ++i) sub.columns.push_back(rho.child(i));
    sub.columns.insert(sub.columns.end(), rest.begin(), rest.end());
    cases.push_back(SymbolCase{f, k, compile_rec(specialise(f, k, m), sub, h)});
  }
  std::optional<DecisionTree> abst;
  if (any_abst) {
    CompileState sub = st;
    sub.columns.front() = rho.child(1);
    sub.binders.push_back(rho);
    abst = compile_rec(spec_lambda(m), sub, h);
  }
  std::optional<DecisionTree> fallback;
  if (any_var) {
    CompileState sub = st;
    sub.columns = rest;
    fallback = compile_rec(spec_default(m), sub, h);
  }
  DecisionTree sw = make_switch(std::move(cases), std::move(abst), std::move(fallback));
  return store ? make_store(std::move(sw)) : sw;
}

// Brings column i to the front, then runs `then` on the swapped problem.
template <class F>
DecisionTree at_front(const ClauseMatrix& m, const CompileState& st, std::size_t i, F then) {
  if (i == 1) return then(m, st);
  CompileState sub = st;
  std::swap(sub.columns[0], sub.columns[i - 1]);
  return make_swap(i, then(swap_columns(m, i), sub));
}

DecisionTree yield(const ClauseRow& r, const CompileState& st) {
  std::vector<std::pair<Name, SlotRef>> env;
  for (const auto& [name, b] : r.env) env.emplace_back(name, slot_ref(st, b.pos, b.formal_binders));
  return make_tree(TreeNode{Leaf{r.rhs, std::move(env), r.source, r.rule_index}});
}

DecisionTree compile_rec(const ClauseMatrix& m, const CompileState& st, Heuristic h) {
  if (m.empty()) return make_fail();
  const Action a = choose_action(m, st, h);
  if (const auto* y = std::get_if<action::YieldRow>(&a)) return yield(m.rows[y->row - 1], st);
  if (const auto* s = std::get_if<action::SpecializeColumn>(&a)) {
    return at_front(m, st, s->column,
                    [h](const ClauseMatrix& mm, const CompileState& ss) { return switch_first(mm, ss, h); });
  }
  if (const auto* s = std::get_if<action::StoreColumn>(&a)) {
    return at_front(m, st, s->column, [h](const ClauseMatrix& mm, const CompileState& ss) {
      return make_store(compile_rec(mm, with_slot(ss, ss.columns.front()), h));
    });
  }
  if (const auto* n = std::get_if<action::SolveNl>(&a)) {
    const auto& k = n->constraint;
    return make_bin_nl(compile_rec(cond_succ(k, m), st, h), slot_ref(st, k.a, k.formals_a),
                       slot_ref(st, k.b, k.formals_b), compile_rec(cond_fail(k, m), st, h));
  }
  const auto& k = std::get<action::SolveCl>(a).constraint;
  std::vector<std::size_t> allowed;
  for (const auto& p : k.allowed_binders) allowed.push_back(binder_index(st, p));
  return make_bin_cl(compile_rec(cond_succ(k, m), st, h), st.slots.at(k.pos), std::move(allowed),
                     compile_rec(cond_fail(k, m), st, h));
}

}  // namespace

Action choose_action(const ClauseMatrix& m, const CompileState& st, Heuristic h) {
  if (m.empty()) throw InternalError("choose_action on an empty matrix");
  if (st.columns.size() != m.width) throw InternalError("compile state does not match matrix width");

  // Rows keep declaration priority: constraints and leaves are only ever
  // considered for the first row, once nothing in it is left to switch on.
  const ClauseRow& first = m.rows.front();
  if (first.all_wildcards()) {
    if (first.unconstrained() && env_resolved(first, st)) return action::YieldRow{1};
    for (std::size_t i = 0; i < m.width; ++i) {
      if (!st.slots.count(st.columns[i]) && row_needs(first, st.columns[i])) return action::StoreColumn{i + 1};
    }
    for (const auto& c : first.cl) {
      if (st.slots.count(c.pos)) return action::SolveCl{c};
    }
    for (const auto& n : first.nl) {
      if (st.slots.count(n.a) && st.slots.count(n.b)) return action::SolveNl{n};
    }
    throw InternalError("first row is irrefutable but its constraints cannot be solved");
  }

  std::optional<std::size_t> best;
  std::size_t best_heads = 0;
  std::size_t best_constraints = 0;
  for (std::size_t i = 0; i < m.width; ++i) {
    const std::size_t heads = head_count(m, i);
    if (heads == 0) continue;
    if (h == Heuristic::LeftRight) {
      best = i;
      break;
    }
    const std::size_t cons = constraints_under(m, st.columns[i]);
    if (!best || heads > best_heads || (heads == best_heads && cons < best_constraints)) {
      best = i;
      best_heads = heads;
      best_constraints = cons;
    }
  }
  return action::SpecializeColumn{*best + 1};
}

DecisionTree compile(const ClauseMatrix& m, const CompileState& st, Heuristic h) { return compile_rec(m, st, h); }

std::map<HeadKey, DecisionTree> trees_of_ruleset(std::span<const Rule> rules, Heuristic h) {
  std::map<HeadKey, std::vector<Rule>> groups;
  for (const auto& r : rules) {
    require_valid(r);
    groups[HeadKey{r.head, r.arity()}].push_back(r);
  }
  std::map<HeadKey, DecisionTree> out;
  for (const auto& [key, group] : groups) {
    out.emplace(key, compile(from_rules(key.symbol, group), CompileState::initial(key.arity), h));
  }
  return out;
}

namespace {

void stats_rec(const DecisionTree& t, std::size_t depth, std::size_t stores, TreeStats& s) {
  s.depth = std::max(s.depth, depth);
  if (t.as_leaf()) {
    ++s.leaves;
    s.store_size = std::max(s.store_size, stores);
  } else if (t.is_fail()) {
    ++s.fails;
  } else if (const auto* w = t.as_swap()) {
    ++s.swaps;
    stats_rec(w->child, depth + 1, stores, s);
  } else if (const auto* st = t.as_store()) {
    ++s.stores;
    stats_rec(st->child, depth + 1, stores + 1, s);
  } else if (const auto* sw = t.as_switch()) {
    ++s.switches;
    for (const auto& c : sw->cases) stats_rec(c.child, depth + 1, stores, s);
    if (sw->abst) stats_rec(*sw->abst, depth + 1, stores, s);
    if (sw->fallback) stats_rec(*sw->fallback, depth + 1, stores, s);
  } else if (const auto* n = t.as_bin_nl()) {
    ++s.bin_nl;
    stats_rec(n->succ, depth + 1, stores, s);
    stats_rec(n->fail, depth + 1, stores, s);
  } else if (const auto* c = t.as_bin_cl()) {
    ++s.bin_cl;
    stats_rec(c->succ, depth + 1, stores, s);
    stats_rec(c->fail, depth + 1, stores, s);
  }
}

}  // namespace

TreeStats tree_stats(const DecisionTree& t) {
  TreeStats s;
  stats_rec(t, 1, 0, s);
  return s;
}

DecisionTree erase_stores(const DecisionTree& t) {
  if (const auto* st = t.as_store()) return erase_stores(st->child);
  if (const auto* w = t.as_swap()) return make_swap(w->column, erase_stores(w->child));
  if (const auto* sw = t.as_switch()) {
    std::vector<SymbolCase> cases;
    for (const auto& c : sw->cases) cases.push_back(SymbolCase{c.symbol, c.arity, erase_stores(c.child)});
    std::optional<DecisionTree> abst, fallback;
    if (sw->abst) abst = erase_stores(*sw->abst);
    if (sw->fallback) fallback = erase_stores(*sw->fallback);
    return make_switch(std::move(cases), std::move(abst), std::move(fallback));
  }
  if (const auto* n = t.as_bin_nl()) return make_bin_nl(erase_stores(n->succ), n->left, n->right, erase_stores(n->fail));
  if (const auto* c = t.as_bin_cl()) {
    return make_bin_cl(erase_stores(c->succ), c->slot, c->allowed, erase_stores(c->fail));
  }
  return t;
}

bool same_shape(const DecisionTree& a, const DecisionTree& b) {
  if (const auto* x = a.as_leaf()) {
    const auto* y = b.as_leaf();
    return y && alpha_eq(x->rhs, y->rhs);
  }
  if (a.is_fail()) return b.is_fail();
  if (const auto* x = a.as_swap()) {
    const auto* y = b.as_swap();
    return y && x->column == y->column && same_shape(x->child, y->child);
  }
  if (const auto* x = a.as_store()) {
    const auto* y = b.as_store();
    return y && same_shape(x->child, y->child);
  }
  if (const auto* x = a.as_switch()) {
    const auto* y = b.as_switch();
    if (!y || x->cases.size() != y->cases.size() || x->abst.has_value() != y->abst.has_value() ||
        x->fallback.has_value() != y->fallback.has_value()) {
      return false;
    }
    for (const auto& c : x->cases) {
      const DecisionTree* other = y->find(c.symbol, c.arity);
      if (!other || !same_shape(c.child, *other)) return false;
    }
    if (x->abst && !same_shape(*x->abst, *y->abst)) return false;
    return !x->fallback || same_shape(*x->fallback, *y->fallback);
  }
  if (const auto* x = a.as_bin_nl()) {
    const auto* y = b.as_bin_nl();
    if (!y) return false;
    const bool slots_match = (x->left == y->left && x->right == y->right) || (x->left == y->right && x->right == y->left);
    return slots_match && same_shape(x->succ, y->succ) && same_shape(x->fail, y->fail);
  }
  const auto* x = a.as_bin_cl();
  const auto* y = b.as_bin_cl();
  return x && y && x->slot == y->slot && x->allowed == y->allowed && same_shape(x->succ, y->succ) &&
         same_shape(x->fail, y->fail);
}

}  // namespace rw
