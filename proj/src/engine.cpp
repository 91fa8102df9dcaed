#include "rw/engine.hpp"

#include <algorithm>

#include "rw/error.hpp"

namespace rw {

EvalContext::EvalContext(std::vector<Rule> rules, EvalOptions opts) : opts_(opts), rules_(std::move(rules)) {
  if (opts_.max_steps == 0) throw std::invalid_argument("max_steps must be positive");
  trees_ = trees_of_ruleset(rules_, opts_.heuristic);
  for (const auto& [key, tree] : trees_) by_symbol_[key.symbol].push_back(ArityTree{key.arity, tree});
  for (auto& [sym, list] : by_symbol_) {
    std::sort(list.begin(), list.end(), [](const ArityTree& a, const ArityTree& b) { return a.arity > b.arity; });
  }
  for (const auto& r : rules_) rules_by_symbol_[r.head].push_back(r);
}

std::span<const EvalContext::ArityTree> EvalContext::trees_for(Symbol s) const {
  auto it = by_symbol_.find(s);
  if (it == by_symbol_.end()) return {};
  return it->second;
}

std::span<const Rule> EvalContext::rules_for(Symbol s) const {
  auto it = rules_by_symbol_.find(s);
  if (it == rules_by_symbol_.end()) return {};
  return it->second;
}

MachineState MachineState::from_args(std::span<const Term> args) {
  MachineState st;
  st.stack.assign(args.rbegin(), args.rend());
  return st;
}

namespace {

std::string trace_label(const DecisionTree& t) {
  if (t.as_leaf()) return "Leaf";
  if (t.is_fail()) return "Fail";
  if (const auto* s = t.as_swap()) return "Swap " + std::to_string(s->column);
  if (t.as_store()) return "Store";
  if (t.as_switch()) return "Switch";
  if (const auto* n = t.as_bin_nl()) {
    return "BinNl {" + std::to_string(n->left.slot) + "," + std::to_string(n->right.slot) + "}";
  }
  return "BinCl " + std::to_string(t.as_bin_cl()->slot);
}

[[noreturn, gnu::noinline]] void missing_slot(std::size_t slot) {
  throw InternalError("store slot " + std::to_string(slot) + " not populated");
}

Closure closure_of(const SlotRef& ref, const MachineState& st) {
  if (ref.slot >= st.store.size()) missing_slot(ref.slot);
  Closure c{{}, st.store[ref.slot].term};
  c.formals.reserve(ref.formals.size());
  for (auto i : ref.formals) {
    if (i >= st.binders.size()) throw InternalError("binder index out of range");
    c.formals.push_back(st.binders[i].id);
  }
  return c;
}

}  // namespace

std::optional<TreeMatch> match_tree(Normalizer& n, const DecisionTree& tree, MachineState& st,
                                    std::vector<TraceEvent>* trace) {
  const std::size_t arity = st.stack.size();
  const DecisionTree* cur = &tree;
  auto record = [&](auto&& branch) {
    TraceEvent ev{trace_label(*cur), {st.stack.rbegin(), st.stack.rend()}, st.store.size(), std::string(branch())};
    trace->push_back(std::move(ev));
  };
  auto none = [] { return ""; };
  while (true) {
    if (const auto* leaf = cur->as_leaf()) {
      if (trace) record(none);
      return TreeMatch{leaf, arity};
    }
    if (cur->is_fail()) {
      if (trace) record(none);
      return std::nullopt;
    }
    if (const auto* sw = cur->as_swap()) {
      if (trace) record(none);
      if (sw->column > st.stack.size()) throw InternalError("Swap beyond the stack");
      std::swap(st.stack.back(), st.stack[st.stack.size() - sw->column]);
      cur = &sw->child;
      continue;
    }
    if (const auto* s = cur->as_store()) {
      if (trace) record(none);
      if (st.stack.empty()) throw InternalError("Store on an empty stack");
      st.store.push_back(StoredTerm{st.stack.back(), st.binders.size()});
      cur = &s->child;
      continue;
    }
    if (const auto* sw = cur->as_switch()) {
      if (st.stack.empty()) throw InternalError("Switch on an empty stack");
      const bool only_default = sw->cases.empty() && !sw->abst;
      if (only_default) {
        if (trace) record([] { return "*"; });
        st.stack.pop_back();
        cur = &*sw->fallback;
        continue;
      }
      Term top = n.whnf(st.stack.back());
      std::size_t nargs = 0;
      const Term& head = spine_head(top, &nargs);
      if (const auto* f = head.as_symb()) {
        if (const DecisionTree* next = sw->find(*f, nargs)) {
          if (trace) record([&] { return f->str() + "/" + std::to_string(nargs); });
          st.stack.pop_back();
          // Outermost application holds the last argument, so argument 1 ends on top.
          const Term* node = &top;
          while (const auto* a = node->as_app()) {
            st.stack.push_back(a->arg);
            node = &a->fun;
          }
          cur = next;
          continue;
        }
      } else if (const auto* lam = top.as_abst(); lam && sw->abst) {
        if (trace) record([] { return "λ"; });
        const Var z = fresh_var(lam->binder.name);
        st.stack.back() = subst(lam->body, {{lam->binder.id, Term::var(z)}});
        st.binders.push_back(z);
        cur = &*sw->abst;
        continue;
      }
      if (!sw->fallback) {
        if (trace) record(none);
        return std::nullopt;
      }
      if (trace) record([] { return "*"; });
      st.stack.pop_back();
      cur = &*sw->fallback;
      continue;
    }
    if (const auto* nl = cur->as_bin_nl()) {
      const bool ok = n.closures_equal(closure_of(nl->left, st), closure_of(nl->right, st));
      if (trace) record([ok] { return ok ? "ok" : "fail"; });
      cur = ok ? &nl->succ : &nl->fail;
      continue;
    }
    const auto* cl = cur->as_bin_cl();
    if (!cl) throw InternalError("unknown decision tree node");
    if (cl->slot >= st.store.size()) throw InternalError("BinCl on an unpopulated slot");
    const StoredTerm& stored = st.store[cl->slot];
    const Term t =
        n.context().options().equality == EqualityMode::Convertibility ? n.snf(stored.term) : stored.term;
    bool ok = true;
    if (stored.snapshot > 0) {
      for (const VarId x : free_vars(t)) {
        for (std::size_t i = 0; i < stored.snapshot && ok; ++i) {
          if (st.binders[i].id != x) continue;
          ok = std::find(cl->allowed.begin(), cl->allowed.end(), i) != cl->allowed.end();
        }
        if (!ok) break;
      }
    }
    if (trace) record([ok] { return ok ? "ok" : "fail"; });
    cur = ok ? &cl->succ : &cl->fail;
  }
}

namespace {

// Right-hand side without binders whose variables all have arity 0: plain
// replacement of metavariables by stored terms.
[[noreturn, gnu::noinline]] void unbound_meta(const MetaNode& m) {
  throw InternalError("unbound pattern variable $" + m.pvar.str() + " in right-hand side");
}

// Requires t.has_meta().
Term fill(const Term& t, const Leaf& leaf, const MachineState& st) {
  if (const auto* a = t.as_app()) {
    return Term::app(a->fun.has_meta() ? fill(a->fun, leaf, st) : a->fun,
                     a->arg.has_meta() ? fill(a->arg, leaf, st) : a->arg);
  }
  const auto* m = t.as_meta();
  for (const auto& [name, ref] : leaf.env) {
    if (name != m->pvar) continue;
    if (ref.slot >= st.store.size()) missing_slot(ref.slot);
    return st.store[ref.slot].term;
  }
  unbound_meta(*m);
}

}  // namespace

Term instantiate(const Leaf& leaf, const MachineState& st) {
  const bool first_order = leaf.rhs.var_mask() == 0 &&
                           std::all_of(leaf.env.begin(), leaf.env.end(), [](const auto& e) { return e.second.formals.empty(); });
  if (first_order) return leaf.rhs.has_meta() ? fill(leaf.rhs, leaf, st) : leaf.rhs;
  std::vector<std::pair<Name, Closure>> sigma;
  sigma.reserve(leaf.env.size());
  for (const auto& [name, ref] : leaf.env) sigma.emplace_back(name, closure_of(ref, st));
  return apply_subst(sigma, leaf.rhs);
}

std::optional<TreeResult> eval_tree(Normalizer& n, const DecisionTree& tree, MachineState& st,
                                    std::vector<TraceEvent>* trace) {
  auto m = match_tree(n, tree, st, trace);
  if (!m) return std::nullopt;
  return TreeResult{instantiate(*m->leaf, st), m->arity};
}

Normalizer::Normalizer(const EvalContext& ctx) : ctx_(ctx) {}

void Normalizer::tick() {
  if (++steps_ > ctx_.options().max_steps) throw DivergenceError(ctx_.options().max_steps);
}

Term Normalizer::whnf(const Term& t) {
  std::optional<Term> owned;
  const Term* cur = &t;
  while (true) {
    std::size_t nargs = 0;
    const Term& head = spine_head(*cur, &nargs);
    std::optional<Term> next;
    if (const auto* lam = head.as_abst(); lam && nargs > 0) {
      Spine sp = spine(*cur);
      Term body = subst(lam->body, {{lam->binder.id, sp.args.front()}});
      next = Term::apps(std::move(body), std::span<const Term>(sp.args).subspan(1));
    } else if (const auto* f = head.as_symb()) {
      if (ctx_.options().engine == EngineKind::Tree) {
        next = rewrite_app_tree(*cur, *f, nargs);
      } else if (!ctx_.rules_for(*f).empty()) {
        Spine sp = spine(*cur);
        next = rewrite_head_naive(*f, sp.args);
      }
    }
    if (!next) return *cur;
    tick();
    owned = std::move(next);
    cur = &*owned;
  }
}

namespace {

bool head_has_rules(const EvalContext& ctx, const Term& t) {
  const auto* f = spine_head(t).as_symb();
  if (!f) return false;
  return ctx.options().engine == EngineKind::Tree ? !ctx.trees_for(*f).empty() : !ctx.rules_for(*f).empty();
}

}  // namespace

Term Normalizer::snf_spine(const Term& t) {
  if (const auto* a = t.as_app()) {
    Term fun = snf_spine(a->fun);
    Term arg = snf(a->arg);
    if (fun.same(a->fun) && arg.same(a->arg)) return t;
    return Term::app(std::move(fun), std::move(arg));
  }
  if (t.kind() == TermKind::Var || t.kind() == TermKind::Symb) return t;
  return snf(t);
}

Term Normalizer::snf(const Term& t) {
  Term w = whnf(t);
  while (true) {
    Term n = w;
    switch (w.kind()) {
      case TermKind::App:
        n = snf_spine(w);
        break;
      case TermKind::Abst: {
        const auto* a = w.as_abst();
        std::optional<Term> dom;
        if (a->domain) dom = snf(*a->domain);
        Term body = snf(a->body);
        if ((dom && !dom->same(*a->domain)) || !body.same(a->body)) n = Term::abst(a->binder, dom, std::move(body));
        break;
      }
      case TermKind::Prod: {
        const auto* p = w.as_prod();
        Term dom = snf(p->domain);
        Term cod = snf(p->codomain);
        if (!dom.same(p->domain) || !cod.same(p->codomain)) n = Term::prod(p->binder, std::move(dom), std::move(cod));
        break;
      }
      default:
        break;
    }
    if (n.same(w) || !head_has_rules(ctx_, n)) return n;
    // Normalized arguments can enable a rule that failed on their original form.
    Term again = whnf(n);
    if (again.same(n)) return n;
    w = std::move(again);
  }
}

Term Normalizer::normalize(const Term& t) {
  return ctx_.options().strategy == Strategy::Snf ? snf(t) : whnf(t);
}

bool Normalizer::convertible(const Term& t, const Term& u) {
  if (alpha_eq(t, u)) return true;
  return alpha_eq(snf(t), snf(u));
}

bool Normalizer::closures_equal(const Closure& a, const Closure& b) {
  if (ctx_.options().equality == EqualityMode::Alpha) return rw::closures_equal(a, b, MatchHooks{});
  MatchHooks h;
  h.normalize = [this](const Term& t) { return snf(t); };
  return rw::closures_equal(a, b, h);
}

std::optional<Term> Normalizer::rewrite_head(Symbol head, std::span<const Term> args) {
  return ctx_.options().engine == EngineKind::Tree ? rewrite_head_tree(head, args) : rewrite_head_naive(head, args);
}

class PooledState {
public:
  explicit PooledState(Normalizer& n) : n_(n) {
    if (n_.depth_ == n_.pool_.size()) n_.pool_.push_back(std::make_unique<MachineState>());
    st_ = n_.pool_[n_.depth_++].get();
  }
  ~PooledState() {
    st_->stack.clear();
    st_->store.clear();
    st_->binders.clear();
    --n_.depth_;
  }
  PooledState(const PooledState&) = delete;
  PooledState& operator=(const PooledState&) = delete;

  MachineState& get() { return *st_; }

private:
  Normalizer& n_;
  MachineState* st_;
};

std::optional<Term> Normalizer::rewrite_head_tree(Symbol head, std::span<const Term> args) {
  for (const auto& at : ctx_.trees_for(head)) {
    if (at.arity > args.size()) continue;
    PooledState pooled(*this);
    MachineState& st = pooled.get();
    st.stack.assign(args.rend() - static_cast<std::ptrdiff_t>(at.arity), args.rend());
    if (auto m = match_tree(*this, at.tree, st)) {
      return Term::apps(instantiate(*m->leaf, st), args.subspan(at.arity));
    }
  }
  return std::nullopt;
}

std::optional<Term> Normalizer::rewrite_app_tree(const Term& t, Symbol head, std::size_t nargs) {
  for (const auto& at : ctx_.trees_for(head)) {
    if (at.arity > nargs) continue;
    const Term* prefix = &t;
    for (std::size_t i = at.arity; i < nargs; ++i) prefix = &prefix->as_app()->fun;
    PooledState pooled(*this);
    MachineState& st = pooled.get();
    // The outermost application holds the last argument, so argument 1 ends on top.
    for (const Term* node = prefix; const auto* a = node->as_app(); node = &a->fun) st.stack.push_back(a->arg);
    auto m = match_tree(*this, at.tree, st);
    if (!m) continue;
    Term result = instantiate(*m->leaf, st);
    if (at.arity == nargs) return result;
    std::vector<Term> leftover;
    for (const Term* node = &t; node != prefix; node = &node->as_app()->fun) leftover.push_back(node->as_app()->arg);
    std::reverse(leftover.begin(), leftover.end());
    return Term::apps(std::move(result), leftover);
  }
  return std::nullopt;
}

std::optional<Term> Normalizer::rewrite_head_naive(Symbol head, std::span<const Term> args) {
  const auto rules = ctx_.rules_for(head);
  if (rules.empty()) return std::nullopt;
  // Per-call memo so each scrutinized subterm is head-normalized once across
  // rule attempts. Keys are kept alive alongside the results.
  std::unordered_map<const TermNode*, std::pair<Term, Term>> memo;
  MatchHooks h;
  h.whnf = [this, &memo](const Term& t) {
    auto it = memo.find(t.node());
    if (it != memo.end()) return it->second.second;
    Term w = whnf(t);
    memo.emplace(t.node(), std::make_pair(t, w));
    return w;
  };
  if (ctx_.options().equality == EqualityMode::Convertibility) h.normalize = [this](const Term& t) { return snf(t); };
  auto m = naive_rewrite_head(rules, head, args, h);
  if (!m) return std::nullopt;
  return std::move(m->result);
}

MatchHooks Normalizer::hooks() {
  MatchHooks h;
  h.whnf = [this](const Term& t) { return whnf(t); };
  if (ctx_.options().equality == EqualityMode::Convertibility) h.normalize = [this](const Term& t) { return snf(t); };
  return h;
}

Term whnf(const EvalContext& ctx, const Term& t) {
  Normalizer n(ctx);
  return n.whnf(t);
}

Term snf(const EvalContext& ctx, const Term& t) {
  Normalizer n(ctx);
  return n.snf(t);
}

bool convertible(const EvalContext& ctx, const Term& t, const Term& u) {
  Normalizer n(ctx);
  return n.convertible(t, u);
}

std::optional<Term> rewrite_head(const EvalContext& ctx, Symbol head, std::span<const Term> args) {
  Normalizer n(ctx);
  return n.rewrite_head(head, args);
}

}  // namespace rw
