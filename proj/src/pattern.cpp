#include "rw/pattern.hpp"

#include <algorithm>
#include <set>

namespace rw {

ValidationError::ValidationError(const std::string& rule_label, std::vector<Violation> vs)
    : Error([&] {
        std::string msg = "invalid rule " + rule_label + ":";
        for (const auto& v : vs) msg += " " + v.message + (v.where.empty() ? "" : " (at " + v.where + ")") + ";";
        return msg;
      }()),
      violations(std::move(vs)) {}

Pattern Pattern::wildcard() {
  static const Pattern w(std::make_shared<PatternNode>(PatternNode{PatVar{}}));
  return w;
}

Pattern Pattern::var(Name name, std::vector<Var> args) {
  return Pattern(std::make_shared<PatternNode>(PatternNode{PatVar{name, std::move(args)}}));
}

Pattern Pattern::symb(Symbol s, std::vector<Pattern> args) {
  return Pattern(std::make_shared<PatternNode>(PatternNode{PatSymb{s, std::move(args)}}));
}

Pattern Pattern::abst(const Var& binder, Pattern body) {
  return Pattern(std::make_shared<PatternNode>(PatternNode{PatAbst{binder, std::move(body)}}));
}

const PatVar* Pattern::as_var() const { return std::get_if<PatVar>(&node_->data); }
const PatSymb* Pattern::as_symb() const { return std::get_if<PatSymb>(&node_->data); }
const PatAbst* Pattern::as_abst() const { return std::get_if<PatAbst>(&node_->data); }

bool Pattern::is_wildcard() const {
  const auto* v = as_var();
  return v && !v->name;
}

std::size_t Pattern::size() const {
  if (const auto* s = as_symb()) {
    std::size_t n = 1;
    for (const auto& a : s->args) n += a.size();
    return n;
  }
  if (const auto* a = as_abst()) return 1 + a->body.size();
  return 1;
}

bool Pattern::operator==(const Pattern& o) const {
  if (node_ == o.node_) return true;
  if (node_->data.index() != o.node_->data.index()) return false;
  if (const auto* v = as_var()) {
    const auto* w = o.as_var();
    return v->name == w->name && v->args == w->args;
  }
  if (const auto* s = as_symb()) {
    const auto* r = o.as_symb();
    return s->symbol == r->symbol && s->args == r->args;
  }
  const auto* a = as_abst();
  const auto* b = o.as_abst();
  return a->binder == b->binder && a->body == b->body;
}

namespace {

struct LhsVarInfo {
  std::size_t arity;
  std::string first_position;
};

void validate_pattern(const Pattern& p, const Position& pos, std::vector<VarId>& scope,
                      std::map<Name, LhsVarInfo>& vars, std::vector<Violation>& out) {
  if (const auto* v = p.as_var()) {
    const std::string who = v->name ? "$" + v->name->str() : "_";
    for (std::size_t i = 0; i < v->args.size(); ++i) {
      const auto& y = v->args[i];
      if (std::find(scope.begin(), scope.end(), y.id) == scope.end()) {
        out.push_back({"argument " + y.name.str() + " of " + who + " is not bound by an enclosing abstraction",
                       pos.to_string()});
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (v->args[j].id == y.id) {
          out.push_back({"non-distinct bound arguments in " + who, pos.to_string()});
          break;
        }
      }
    }
    if (v->name) {
      auto [it, fresh] = vars.try_emplace(*v->name, LhsVarInfo{v->args.size(), pos.to_string()});
      if (!fresh && it->second.arity != v->args.size()) {
        out.push_back({"inconsistent arity for " + who + " (" + std::to_string(it->second.arity) + " at " +
                           it->second.first_position + ", " + std::to_string(v->args.size()) + " here)",
                       pos.to_string()});
      }
    }
    return;
  }
  if (const auto* s = p.as_symb()) {
    for (std::size_t i = 0; i < s->args.size(); ++i) {
      validate_pattern(s->args[i], pos.child(static_cast<unsigned>(i + 1)), scope, vars, out);
    }
    return;
  }
  const auto* a = p.as_abst();
  scope.push_back(a->binder.id);
  validate_pattern(a->body, pos.child(1), scope, vars, out);
  scope.pop_back();
}

void validate_rhs(const Term& t, const std::map<Name, LhsVarInfo>& vars, std::vector<Violation>& out) {
  if (!t.has_meta()) return;
  switch (t.kind()) {
    case TermKind::App:
      validate_rhs(t.as_app()->fun, vars, out);
      validate_rhs(t.as_app()->arg, vars, out);
      return;
    case TermKind::Abst:
      if (t.as_abst()->domain) validate_rhs(*t.as_abst()->domain, vars, out);
      validate_rhs(t.as_abst()->body, vars, out);
      return;
    case TermKind::Prod:
      validate_rhs(t.as_prod()->domain, vars, out);
      validate_rhs(t.as_prod()->codomain, vars, out);
      return;
    case TermKind::Meta: {
      const auto* m = t.as_meta();
      auto it = vars.find(m->pvar);
      if (it == vars.end()) {
        out.push_back({"unbound rhs variable $" + m->pvar.str(), "$" + m->pvar.str()});
      } else if (it->second.arity != m->args.size()) {
        out.push_back({"arity mismatch for $" + m->pvar.str() + ": lhs has " + std::to_string(it->second.arity) +
                           " argument(s), rhs has " + std::to_string(m->args.size()),
                       "$" + m->pvar.str()});
      }
      for (const auto& a : m->args) validate_rhs(a, vars, out);
      return;
    }
    default:
      return;
  }
}

// Free variables of a term that may contain metavariable applications.
void rhs_free(const Term& t, std::vector<VarId>& bound, std::set<VarId>& out) {
  if (t.var_mask() == 0) return;
  switch (t.kind()) {
    case TermKind::Var:
      if (std::find(bound.begin(), bound.end(), t.as_var()->id) == bound.end()) out.insert(t.as_var()->id);
      return;
    case TermKind::App:
      rhs_free(t.as_app()->fun, bound, out);
      rhs_free(t.as_app()->arg, bound, out);
      return;
    case TermKind::Abst:
      if (t.as_abst()->domain) rhs_free(*t.as_abst()->domain, bound, out);
      bound.push_back(t.as_abst()->binder.id);
      rhs_free(t.as_abst()->body, bound, out);
      bound.pop_back();
      return;
    case TermKind::Prod:
      rhs_free(t.as_prod()->domain, bound, out);
      bound.push_back(t.as_prod()->binder.id);
      rhs_free(t.as_prod()->codomain, bound, out);
      bound.pop_back();
      return;
    case TermKind::Meta:
      for (const auto& a : t.as_meta()->args) rhs_free(a, bound, out);
      return;
    default:
      return;
  }
}

class Matcher {
public:
  Matcher(const VarSet& bound, const MatchHooks& hooks) : hooks_(hooks), initial_(bound) {
    traversed_.assign(bound.begin(), bound.end());
  }

  bool match(const Pattern& p, const Term& t) {
    if (const auto* v = p.as_var()) return match_var(*v, t);
    if (const auto* s = p.as_symb()) {
      const Term w = whnf(t);
      std::size_t n = 0;
      const Term& head = spine_head(w, &n);
      const auto* f = head.as_symb();
      if (!f || *f != s->symbol || n != s->args.size()) return false;
      const auto sp = spine(w);
      for (std::size_t i = 0; i < n; ++i) {
        if (!match(s->args[i], sp.args[i])) return false;
      }
      return true;
    }
    const auto* a = p.as_abst();
    const Term w = whnf(t);
    const auto* lam = w.as_abst();
    if (!lam) return false;
    const Var z = fresh_var(lam->binder.name);
    const Term body = subst(lam->body, {{lam->binder.id, Term::var(z)}});
    renaming_.emplace_back(a->binder.id, z.id);
    traversed_.push_back(z.id);
    const bool ok = match(a->body, body);
    traversed_.pop_back();
    renaming_.pop_back();
    return ok;
  }

  Substitution take() { return std::move(sigma_); }

private:
  Term whnf(const Term& t) const { return hooks_.whnf ? hooks_.whnf(t) : t; }
  Term normalize(const Term& t) const { return hooks_.normalize ? hooks_.normalize(t) : t; }

  std::optional<VarId> lookup_binder(VarId y) const {
    for (auto it = renaming_.rbegin(); it != renaming_.rend(); ++it) {
      if (it->first == y) return it->second;
    }
    if (initial_.count(y)) return y;
    return std::nullopt;
  }

  bool match_var(const PatVar& v, const Term& t) {
    std::vector<VarId> formals;
    formals.reserve(v.args.size());
    for (const auto& y : v.args) {
      auto z = lookup_binder(y.id);
      if (!z) return false;
      formals.push_back(*z);
    }
    if (!traversed_.empty()) {
      for (const auto x : free_vars(normalize(t))) {
        const bool traversed = std::find(traversed_.begin(), traversed_.end(), x) != traversed_.end();
        if (traversed && std::find(formals.begin(), formals.end(), x) == formals.end()) return false;
      }
    }
    if (!v.name) return true;
    Closure c{std::move(formals), t};
    auto it = sigma_.find(*v.name);
    if (it == sigma_.end()) {
      sigma_.emplace(*v.name, std::move(c));
      return true;
    }
    return closures_equal(it->second, c, hooks_);
  }

  const MatchHooks& hooks_;
  const VarSet& initial_;
  std::vector<std::pair<VarId, VarId>> renaming_;  // pattern binder -> fresh term variable
  std::vector<VarId> traversed_;
  Substitution sigma_;
};

template <class Lookup>
class Instantiator {
public:
  explicit Instantiator(Lookup lookup) : lookup_(std::move(lookup)) {}

  Term run(const Term& t) {
    // Binders contribute to var_mask, so a zero mask means nothing to rename.
    if (!t.has_meta() && t.var_mask() == 0) return t;
    switch (t.kind()) {
      case TermKind::Sort:
      case TermKind::Symb:
        return t;
      case TermKind::Var: {
        const auto id = t.as_var()->id;
        for (auto it = renaming_.rbegin(); it != renaming_.rend(); ++it) {
          if (it->first == id) return Term::var(it->second);
        }
        return t;
      }
      case TermKind::App:
        return Term::app(run(t.as_app()->fun), run(t.as_app()->arg));
      case TermKind::Abst: {
        const auto* a = t.as_abst();
        std::optional<Term> dom;
        if (a->domain) dom = run(*a->domain);
        const Var x = fresh_var(a->binder.name);
        renaming_.emplace_back(a->binder.id, x);
        Term body = run(a->body);
        renaming_.pop_back();
        return Term::abst(x, std::move(dom), std::move(body));
      }
      case TermKind::Prod: {
        const auto* p = t.as_prod();
        Term dom = run(p->domain);
        const Var x = fresh_var(p->binder.name);
        renaming_.emplace_back(p->binder.id, x);
        Term cod = run(p->codomain);
        renaming_.pop_back();
        return Term::prod(x, std::move(dom), std::move(cod));
      }
      case TermKind::Meta: {
        const auto* m = t.as_meta();
        const Closure* c = lookup_(m->pvar);
        if (!c) throw InternalError("unbound pattern variable $" + m->pvar.str() + " in right-hand side");
        if (c->formals.size() != m->args.size()) {
          throw InternalError("arity mismatch when instantiating $" + m->pvar.str());
        }
        if (c->formals.empty()) return c->body;
        Bindings b;
        for (std::size_t i = 0; i < m->args.size(); ++i) b.emplace(c->formals[i], run(m->args[i]));
        return subst(c->body, b);
      }
    }
    return t;
  }

private:
  Lookup lookup_;
  std::vector<std::pair<VarId, Var>> renaming_;
};

std::optional<NaiveMatch> try_rule(const Rule& r, Symbol head, std::span<const Term> args, const MatchHooks& hooks) {
  if (r.head != head || r.arity() > args.size()) return std::nullopt;
  auto sigma = match_patterns(r.lhs_args, args.first(r.arity()), {}, hooks);
  if (!sigma) return std::nullopt;
  Term result = Term::apps(apply_subst(*sigma, r.rhs), args.subspan(r.arity()));
  return NaiveMatch{&r, std::move(result)};
}

}  // namespace

std::vector<Violation> validate_rule(const Rule& rule) {
  std::vector<Violation> out;
  if (rule.head.name().empty()) out.push_back({"left-hand side is not a symbol application", "ε"});
  std::vector<VarId> scope;
  std::map<Name, LhsVarInfo> vars;
  for (std::size_t i = 0; i < rule.lhs_args.size(); ++i) {
    validate_pattern(rule.lhs_args[i], Position{static_cast<unsigned>(i + 1)}, scope, vars, out);
  }
  validate_rhs(rule.rhs, vars, out);
  std::vector<VarId> bound;
  std::set<VarId> free;
  rhs_free(rule.rhs, bound, free);
  if (!free.empty()) out.push_back({"right-hand side has free variables outside pattern variables", "rhs"});
  return out;
}

void require_valid(const Rule& rule) {
  auto vs = validate_rule(rule);
  if (!vs.empty()) throw ValidationError(rule.label, std::move(vs));
}

std::optional<Substitution> match_patterns(std::span<const Pattern> patterns, std::span<const Term> terms,
                                           const VarSet& bound, const MatchHooks& hooks) {
  if (patterns.size() != terms.size()) return std::nullopt;
  Matcher m(bound, hooks);
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (!m.match(patterns[i], terms[i])) return std::nullopt;
  }
  return m.take();
}

bool closures_equal(const Closure& a, const Closure& b, const MatchHooks& hooks) {
  if (a.formals.size() != b.formals.size()) return false;
  Term x = a.body;
  Term y = b.body;
  if (!a.formals.empty()) {
    Bindings ba, bb;
    for (std::size_t i = 0; i < a.formals.size(); ++i) {
      const Term z = Term::var(fresh_var("z"));
      ba.emplace(a.formals[i], z);
      bb.emplace(b.formals[i], z);
    }
    x = subst(x, ba);
    y = subst(y, bb);
  }
  if (hooks.normalize) {
    if (alpha_eq(x, y)) return true;
    x = hooks.normalize(x);
    y = hooks.normalize(y);
  }
  return alpha_eq(x, y);
}

Term apply_subst(const Substitution& sigma, const Term& rhs) {
  auto lookup = [&](Name n) -> const Closure* {
    auto it = sigma.find(n);
    return it == sigma.end() ? nullptr : &it->second;
  };
  return Instantiator<decltype(lookup)>(lookup).run(rhs);
}

Term apply_subst(std::span<const std::pair<Name, Closure>> sigma, const Term& rhs) {
  auto lookup = [&](Name n) -> const Closure* {
    for (const auto& [k, c] : sigma) {
      if (k == n) return &c;
    }
    return nullptr;
  };
  return Instantiator<decltype(lookup)>(lookup).run(rhs);
}

std::optional<NaiveMatch> naive_rewrite_head(std::span<const Rule> rules, Symbol head, std::span<const Term> args,
                                             const MatchHooks& hooks) {
  for (const auto& r : rules) {
    if (auto m = try_rule(r, head, args, hooks)) return m;
  }
  return std::nullopt;
}

std::vector<NaiveMatch> naive_all_matches(std::span<const Rule> rules, Symbol head, std::span<const Term> args,
                                          const MatchHooks& hooks) {
  std::vector<NaiveMatch> out;
  for (const auto& r : rules) {
    if (auto m = try_rule(r, head, args, hooks)) out.push_back(std::move(*m));
  }
  return out;
}

}  // namespace rw
