#include "rw/matrix.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace rw {

NlConstraint::NlConstraint(Position a_, Position b_, std::vector<Position> fa, std::vector<Position> fb)
    : a(std::move(a_)), b(std::move(b_)), formals_a(std::move(fa)), formals_b(std::move(fb)) {
  if (std::tie(b, formals_b) < std::tie(a, formals_a)) {
    std::swap(a, b);
    std::swap(formals_a, formals_b);
  }
}

bool ClauseRow::all_wildcards() const {
  return std::all_of(patterns.begin(), patterns.end(), [](const Pattern& p) { return p.as_var() != nullptr; });
}

namespace {

struct Occurrence {
  Position pos;
  std::vector<VarId> formals;
  std::vector<Position> formal_binders;
};

struct Binder {
  VarId id;
  Position at;  // position of the abstraction introducing it
};

// Replaces pattern variables by wildcards and records their occurrences.
Pattern encode(const Pattern& p, const Position& pos, std::vector<Binder>& scope,
               std::map<Name, std::vector<Occurrence>>& occ, std::vector<ClConstraint>& cl) {
  if (const auto* v = p.as_var()) {
    std::vector<VarId> formals;
    std::vector<Position> binders;
    for (const auto& y : v->args) {
      formals.push_back(y.id);
      auto it = std::find_if(scope.rbegin(), scope.rend(), [&](const Binder& b) { return b.id == y.id; });
      if (it == scope.rend()) throw std::invalid_argument("pattern variable argument is not bound: " + y.name.str());
      binders.push_back(it->at);
    }
    // Restrictive only when some binder in scope is not among the arguments.
    const bool restrictive = std::any_of(scope.begin(), scope.end(), [&](const Binder& b) {
      return std::find(formals.begin(), formals.end(), b.id) == formals.end();
    });
    if (restrictive) {
      std::vector<Position> allowed = binders;
      std::sort(allowed.begin(), allowed.end());
      cl.push_back(ClConstraint{pos, formals, std::move(allowed)});
    }
    if (v->name) occ[*v->name].push_back(Occurrence{pos, std::move(formals), std::move(binders)});
    return Pattern::wildcard();
  }
  if (const auto* s = p.as_symb()) {
    std::vector<Pattern> args;
    args.reserve(s->args.size());
    for (std::size_t i = 0; i < s->args.size(); ++i) {
      args.push_back(encode(s->args[i], pos.child(static_cast<unsigned>(i + 1)), scope, occ, cl));
    }
    return Pattern::symb(s->symbol, std::move(args));
  }
  const auto* a = p.as_abst();
  scope.push_back(Binder{a->binder.id, pos});
  Pattern body = encode(a->body, pos.child(1), scope, occ, cl);
  scope.pop_back();
  return Pattern::abst(a->binder, std::move(body));
}

void rhs_vars(const Term& t, std::vector<Name>& out) {
  if (!t.has_meta()) return;
  switch (t.kind()) {
    case TermKind::App:
      rhs_vars(t.as_app()->fun, out);
      rhs_vars(t.as_app()->arg, out);
      return;
    case TermKind::Abst:
      if (t.as_abst()->domain) rhs_vars(*t.as_abst()->domain, out);
      rhs_vars(t.as_abst()->body, out);
      return;
    case TermKind::Prod:
      rhs_vars(t.as_prod()->domain, out);
      rhs_vars(t.as_prod()->codomain, out);
      return;
    case TermKind::Meta:
      if (std::find(out.begin(), out.end(), t.as_meta()->pvar) == out.end()) out.push_back(t.as_meta()->pvar);
      for (const auto& a : t.as_meta()->args) rhs_vars(a, out);
      return;
    default:
      return;
  }
}

ClauseRow with_patterns(const ClauseRow& r, std::vector<Pattern> ps) {
  ClauseRow out = r;
  out.patterns = std::move(ps);
  return out;
}

template <class Pred>
ClauseMatrix keep_rows(const ClauseMatrix& m, Pred keep) {
  ClauseMatrix out{{}, m.width};
  for (const auto& r : m.rows) {
    if (keep(r)) out.rows.push_back(r);
  }
  return out;
}

}  // namespace

ClauseMatrix from_rules(Symbol head, std::span<const Rule> rules) {
  ClauseMatrix m;
  if (rules.empty()) return m;
  m.width = rules.front().arity();
  for (std::size_t ri = 0; ri < rules.size(); ++ri) {
    const auto& rule = rules[ri];
    if (rule.head != head) throw std::invalid_argument("rule " + rule.label + " is not headed by " + head.str());
    if (rule.arity() != m.width) {
      throw std::invalid_argument("rule " + rule.label + " has arity " + std::to_string(rule.arity()) +
                                  ", expected " + std::to_string(m.width));
    }
    ClauseRow row{{}, {}, {}, {}, rule.rhs, rule.label, ri};
    std::map<Name, std::vector<Occurrence>> occ;
    std::vector<Binder> scope;
    for (std::size_t i = 0; i < rule.lhs_args.size(); ++i) {
      row.patterns.push_back(encode(rule.lhs_args[i], Position{static_cast<unsigned>(i + 1)}, scope, occ, row.cl));
    }
    for (const auto& [name, list] : occ) {
      for (std::size_t i = 0; i < list.size(); ++i) {
        for (std::size_t j = i + 1; j < list.size(); ++j) {
          row.nl.emplace_back(list[i].pos, list[j].pos, list[i].formal_binders, list[j].formal_binders);
        }
      }
    }
    std::vector<Name> used;
    rhs_vars(rule.rhs, used);
    for (const auto& name : used) {
      auto it = occ.find(name);
      if (it == occ.end()) throw std::invalid_argument("rule " + rule.label + ": unbound rhs variable $" + name.str());
      const auto& first = it->second.front();
      row.env.emplace_back(name, EnvBinding{first.pos, first.formals, first.formal_binders});
    }
    m.rows.push_back(std::move(row));
  }
  return m;
}

ClauseMatrix specialise(Symbol f, std::size_t arity, const ClauseMatrix& m) {
  ClauseMatrix out{{}, m.width - 1 + arity};
  for (const auto& r : m.rows) {
    const auto& first = r.patterns.front();
    std::vector<Pattern> ps;
    ps.reserve(out.width);
    if (const auto* s = first.as_symb()) {
      if (s->symbol != f || s->args.size() != arity) continue;
      ps.insert(ps.end(), s->args.begin(), s->args.end());
    } else if (first.as_var()) {
      ps.insert(ps.end(), arity, Pattern::wildcard());
    } else {
      continue;
    }
    ps.insert(ps.end(), r.patterns.begin() + 1, r.patterns.end());
    out.rows.push_back(with_patterns(r, std::move(ps)));
  }
  return out;
}

ClauseMatrix spec_lambda(const ClauseMatrix& m) {
  ClauseMatrix out{{}, m.width};
  for (const auto& r : m.rows) {
    const auto& first = r.patterns.front();
    std::vector<Pattern> ps;
    if (const auto* a = first.as_abst()) {
      ps.push_back(a->body);
    } else if (first.as_var()) {
      ps.push_back(Pattern::wildcard());
    } else {
      continue;
    }
    ps.insert(ps.end(), r.patterns.begin() + 1, r.patterns.end());
    out.rows.push_back(with_patterns(r, std::move(ps)));
  }
  return out;
}

ClauseMatrix spec_default(const ClauseMatrix& m) {
  ClauseMatrix out{{}, m.width - 1};
  for (const auto& r : m.rows) {
    if (!r.patterns.front().as_var()) continue;
    out.rows.push_back(with_patterns(r, std::vector<Pattern>(r.patterns.begin() + 1, r.patterns.end())));
  }
  return out;
}

ClauseMatrix cond_succ(const ConstraintKey& k, const ClauseMatrix& m) {
  ClauseMatrix out = m;
  for (auto& r : out.rows) {
    if (const auto* nl = std::get_if<NlConstraint>(&k)) {
      std::erase(r.nl, *nl);
    } else {
      std::erase(r.cl, std::get<ClConstraint>(k));
    }
  }
  return out;
}

ClauseMatrix cond_fail(const ConstraintKey& k, const ClauseMatrix& m) {
  return keep_rows(m, [&](const ClauseRow& r) {
    if (const auto* nl = std::get_if<NlConstraint>(&k)) {
      return std::find(r.nl.begin(), r.nl.end(), *nl) == r.nl.end();
    }
    const auto& cl = std::get<ClConstraint>(k);
    return std::find(r.cl.begin(), r.cl.end(), cl) == r.cl.end();
  });
}

ClauseMatrix swap_columns(const ClauseMatrix& m, std::size_t i) {
  if (i < 1 || i > m.width) throw std::out_of_range("swap column " + std::to_string(i) + " out of range");
  ClauseMatrix out = m;
  for (auto& r : out.rows) std::swap(r.patterns[0], r.patterns[i - 1]);
  return out;
}

}  // namespace rw
