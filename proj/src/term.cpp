#include "rw/term.hpp"

#include <algorithm>
#include <cstddef>
#include <mutex>
#include <new>
#include <ostream>
#include <sstream>

#include "rw/error.hpp"

namespace rw {

namespace {

// Fixed-size block allocator for term nodes. Freed blocks go to the freeing
// thread's cache; a thread's cache is handed to the shared list when it exits.
// Blocks are never returned to the system.
template <std::size_t Size>
class BlockPool {
public:
  static void* allocate() {
    Cache& c = cache();
    if (!c.head) refill(c);
    Block* b = c.head;
    c.head = b->next;
    return b;
  }

  static void deallocate(void* p) {
    Cache& c = cache();
    auto* b = static_cast<Block*>(p);
    b->next = c.head;
    c.head = b;
  }

private:
  struct Block {
    Block* next;
  };
  static constexpr std::size_t kBlock = (std::max(Size, sizeof(Block)) + alignof(std::max_align_t) - 1) /
                                        alignof(std::max_align_t) * alignof(std::max_align_t);
  static constexpr std::size_t kChunkBlocks = 1024;

  struct Cache {
    Block* head = nullptr;
    ~Cache() {
      if (!head) return;
      Block* tail = head;
      while (tail->next) tail = tail->next;
      std::lock_guard lock(shared_mutex());
      tail->next = shared_head();
      shared_head() = head;
    }
  };

  static Cache& cache() {
    thread_local Cache c;
    return c;
  }
  static std::mutex& shared_mutex() {
    static std::mutex m;
    return m;
  }
  static Block*& shared_head() {
    static Block* h = nullptr;
    return h;
  }

  static void refill(Cache& c) {
    {
      std::lock_guard lock(shared_mutex());
      if (shared_head()) {
        c.head = std::exchange(shared_head(), nullptr);
        return;
      }
    }
    auto* chunk = static_cast<std::byte*>(::operator new(kBlock * kChunkBlocks));
    for (std::size_t i = kChunkBlocks; i-- > 0;) {
      auto* b = reinterpret_cast<Block*>(chunk + i * kBlock);
      b->next = c.head;
      c.head = b;
    }
  }
};

using NodePool = BlockPool<sizeof(TermNode)>;

template <class Payload>
const TermNode* make_node(Payload&& p, std::uint64_t mask, bool meta) {
  using P = std::remove_cvref_t<Payload>;
  P payload(std::forward<Payload>(p));
  void* mem = NodePool::allocate();
  return new (mem) TermNode(std::in_place_type<P>, std::move(payload), mask, meta);
}

}  // namespace

void destroy_node(const TermNode* n) noexcept {
  n->~TermNode();
  NodePool::deallocate(const_cast<TermNode*>(n));
}

Term Term::sort(SortKind kind) { return Term(make_node(kind, 0, false)); }

Term Term::var(const Var& v) { return Term(make_node(v, var_bit(v.id), false)); }

Term Term::symb(Symbol s) { return Term(make_node(s, 0, false)); }

Term Term::app(Term fun, Term arg) {
  const auto mask = fun.var_mask() | arg.var_mask();
  const bool meta = fun.has_meta() || arg.has_meta();
  return Term(make_node(AppNode{std::move(fun), std::move(arg)}, mask, meta));
}

Term Term::apps(Term head, std::span<const Term> args) {
  for (const auto& a : args) head = app(std::move(head), a);
  return head;
}

Term Term::abst(const Var& binder, std::optional<Term> domain, Term body) {
  auto mask = body.var_mask() | var_bit(binder.id);
  bool meta = body.has_meta();
  if (domain) {
    mask |= domain->var_mask();
    meta = meta || domain->has_meta();
  }
  return Term(make_node(AbstNode{binder, std::move(domain), std::move(body)}, mask, meta));
}

Term Term::prod(const Var& binder, Term domain, Term codomain) {
  const auto mask = domain.var_mask() | codomain.var_mask() | var_bit(binder.id);
  const bool meta = domain.has_meta() || codomain.has_meta();
  return Term(make_node(ProdNode{binder, std::move(domain), std::move(codomain)}, mask, meta));
}

Term Term::meta(Name pvar, std::vector<Term> args) {
  std::uint64_t mask = 0;
  for (const auto& a : args) mask |= a.var_mask();
  return Term(make_node(MetaNode{pvar, std::move(args)}, mask, true));
}

Spine spine(const Term& t) {
  std::size_t n = 0;
  const Term& head = spine_head(t, &n);
  Spine s{head, {}};
  s.args.reserve(n);
  const Term* cur = &t;
  while (const auto* a = cur->as_app()) {
    s.args.push_back(a->arg);
    cur = &a->fun;
  }
  std::reverse(s.args.begin(), s.args.end());
  return s;
}

const Term& spine_head(const Term& t, std::size_t* nargs) {
  std::size_t n = 0;
  const Term* cur = &t;
  while (const auto* a = cur->as_app()) {
    cur = &a->fun;
    ++n;
  }
  if (nargs) *nargs = n;
  return *cur;
}

namespace {

// Bound variables are kept on a stack so that shadowing by identity is handled.
void collect_free(const Term& t, std::vector<VarId>& bound, VarSet& out, bool allow_meta) {
  if (t.var_mask() == 0 && !t.has_meta()) return;
  switch (t.kind()) {
    case TermKind::Sort:
    case TermKind::Symb:
      return;
    case TermKind::Var: {
      const auto id = t.as_var()->id;
      if (std::find(bound.begin(), bound.end(), id) == bound.end()) out.insert(id);
      return;
    }
    case TermKind::App:
      collect_free(t.as_app()->fun, bound, out, allow_meta);
      collect_free(t.as_app()->arg, bound, out, allow_meta);
      return;
    case TermKind::Abst: {
      const auto* a = t.as_abst();
      if (a->domain) collect_free(*a->domain, bound, out, allow_meta);
      bound.push_back(a->binder.id);
      collect_free(a->body, bound, out, allow_meta);
      bound.pop_back();
      return;
    }
    case TermKind::Prod: {
      const auto* p = t.as_prod();
      collect_free(p->domain, bound, out, allow_meta);
      bound.push_back(p->binder.id);
      collect_free(p->codomain, bound, out, allow_meta);
      bound.pop_back();
      return;
    }
    case TermKind::Meta:
      if (!allow_meta) {
        throw RhsOnlyError("rhs-only construct: metavariable $" + t.as_meta()->pvar.str() +
                           " outside a rule right-hand side");
      }
      for (const auto& a : t.as_meta()->args) collect_free(a, bound, out, allow_meta);
      return;
  }
}

VarSet free_vars_lenient(const Term& t) {
  std::vector<VarId> bound;
  VarSet out;
  collect_free(t, bound, out, true);
  return out;
}

class Substituter {
public:
  explicit Substituter(const Bindings& b) {
    for (const auto& [k, v] : b) {
      auto fv = free_vars_lenient(v);
      range_fv_.insert(fv.begin(), fv.end());
    }
  }

  Term run(const Term& t, const Bindings& m) {
    std::uint64_t keys = 0;
    for (const auto& [k, v] : m) keys |= var_bit(k);
    return go(t, m, keys);
  }

private:
  Term go(const Term& t, const Bindings& m, std::uint64_t keys) {
    if ((t.var_mask() & keys) == 0) return t;
    switch (t.kind()) {
      case TermKind::Sort:
      case TermKind::Symb:
        return t;
      case TermKind::Var: {
        auto it = m.find(t.as_var()->id);
        return it == m.end() ? t : it->second;
      }
      case TermKind::App: {
        const auto* a = t.as_app();
        Term f = go(a->fun, m, keys);
        Term x = go(a->arg, m, keys);
        if (f.same(a->fun) && x.same(a->arg)) return t;
        return Term::app(std::move(f), std::move(x));
      }
      case TermKind::Abst: {
        const auto* a = t.as_abst();
        std::optional<Term> dom;
        if (a->domain) dom = go(*a->domain, m, keys);
        auto [binder, body] = under_binder(a->binder, a->body, m);
        if (binder == a->binder && body.same(a->body) && (!dom || dom->same(*a->domain))) return t;
        return Term::abst(binder, std::move(dom), std::move(body));
      }
      case TermKind::Prod: {
        const auto* p = t.as_prod();
        Term dom = go(p->domain, m, keys);
        auto [binder, cod] = under_binder(p->binder, p->codomain, m);
        if (binder == p->binder && cod.same(p->codomain) && dom.same(p->domain)) return t;
        return Term::prod(binder, std::move(dom), std::move(cod));
      }
      case TermKind::Meta: {
        const auto* mv = t.as_meta();
        std::vector<Term> args;
        args.reserve(mv->args.size());
        bool changed = false;
        for (const auto& a : mv->args) {
          args.push_back(go(a, m, keys));
          changed = changed || !args.back().same(a);
        }
        return changed ? Term::meta(mv->pvar, std::move(args)) : t;
      }
    }
    return t;
  }

  std::pair<Var, Term> under_binder(const Var& x, const Term& body, const Bindings& m) {
    const bool shadows = m.count(x.id) != 0;
    const bool captures = range_fv_.count(x.id) != 0;
    if (!shadows && !captures) {
      std::uint64_t keys = 0;
      for (const auto& [k, v] : m) keys |= var_bit(k);
      return {x, go(body, m, keys)};
    }
    Bindings inner = m;
    inner.erase(x.id);
    Var binder = x;
    if (captures) {
      binder = fresh_var(x.name);
      inner.emplace(x.id, Term::var(binder));
    }
    if (inner.empty()) return {binder, body};
    std::uint64_t keys = 0;
    for (const auto& [k, v] : inner) keys |= var_bit(k);
    return {binder, go(body, inner, keys)};
  }

  VarSet range_fv_;
};

struct AlphaEnv {
  std::vector<VarId> left;
  std::vector<VarId> right;
  std::uint64_t mask = 0;
};

bool alpha_rec(const Term& t, const Term& u, AlphaEnv& env) {
  if (t.same(u) && (env.left.empty() || (t.var_mask() & env.mask) == 0)) return true;
  if (t.kind() != u.kind()) return false;
  switch (t.kind()) {
    case TermKind::Sort:
      return *t.as_sort() == *u.as_sort();
    case TermKind::Symb:
      return *t.as_symb() == *u.as_symb();
    case TermKind::Var: {
      const auto x = t.as_var()->id;
      const auto y = u.as_var()->id;
      const auto n = env.left.size();
      for (std::size_t i = n; i-- > 0;) {
        const bool lx = env.left[i] == x;
        const bool ry = env.right[i] == y;
        if (lx || ry) return lx && ry;
      }
      return x == y;
    }
    case TermKind::App:
      return alpha_rec(t.as_app()->fun, u.as_app()->fun, env) &&
             alpha_rec(t.as_app()->arg, u.as_app()->arg, env);
    case TermKind::Abst: {
      const auto* a = t.as_abst();
      const auto* b = u.as_abst();
      // Domains are annotations; abstraction equality ignores them.
      const auto saved = env.mask;
      env.left.push_back(a->binder.id);
      env.right.push_back(b->binder.id);
      env.mask |= var_bit(a->binder.id) | var_bit(b->binder.id);
      const bool eq = alpha_rec(a->body, b->body, env);
      env.left.pop_back();
      env.right.pop_back();
      env.mask = saved;
      return eq;
    }
    case TermKind::Prod: {
      const auto* a = t.as_prod();
      const auto* b = u.as_prod();
      if (!alpha_rec(a->domain, b->domain, env)) return false;
      const auto saved = env.mask;
      env.left.push_back(a->binder.id);
      env.right.push_back(b->binder.id);
      env.mask |= var_bit(a->binder.id) | var_bit(b->binder.id);
      const bool eq = alpha_rec(a->codomain, b->codomain, env);
      env.left.pop_back();
      env.right.pop_back();
      env.mask = saved;
      return eq;
    }
    case TermKind::Meta: {
      const auto* a = t.as_meta();
      const auto* b = u.as_meta();
      if (a->pvar != b->pvar || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i) {
        if (!alpha_rec(a->args[i], b->args[i], env)) return false;
      }
      return true;
    }
  }
  return false;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h * 0xff51afd7ed558ccdULL;
}

std::uint64_t hash_rec(const Term& t, std::vector<VarId>& bound) {
  switch (t.kind()) {
    case TermKind::Sort:
      return mix(1, static_cast<std::uint64_t>(*t.as_sort()));
    case TermKind::Symb:
      return mix(2, std::hash<std::string>{}(t.as_symb()->str()));
    case TermKind::Var: {
      const auto id = t.as_var()->id;
      for (std::size_t i = bound.size(); i-- > 0;) {
        if (bound[i] == id) return mix(3, bound.size() - 1 - i);
      }
      return mix(4, id.value);
    }
    case TermKind::App:
      return mix(mix(5, hash_rec(t.as_app()->fun, bound)), hash_rec(t.as_app()->arg, bound));
    case TermKind::Abst: {
      bound.push_back(t.as_abst()->binder.id);
      const auto h = mix(6, hash_rec(t.as_abst()->body, bound));
      bound.pop_back();
      return h;
    }
    case TermKind::Prod: {
      auto h = mix(7, hash_rec(t.as_prod()->domain, bound));
      bound.push_back(t.as_prod()->binder.id);
      h = mix(h, hash_rec(t.as_prod()->codomain, bound));
      bound.pop_back();
      return h;
    }
    case TermKind::Meta: {
      auto h = mix(8, std::hash<std::string>{}(t.as_meta()->pvar.str()));
      for (const auto& a : t.as_meta()->args) h = mix(h, hash_rec(a, bound));
      return h;
    }
  }
  return 0;
}

// Immediate subterms addressable by a position component, in order.
std::vector<Term> position_children(const Term& t) {
  std::size_t n = 0;
  spine_head(t, &n);
  if (n > 0) return spine(t).args;
  if (const auto* a = t.as_abst()) return {a->body};
  if (const auto* p = t.as_prod()) return {p->domain, p->codomain};
  if (const auto* m = t.as_meta()) return m->args;
  return {};
}

void positions_rec(const Term& t, std::vector<unsigned>& prefix, std::set<Position>& out) {
  out.insert(Position(prefix));
  const auto kids = position_children(t);
  for (std::size_t i = 0; i < kids.size(); ++i) {
    prefix.push_back(static_cast<unsigned>(i + 1));
    positions_rec(kids[i], prefix, out);
    prefix.pop_back();
  }
}

Term subterm_from(const Term& t, const Position& pos, std::size_t from) {
  Term cur = t;
  for (std::size_t k = from; k < pos.length(); ++k) {
    const unsigned i = pos.word()[k];
    const auto kids = position_children(cur);
    if (i == 0 || i > kids.size()) {
      throw PositionError("invalid position " + pos.to_string() + ": component " + std::to_string(k + 1) +
                          " (" + std::to_string(i) + ") does not address a subterm");
    }
    cur = kids[i - 1];
  }
  return cur;
}

}  // namespace

VarSet free_vars(const Term& t) {
  std::vector<VarId> bound;
  VarSet out;
  collect_free(t, bound, out, false);
  return out;
}

bool occurs_free(VarId x, const Term& t) {
  if ((t.var_mask() & var_bit(x)) == 0) return false;
  return free_vars_lenient(t).count(x) != 0;
}

Term subst(const Term& t, const Bindings& bindings) {
  if (bindings.empty()) return t;
  Substituter s(bindings);
  return s.run(t, bindings);
}

bool alpha_eq(const Term& t, const Term& u) {
  AlphaEnv env;
  return alpha_rec(t, u, env);
}

std::uint64_t alpha_hash(const Term& t) {
  std::vector<VarId> bound;
  return hash_rec(t, bound);
}

std::size_t term_size(const Term& t) {
  switch (t.kind()) {
    case TermKind::App:
      return 1 + term_size(t.as_app()->fun) + term_size(t.as_app()->arg);
    case TermKind::Abst:
      return 1 + term_size(t.as_abst()->body) + (t.as_abst()->domain ? term_size(*t.as_abst()->domain) : 0);
    case TermKind::Prod:
      return 1 + term_size(t.as_prod()->domain) + term_size(t.as_prod()->codomain);
    case TermKind::Meta: {
      std::size_t n = 1;
      for (const auto& a : t.as_meta()->args) n += term_size(a);
      return n;
    }
    default:
      return 1;
  }
}

Position Position::child(unsigned i) const {
  auto w = word_;
  w.push_back(i);
  return Position(std::move(w));
}

bool Position::is_prefix_of(const Position& o) const {
  return word_.size() <= o.word_.size() && std::equal(word_.begin(), word_.end(), o.word_.begin());
}

std::string Position::to_string() const {
  if (word_.empty()) return "ε";
  std::ostringstream os;
  for (std::size_t i = 0; i < word_.size(); ++i) {
    if (i) os << '.';
    os << word_[i];
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Position& p) { return os << p.to_string(); }

Term subterm_at(const Term& t, const Position& pos) { return subterm_from(t, pos, 0); }

Term subterm_at(std::span<const Term> ts, const Position& pos) {
  if (pos.is_root()) throw PositionError("invalid position ε: a sequence of terms has no root subterm");
  const unsigned i = pos.word()[0];
  if (i == 0 || i > ts.size()) {
    throw PositionError("invalid position " + pos.to_string() + ": component 1 (" + std::to_string(i) +
                        ") is outside the sequence of length " + std::to_string(ts.size()));
  }
  return subterm_from(ts[i - 1], pos, 1);
}

std::set<Position> positions(const Term& t) {
  std::set<Position> out;
  std::vector<unsigned> prefix;
  positions_rec(t, prefix, out);
  return out;
}

}  // namespace rw
