#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rw/names.hpp"

namespace rw {

enum class SortKind : std::uint8_t { Type, Kind };
enum class TermKind : std::uint8_t { Sort, Var, Symb, App, Abst, Prod, Meta };

struct TermNode;
struct AppNode;
struct AbstNode;
struct ProdNode;
struct MetaNode;

// Immutable, reference-counted λ-term. Copying a Term copies a pointer.
// Reference counts are not atomic: a term, and every term sharing structure
// with it, belongs to one thread at a time.
class Term {
public:
  Term(const Term& o) noexcept : node_(o.node_) { retain(); }
  Term(Term&& o) noexcept : node_(std::exchange(o.node_, nullptr)) {}
  Term& operator=(const Term& o) noexcept {
    Term tmp(o);
    std::swap(node_, tmp.node_);
    return *this;
  }
  Term& operator=(Term&& o) noexcept {
    Term tmp(std::move(o));
    std::swap(node_, tmp.node_);
    return *this;
  }
  ~Term() { release(); }

  static Term sort(SortKind kind);
  static Term var(const Var& v);
  static Term symb(Symbol s);
  static Term symb(std::string_view name) { return symb(Symbol(name)); }
  static Term app(Term fun, Term arg);
  // Left-nested application head a1 ... an.
  static Term apps(Term head, std::span<const Term> args);
  static Term apps(Term head, std::initializer_list<Term> args) {
    return apps(std::move(head), std::span<const Term>(args.begin(), args.size()));
  }
  static Term abst(const Var& binder, std::optional<Term> domain, Term body);
  static Term prod(const Var& binder, Term domain, Term codomain);
  // Metavariable application $x[args]; only meaningful inside rule right-hand sides.
  static Term meta(Name pvar, std::vector<Term> args = {});

  TermKind kind() const;

  const SortKind* as_sort() const;
  const Var* as_var() const;
  const Symbol* as_symb() const;
  const AppNode* as_app() const;
  const AbstNode* as_abst() const;
  const ProdNode* as_prod() const;
  const MetaNode* as_meta() const;

  // Over-approximation of the variables occurring in the term, one bit per
  // (id mod 64). Zero means the term mentions no variable at all.
  std::uint64_t var_mask() const;
  bool has_meta() const;

  // Physical identity.
  bool same(const Term& o) const { return node_ == o.node_; }
  const TermNode* node() const { return node_; }

private:
  // Adopts a freshly built node whose count is already 1.
  explicit Term(const TermNode* n) noexcept : node_(n) {}
  void retain() const noexcept;
  void release() noexcept;

  const TermNode* node_;
};

struct AppNode {
  Term fun;
  Term arg;
};

struct AbstNode {
  Var binder;
  std::optional<Term> domain;
  Term body;
};

struct ProdNode {
  Var binder;
  Term domain;
  Term codomain;
};

struct MetaNode {
  Name pvar;
  std::vector<Term> args;
};

struct TermNode {
  template <class Payload>
  TermNode(std::in_place_type_t<Payload> tag, Payload&& p, std::uint64_t mask, bool meta)
      : data(tag, std::move(p)), var_mask(mask), has_meta(meta) {}

  std::variant<SortKind, Var, Symbol, AppNode, AbstNode, ProdNode, MetaNode> data;
  std::uint64_t var_mask = 0;
  bool has_meta = false;
  mutable std::uint32_t refs = 1;
};

void destroy_node(const TermNode* n) noexcept;

inline void Term::retain() const noexcept {
  if (node_) ++node_->refs;
}
inline void Term::release() noexcept {
  if (node_ && --node_->refs == 0) destroy_node(node_);
}

inline TermKind Term::kind() const { return static_cast<TermKind>(node_->data.index()); }
inline const SortKind* Term::as_sort() const { return std::get_if<SortKind>(&node_->data); }
inline const Var* Term::as_var() const { return std::get_if<Var>(&node_->data); }
inline const Symbol* Term::as_symb() const { return std::get_if<Symbol>(&node_->data); }
inline const AppNode* Term::as_app() const { return std::get_if<AppNode>(&node_->data); }
inline const AbstNode* Term::as_abst() const { return std::get_if<AbstNode>(&node_->data); }
inline const ProdNode* Term::as_prod() const { return std::get_if<ProdNode>(&node_->data); }
inline const MetaNode* Term::as_meta() const { return std::get_if<MetaNode>(&node_->data); }
inline std::uint64_t Term::var_mask() const { return node_->var_mask; }
inline bool Term::has_meta() const { return node_->has_meta; }

inline std::uint64_t var_bit(VarId id) { return std::uint64_t{1} << (id.value & 63U); }

// Head and argument sequence of a left-nested application.
struct Spine {
  Term head;
  std::vector<Term> args;
};
Spine spine(const Term& t);
// Head of the spine without materializing arguments; *nargs receives the count.
const Term& spine_head(const Term& t, std::size_t* nargs = nullptr);

using VarSet = std::set<VarId>;
using Bindings = std::map<VarId, Term>;

// Free variables. Throws RhsOnlyError on metavariable applications.
VarSet free_vars(const Term& t);
bool occurs_free(VarId x, const Term& t);

// Simultaneous capture-avoiding substitution.
Term subst(const Term& t, const Bindings& bindings);

bool alpha_eq(const Term& t, const Term& u);

// Hash compatible with alpha_eq: α-equivalent terms hash identically.
std::uint64_t alpha_hash(const Term& t);

std::size_t term_size(const Term& t);

// Word over positive integers; the empty word is the root position.
class Position {
public:
  Position() = default;
  Position(std::initializer_list<unsigned> word) : word_(word) {}
  explicit Position(std::vector<unsigned> word) : word_(std::move(word)) {}

  const std::vector<unsigned>& word() const { return word_; }
  bool is_root() const { return word_.empty(); }
  std::size_t length() const { return word_.size(); }

  Position child(unsigned i) const;
  bool is_prefix_of(const Position& o) const;

  // "ε" for the root, dot-separated components otherwise ("2.1.1").
  std::string to_string() const;

  bool operator==(const Position&) const = default;
  auto operator<=>(const Position&) const = default;

private:
  std::vector<unsigned> word_;
};

std::ostream& operator<<(std::ostream& os, const Position& p);

// Subterm addressing: an argument i of a spine is at i, the body of an
// abstraction at 1, the domain and codomain of a product at 1 and 2.
Term subterm_at(const Term& t, const Position& pos);
// Sequence form: the first component selects the element.
Term subterm_at(std::span<const Term> ts, const Position& pos);
std::set<Position> positions(const Term& t);

}  // namespace rw
