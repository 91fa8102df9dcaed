#include "rw/syntax.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_set>

#include "rw/error.hpp"

namespace rw {

namespace {

std::string position_prefix(int line, int column) {
  return std::to_string(line) + ":" + std::to_string(column) + ": ";
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

}  // namespace

ParseError::ParseError(int line_, int column_, std::vector<std::string> expected_, const std::string& found)
    : Error(position_prefix(line_, column_) + "parse error: expected " + join(expected_, " or ") + ", found " + found),
      line(line_),
      column(column_),
      expected(std::move(expected_)) {}

ScopeError::ScopeError(int line_, int column_, const std::string& message)
    : Error(position_prefix(line_, column_) + message), line(line_), column(column_) {}

std::vector<Rule> SourceFile::rules() const {
  std::vector<Rule> out;
  for (const auto& item : items) {
    if (const auto* b = std::get_if<RuleBlock>(&item)) out.insert(out.end(), b->rules.begin(), b->rules.end());
  }
  return out;
}

std::set<Symbol> SourceFile::symbols() const {
  std::set<Symbol> out;
  for (const auto& item : items) {
    if (const auto* d = std::get_if<SymbolDecl>(&item)) out.insert(d->symbol);
  }
  return out;
}

namespace {

// ---------------------------------------------------------------- lexing

enum class Tok {
  Ident,
  Dollar,
  LParen,
  RParen,
  LBrack,
  RBrack,
  Comma,
  Semi,
  Colon,
  Dot,
  Lambda,
  Pi,
  Hook,
  Arrow,
  EqEq,
  Underscore,
  KwSymbol,
  KwRule,
  KwWith,
  KwCompute,
  KwAssert,
  KwType,
  KwKind,
  End,
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Dollar: return "'$'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Lambda: return "'λ'";
    case Tok::Pi: return "'Π'";
    case Tok::Hook: return "'-->'";
    case Tok::Arrow: return "'->'";
    case Tok::EqEq: return "'=='";
    case Tok::Underscore: return "'_'";
    case Tok::KwSymbol: return "'symbol'";
    case Tok::KwRule: return "'rule'";
    case Tok::KwWith: return "'with'";
    case Tok::KwCompute: return "'compute'";
    case Tok::KwAssert: return "'assert'";
    case Tok::KwType: return "'TYPE'";
    case Tok::KwKind: return "'KIND'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

constexpr std::string_view kLambda = "\xCE\xBB";  // λ
constexpr std::string_view kPi = "\xCE\xA0";      // Π

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_delim(char c) {
  switch (c) {
    case '(': case ')': case '[': case ']': case ',': case ';': case ':': case '.': case '$': case '\\':
      return true;
    default:
      return false;
  }
}

Tok classify(const std::string& s) {
  static const std::map<std::string, Tok, std::less<>> words = {
      {"-->", Tok::Hook},         {"\xE2\x86\xAA", Tok::Hook},   {"->", Tok::Arrow},
      {"\xE2\x86\x92", Tok::Arrow}, {"==", Tok::EqEq},           {"_", Tok::Underscore},
      {"symbol", Tok::KwSymbol},  {"rule", Tok::KwRule},         {"with", Tok::KwWith},
      {"compute", Tok::KwCompute}, {"assert", Tok::KwAssert},    {"TYPE", Tok::KwType},
      {"KIND", Tok::KwKind},
  };
  auto it = words.find(s);
  return it == words.end() ? Tok::Ident : it->second;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int column = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      const auto c = static_cast<unsigned char>(src[i]);
      if (c == '\n') {
        ++line;
        column = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++column;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (is_space(c)) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const int l = line;
    const int col = column;
    if (src.substr(i, kLambda.size()) == kLambda) {
      out.push_back({Tok::Lambda, std::string(kLambda), l, col});
      advance(kLambda.size());
      continue;
    }
    if (src.substr(i, kPi.size()) == kPi) {
      out.push_back({Tok::Pi, std::string(kPi), l, col});
      advance(kPi.size());
      continue;
    }
    if (is_delim(c)) {
      static const std::map<char, Tok> delims = {
          {'(', Tok::LParen}, {')', Tok::RParen}, {'[', Tok::LBrack}, {']', Tok::RBrack}, {',', Tok::Comma},
          {';', Tok::Semi},   {':', Tok::Colon},  {'.', Tok::Dot},    {'$', Tok::Dollar}, {'\\', Tok::Lambda},
      };
      out.push_back({delims.at(c), std::string(1, c), l, col});
      advance(1);
      continue;
    }
    std::size_t j = i;
    while (j < src.size() && !is_space(src[j]) && !is_delim(src[j]) && src.substr(j, 2) != "//" &&
           src.substr(j, kLambda.size()) != kLambda && src.substr(j, kPi.size()) != kPi) {
      ++j;
    }
    std::string text(src.substr(i, j - i));
    out.push_back({classify(text), text, l, col});
    advance(j - i);
  }
  out.push_back({Tok::End, "", line, column});
  return out;
}

// ---------------------------------------------------------------- raw syntax

struct Raw;
using RawPtr = std::shared_ptr<const Raw>;

struct Raw {
  enum class Kind { Ident, Meta, Wild, Sort, App, Lam, Pi };
  Kind kind;
  std::string text;          // identifier, metavariable name, or binder (empty for a plain arrow)
  std::vector<RawPtr> kids;  // App: fun, arg. Lam: body [, domain]. Pi: domain, codomain. Meta: args.
  SortKind sort = SortKind::Type;
  int line = 0;
  int column = 0;
};

RawPtr mk(Raw r) { return std::make_shared<const Raw>(std::move(r)); }

class Parser {
public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok t) const { return peek().kind == t; }

  const Token& expect(Tok t) {
    if (!at(t)) fail({tok_name(t)});
    return toks_[pos_++];
  }

  bool accept(Tok t) {
    if (!at(t)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const auto& t = peek();
    const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.column, std::move(expected), found);
  }

  RawPtr term() {
    if (at(Tok::Lambda)) return lam();
    if (at(Tok::Pi)) return pi();
    return arrow();
  }

private:
  bool atom_start() const {
    switch (peek().kind) {
      case Tok::Ident: case Tok::Dollar: case Tok::Underscore: case Tok::LParen: case Tok::KwType: case Tok::KwKind:
        return true;
      default:
        return false;
    }
  }

  RawPtr lam() {
    const Token& kw = expect(Tok::Lambda);
    const Token& x = expect(Tok::Ident);
    RawPtr domain;
    if (accept(Tok::Colon)) domain = arrow();
    if (!accept(Tok::Comma) && !accept(Tok::Dot)) fail({"','", "'.'"});
    std::vector<RawPtr> kids{term()};
    if (domain) kids.push_back(domain);
    return mk(Raw{Raw::Kind::Lam, x.text, std::move(kids), {}, kw.line, kw.column});
  }

  RawPtr pi() {
    const Token& kw = expect(Tok::Pi);
    const Token& x = expect(Tok::Ident);
    expect(Tok::Colon);
    RawPtr domain = arrow();
    if (!accept(Tok::Comma) && !accept(Tok::Dot)) fail({"','", "'.'"});
    return mk(Raw{Raw::Kind::Pi, x.text, {domain, term()}, {}, kw.line, kw.column});
  }

  // `(x : A) -> B`, the ASCII spelling of a dependent product.
  bool binder_group_ahead() const {
    return at(Tok::LParen) && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Colon;
  }

  RawPtr arrow() {
    if (binder_group_ahead()) {
      const Token& open = expect(Tok::LParen);
      const Token& x = expect(Tok::Ident);
      expect(Tok::Colon);
      RawPtr domain = term();
      expect(Tok::RParen);
      expect(Tok::Arrow);
      return mk(Raw{Raw::Kind::Pi, x.text, {domain, term()}, {}, open.line, open.column});
    }
    RawPtr lhs = app();
    if (at(Tok::Arrow)) {
      const Token& a = expect(Tok::Arrow);
      return mk(Raw{Raw::Kind::Pi, "", {lhs, term()}, {}, a.line, a.column});
    }
    return lhs;
  }

  RawPtr app() {
    if (!atom_start()) {
      if (at(Tok::Lambda)) return lam();
      fail({"identifier", "'$'", "'_'", "'('", "'λ'"});
    }
    RawPtr head = atom();
    while (true) {
      if (atom_start() && !binder_group_ahead()) {
        RawPtr a = atom();
        head = mk(Raw{Raw::Kind::App, "", {head, a}, {}, head->line, head->column});
      } else if (at(Tok::Lambda)) {
        RawPtr a = lam();
        return mk(Raw{Raw::Kind::App, "", {head, a}, {}, head->line, head->column});
      } else {
        return head;
      }
    }
  }

  RawPtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident:
        ++pos_;
        return mk(Raw{Raw::Kind::Ident, t.text, {}, {}, t.line, t.column});
      case Tok::Underscore:
        ++pos_;
        return mk(Raw{Raw::Kind::Wild, "_", {}, {}, t.line, t.column});
      case Tok::KwType:
        ++pos_;
        return mk(Raw{Raw::Kind::Sort, "TYPE", {}, SortKind::Type, t.line, t.column});
      case Tok::KwKind:
        ++pos_;
        return mk(Raw{Raw::Kind::Sort, "KIND", {}, SortKind::Kind, t.line, t.column});
      case Tok::Dollar: {
        ++pos_;
        const Token& x = expect(Tok::Ident);
        std::vector<RawPtr> args;
        if (accept(Tok::LBrack)) {
          if (!at(Tok::RBrack)) {
            do {
              args.push_back(term());
            } while (accept(Tok::Comma));
          }
          expect(Tok::RBrack);
        }
        return mk(Raw{Raw::Kind::Meta, x.text, std::move(args), {}, t.line, t.column});
      }
      case Tok::LParen: {
        ++pos_;
        RawPtr inner = term();
        expect(Tok::RParen);
        return inner;
      }
      default:
        fail({"identifier", "'$'", "'_'", "'('"});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- elaboration

struct Binders {
  std::vector<std::pair<std::string, Var>> stack;

  const Var* lookup(const std::string& name) const {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      if (it->first == name) return &it->second;
    }
    return nullptr;
  }
};

class Elaborator {
public:
  explicit Elaborator(const Scope& scope) : scope_(scope) {}

  // Object-level term; metavariables are allowed only when `allow_meta`.
  Term term(const RawPtr& r, Binders& env, bool allow_meta) const {
    switch (r->kind) {
      case Raw::Kind::Ident: {
        if (const Var* v = env.lookup(r->text)) return Term::var(*v);
        return Term::symb(symbol(r));
      }
      case Raw::Kind::Sort:
        return Term::sort(r->sort);
      case Raw::Kind::Wild:
        throw ScopeError(r->line, r->column, "'_' is only allowed in rule left-hand sides");
      case Raw::Kind::Meta: {
        if (!allow_meta) throw ScopeError(r->line, r->column, "pattern variable $" + r->text + " outside a rule");
        std::vector<Term> args;
        for (const auto& a : r->kids) args.push_back(term(a, env, allow_meta));
        return Term::meta(Name(r->text), std::move(args));
      }
      case Raw::Kind::App:
        return Term::app(term(r->kids[0], env, allow_meta), term(r->kids[1], env, allow_meta));
      case Raw::Kind::Lam: {
        std::optional<Term> domain;
        if (r->kids.size() > 1) domain = term(r->kids[1], env, allow_meta);
        const Var x = fresh_var(r->text);
        env.stack.emplace_back(r->text, x);
        Term body = term(r->kids[0], env, allow_meta);
        env.stack.pop_back();
        return Term::abst(x, std::move(domain), std::move(body));
      }
      case Raw::Kind::Pi: {
        Term domain = term(r->kids[0], env, allow_meta);
        const Var x = fresh_var(r->text.empty() ? "_" : r->text);
        if (!r->text.empty()) env.stack.emplace_back(r->text, x);
        Term codomain = term(r->kids[1], env, allow_meta);
        if (!r->text.empty()) env.stack.pop_back();
        return Term::prod(x, std::move(domain), std::move(codomain));
      }
    }
    throw InternalError("unhandled raw term");
  }

  Rule rule(const RawPtr& lhs, const RawPtr& rhs) const {
    std::vector<RawPtr> args;
    RawPtr head = lhs;
    while (head->kind == Raw::Kind::App) {
      args.push_back(head->kids[1]);
      head = head->kids[0];
    }
    std::reverse(args.begin(), args.end());
    const std::string label = "line " + std::to_string(lhs->line);
    if (head->kind != Raw::Kind::Ident) {
      throw ValidationError(label, {Violation{"left-hand side must be headed by a symbol", "ε"}});
    }
    const Symbol f = symbol(head);
    std::vector<Pattern> lhs_args;
    std::vector<Violation> violations;
    Binders env;
    for (std::size_t i = 0; i < args.size(); ++i) {
      lhs_args.push_back(pattern(args[i], env, Position{static_cast<unsigned>(i + 1)}, violations));
    }
    if (!violations.empty()) throw ValidationError(label, std::move(violations));
    Binders rhs_env;
    Rule r{f, std::move(lhs_args), term(rhs, rhs_env, true), label};
    require_valid(r);
    return r;
  }

  Symbol symbol(const RawPtr& r) const {
    Symbol s(r->text);
    if (!scope_.implicit_symbols && !scope_.symbols.count(s)) {
      throw ScopeError(r->line, r->column, "undeclared identifier " + r->text);
    }
    return s;
  }

private:
  Pattern pattern(const RawPtr& r, Binders& env, const Position& pos, std::vector<Violation>& out) const {
    switch (r->kind) {
      case Raw::Kind::Wild:
        return Pattern::wildcard();
      case Raw::Kind::Meta: {
        std::vector<Var> args;
        for (const auto& a : r->kids) {
          const Var* v = a->kind == Raw::Kind::Ident ? env.lookup(a->text) : nullptr;
          if (!v) {
            out.push_back({"argument of $" + r->text + " is not a bound variable", "$" + r->text});
            continue;
          }
          args.push_back(*v);
        }
        return Pattern::var(Name(r->text), std::move(args));
      }
      case Raw::Kind::Lam: {
        const Var x = fresh_var(r->text);
        env.stack.emplace_back(r->text, x);
        Pattern body = pattern(r->kids[0], env, pos.child(1), out);
        env.stack.pop_back();
        return Pattern::abst(x, std::move(body));
      }
      case Raw::Kind::Ident:
      case Raw::Kind::App: {
        std::vector<RawPtr> args;
        RawPtr head = r;
        while (head->kind == Raw::Kind::App) {
          args.push_back(head->kids[1]);
          head = head->kids[0];
        }
        std::reverse(args.begin(), args.end());
        if (head->kind == Raw::Kind::Meta) {
          out.push_back({"pattern variable $" + head->text + " applied to arguments", pos.to_string()});
          return Pattern::wildcard();
        }
        if (head->kind != Raw::Kind::Ident) {
          out.push_back({"unsupported pattern head", pos.to_string()});
          return Pattern::wildcard();
        }
        if (env.lookup(head->text)) {
          out.push_back({"bound variable " + head->text + " used as a pattern", pos.to_string()});
          return Pattern::wildcard();
        }
        const Symbol f = symbol(head);
        std::vector<Pattern> ps;
        for (std::size_t i = 0; i < args.size(); ++i) {
          ps.push_back(pattern(args[i], env, pos.child(static_cast<unsigned>(i + 1)), out));
        }
        return Pattern::symb(f, std::move(ps));
      }
      case Raw::Kind::Sort:
      case Raw::Kind::Pi:
        out.push_back({"sorts and products cannot be matched", pos.to_string()});
        return Pattern::wildcard();
    }
    throw InternalError("unhandled raw pattern");
  }

  const Scope& scope_;
};

}  // namespace

SourceFile parse_file(std::string_view text) {
  Parser p(text);
  Scope scope;
  SourceFile file;
  while (!p.at(Tok::End)) {
    const Token start = p.peek();
    switch (start.kind) {
      case Tok::KwSymbol: {
        p.expect(Tok::KwSymbol);
        const Token name = p.expect(Tok::Ident);
        std::optional<Term> type;
        if (p.accept(Tok::Colon)) {
          RawPtr raw = p.term();
          Scope with_self = scope;
          with_self.symbols.insert(Symbol(name.text));
          Binders env;
          type = Elaborator(with_self).term(raw, env, false);
        }
        p.expect(Tok::Semi);
        Symbol s(name.text);
        if (!scope.symbols.insert(s).second) {
          throw ScopeError(name.line, name.column, "symbol " + name.text + " is already declared");
        }
        file.items.push_back(SymbolDecl{s, std::move(type), start.line});
        break;
      }
      case Tok::KwRule: {
        p.expect(Tok::KwRule);
        RuleBlock block{{}, start.line};
        do {
          RawPtr lhs = p.term();
          p.expect(Tok::Hook);
          RawPtr rhs = p.term();
          block.rules.push_back(Elaborator(scope).rule(lhs, rhs));
        } while (p.accept(Tok::KwWith));
        p.expect(Tok::Semi);
        file.items.push_back(std::move(block));
        break;
      }
      case Tok::KwCompute: {
        p.expect(Tok::KwCompute);
        RawPtr raw = p.term();
        p.expect(Tok::Semi);
        Binders env;
        file.items.push_back(Compute{Elaborator(scope).term(raw, env, false), start.line});
        break;
      }
      case Tok::KwAssert: {
        p.expect(Tok::KwAssert);
        RawPtr lhs = p.term();
        p.expect(Tok::EqEq);
        RawPtr rhs = p.term();
        p.expect(Tok::Semi);
        Binders env;
        const Elaborator el(scope);
        Term l = el.term(lhs, env, false);
        Term r = el.term(rhs, env, false);
        file.items.push_back(Assert{std::move(l), std::move(r), start.line});
        break;
      }
      default:
        p.fail({"'symbol'", "'rule'", "'compute'", "'assert'"});
    }
  }
  return file;
}

Term parse_term(std::string_view text, const Scope& scope) {
  Parser p(text);
  RawPtr raw = p.term();
  if (!p.at(Tok::End)) p.fail({"end of input"});
  Binders env;
  return Elaborator(scope).term(raw, env, false);
}

// ---------------------------------------------------------------- printing

namespace {

// Symbol names and display names of free variables: binders must avoid them.
void reserved_names(const Term& t, std::set<VarId>& bound, std::unordered_set<std::string>& out) {
  switch (t.kind()) {
    case TermKind::Symb: out.insert(t.as_symb()->str()); return;
    case TermKind::Var:
      if (!bound.count(t.as_var()->id)) out.insert(t.as_var()->name.str());
      return;
    case TermKind::App:
      reserved_names(t.as_app()->fun, bound, out);
      reserved_names(t.as_app()->arg, bound, out);
      return;
    case TermKind::Abst: {
      const auto* a = t.as_abst();
      if (a->domain) reserved_names(*a->domain, bound, out);
      const bool added = bound.insert(a->binder.id).second;
      reserved_names(a->body, bound, out);
      if (added) bound.erase(a->binder.id);
      return;
    }
    case TermKind::Prod: {
      const auto* p = t.as_prod();
      reserved_names(p->domain, bound, out);
      const bool added = bound.insert(p->binder.id).second;
      reserved_names(p->codomain, bound, out);
      if (added) bound.erase(p->binder.id);
      return;
    }
    case TermKind::Meta:
      for (const auto& a : t.as_meta()->args) reserved_names(a, bound, out);
      return;
    case TermKind::Sort: return;
  }
}

bool printable_ident(const std::string& s) {
  if (s.empty() || classify(s) != Tok::Ident || s.find("//") != std::string::npos) return false;
  if (s.find(kLambda) != std::string::npos || s.find(kPi) != std::string::npos) return false;
  return std::none_of(s.begin(), s.end(), [](char c) { return is_space(c) || is_delim(c); });
}

class Printer {
public:
  Printer(PrintOptions opts, std::unordered_set<std::string> taken) : opts_(opts), taken_(std::move(taken)) {}

  // level 0: anything; 1: application or tighter; 2: atom.
  void print(const Term& t, int level, std::string& out) {
    switch (t.kind()) {
      case TermKind::Sort:
        out += *t.as_sort() == SortKind::Type ? "TYPE" : "KIND";
        return;
      case TermKind::Symb:
        out += t.as_symb()->str();
        return;
      case TermKind::Var: {
        auto it = names_.find(t.as_var()->id);
        out += it != names_.end() ? it->second : t.as_var()->name.str();
        return;
      }
      case TermKind::Meta: {
        const auto* m = t.as_meta();
        out += "$" + m->pvar.str();
        if (!m->args.empty()) {
          out += "[";
          for (std::size_t i = 0; i < m->args.size(); ++i) {
            if (i) out += ", ";
            print(m->args[i], 0, out);
          }
          out += "]";
        }
        return;
      }
      case TermKind::App: {
        if (level >= 2) out += "(";
        const Spine sp = spine(t);
        print(sp.head, 2, out);
        for (const auto& a : sp.args) {
          out += " ";
          print(a, 2, out);
        }
        if (level >= 2) out += ")";
        return;
      }
      case TermKind::Abst: {
        if (level >= 1) out += "(";
        const auto* a = t.as_abst();
        const std::string x = bind(a->binder);
        out += (opts_.unicode ? std::string(kLambda) : std::string("\\")) + x;
        if (a->domain) {
          out += " : ";
          print(*a->domain, 1, out);
        }
        out += ", ";
        print(a->body, 0, out);
        unbind(a->binder, x);
        if (level >= 1) out += ")";
        return;
      }
      case TermKind::Prod: {
        if (level >= 1) out += "(";
        const auto* p = t.as_prod();
        const bool dependent = occurs_in(p->binder.id, p->codomain);
        if (!dependent) {
          print(p->domain, 1, out);
          out += opts_.unicode ? " \xE2\x86\x92 " : " -> ";
          print(p->codomain, 0, out);
        } else {
          const std::string x = bind(p->binder);
          if (opts_.unicode) {
            out += std::string(kPi) + x + " : ";
            print(p->domain, 1, out);
            out += ", ";
          } else {
            out += "(" + x + " : ";
            print(p->domain, 0, out);
            out += ") -> ";
          }
          print(p->codomain, 0, out);
          unbind(p->binder, x);
        }
        if (level >= 1) out += ")";
        return;
      }
    }
  }

private:
  static bool occurs_in(VarId x, const Term& t) {
    if (!(t.var_mask() & var_bit(x))) return false;
    switch (t.kind()) {
      case TermKind::Var: return t.as_var()->id == x;
      case TermKind::App: return occurs_in(x, t.as_app()->fun) || occurs_in(x, t.as_app()->arg);
      case TermKind::Abst:
        return (t.as_abst()->domain && occurs_in(x, *t.as_abst()->domain)) || occurs_in(x, t.as_abst()->body);
      case TermKind::Prod: return occurs_in(x, t.as_prod()->domain) || occurs_in(x, t.as_prod()->codomain);
      case TermKind::Meta:
        return std::any_of(t.as_meta()->args.begin(), t.as_meta()->args.end(),
                           [&](const Term& a) { return occurs_in(x, a); });
      default: return false;
    }
  }

  std::string bind(const Var& v) {
    std::string base = v.name.str();
    if (!printable_ident(base)) base = "x";
    std::string name = base;
    for (unsigned k = 1; in_scope_.count(name) || taken_.count(name) || !printable_ident(name); ++k) {
      name = base + std::to_string(k);
    }
    in_scope_.insert(name);
    names_[v.id] = name;
    return name;
  }

  void unbind(const Var& v, const std::string& name) {
    in_scope_.erase(name);
    names_.erase(v.id);
  }

  PrintOptions opts_;
  std::unordered_set<std::string> taken_;
  std::unordered_set<std::string> in_scope_;
  std::map<VarId, std::string> names_;
};

}  // namespace

std::string print_term(const Term& t, PrintOptions opts) {
  std::set<VarId> bound;
  std::unordered_set<std::string> taken;
  reserved_names(t, bound, taken);
  std::string out;
  Printer(opts, std::move(taken)).print(t, 0, out);
  return out;
}

namespace {

void print_pat(const Pattern& p, int level, const PrintOptions& opts, std::string& out) {
  if (const auto* v = p.as_var()) {
    if (!v->name) {
      out += "_";
      return;
    }
    out += "$" + v->name->str();
    if (!v->args.empty()) {
      out += "[";
      for (std::size_t i = 0; i < v->args.size(); ++i) {
        if (i) out += ", ";
        out += v->args[i].name.str();
      }
      out += "]";
    }
    return;
  }
  if (const auto* s = p.as_symb()) {
    const bool parens = level >= 2 && !s->args.empty();
    if (parens) out += "(";
    out += s->symbol.str();
    for (const auto& a : s->args) {
      out += " ";
      print_pat(a, 2, opts, out);
    }
    if (parens) out += ")";
    return;
  }
  const auto* a = p.as_abst();
  if (level >= 1) out += "(";
  out += (opts.unicode ? std::string(kLambda) : std::string("\\")) + a->binder.name.str() + ", ";
  print_pat(a->body, 0, opts, out);
  if (level >= 1) out += ")";
}

}  // namespace

std::string print_pattern(const Pattern& p, PrintOptions opts) {
  std::string out;
  print_pat(p, 0, opts, out);
  return out;
}

std::string print_rule(const Rule& r, PrintOptions opts) {
  std::string out = r.head.str();
  for (const auto& a : r.lhs_args) {
    out += " ";
    print_pat(a, 2, opts, out);
  }
  out += opts.unicode ? " \xE2\x86\xAA " : " --> ";
  out += print_term(r.rhs, opts);
  return out;
}

}  // namespace rw
