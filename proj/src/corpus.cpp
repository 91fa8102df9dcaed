#include "rw/corpus.hpp"

#include <regex>
#include <stdexcept>
#include <string>

namespace rw {

namespace {

Pattern pv(std::string_view name) { return Pattern::var(name); }
Pattern ps(std::string_view f, std::vector<Pattern> args = {}) { return Pattern::symb(f, std::move(args)); }
Term mv(std::string_view name) { return Term::meta(Name(name)); }
Term sy(std::string_view f) { return Term::symb(f); }

Rule rule(std::string_view head, std::vector<Pattern> lhs, Term rhs, std::string label) {
  return Rule{Symbol(head), std::move(lhs), std::move(rhs), std::move(label)};
}

void declare(SourceFile& f, std::initializer_list<std::string_view> names) {
  for (auto n : names) f.items.push_back(SymbolDecl{Symbol(n), std::nullopt, 0});
}

}  // namespace

Term unary(unsigned n) {
  Term t = sy("0");
  const Term s = sy("s");
  for (unsigned i = 0; i < n; ++i) t = Term::app(s, t);
  return t;
}

std::optional<unsigned> from_unary(const Term& t) {
  static const Symbol zero("0");
  static const Symbol succ("s");
  unsigned n = 0;
  const Term* cur = &t;
  while (const auto* a = cur->as_app()) {
    const auto* f = a->fun.as_symb();
    if (!f || *f != succ) return std::nullopt;
    ++n;
    cur = &a->arg;
  }
  const auto* z = cur->as_symb();
  if (!z || *z != zero) return std::nullopt;
  return n;
}

SourceFile fib_corpus(unsigned k) {
  SourceFile f;
  declare(f, {"0", "s", "+", "fib"});
  RuleBlock plus;
  plus.rules.push_back(rule("+", {ps("0"), pv("m")}, mv("m"), "plus-zero"));
  plus.rules.push_back(rule("+", {ps("s", {pv("n")}), pv("m")},
                            Term::app(sy("s"), Term::apps(sy("+"), {mv("n"), mv("m")})), "plus-succ"));
  f.items.push_back(std::move(plus));
  RuleBlock fib;
  fib.rules.push_back(rule("fib", {ps("0")}, sy("0"), "fib-zero"));
  fib.rules.push_back(rule("fib", {ps("s", {ps("0")})}, Term::app(sy("s"), sy("0")), "fib-one"));
  fib.rules.push_back(rule("fib", {ps("s", {ps("s", {pv("n")})})},
                           Term::apps(sy("+"), {Term::app(sy("fib"), Term::app(sy("s"), mv("n"))),
                                                Term::app(sy("fib"), mv("n"))}),
                           "fib-step"));
  f.items.push_back(std::move(fib));
  f.items.push_back(Compute{Term::app(sy("fib"), unary(k)), 0});
  return f;
}

SourceFile dispatch_corpus(unsigned k, unsigned m) {
  if (k == 0) throw std::invalid_argument("dispatch needs at least one constructor");
  SourceFile f;
  declare(f, {"a", "b", "tt", "ff", "g", "pair", "nil"});
  for (unsigned i = 0; i < k; ++i) f.items.push_back(SymbolDecl{Symbol("c" + std::to_string(i)), std::nullopt, 0});
  RuleBlock rules;
  for (unsigned i = 0; i < k; ++i) {
    const std::string c = "c" + std::to_string(i);
    rules.rules.push_back(rule("g", {ps(c), ps("a")}, sy("tt"), "g-" + c));
  }
  rules.rules.push_back(rule("g", {pv("x"), pv("y")}, sy("ff"), "g-default"));
  f.items.push_back(std::move(rules));

  // Leaf j scrutinizes c_{(j*7919) mod K}; every third leaf takes the default rule.
  std::vector<Term> level;
  level.reserve(m);
  for (unsigned j = 0; j < m; ++j) {
    const std::string c = "c" + std::to_string((static_cast<unsigned long long>(j) * 7919ULL) % k);
    level.push_back(Term::apps(sy("g"), {sy(c), sy(j % 3 == 0 ? "b" : "a")}));
  }
  if (level.empty()) level.push_back(sy("nil"));
  while (level.size() > 1) {
    std::vector<Term> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(Term::apps(sy("pair"), {level[i], level[i + 1]}));
    if (level.size() % 2) next.push_back(level.back());
    level = std::move(next);
  }
  f.items.push_back(Compute{level.front(), 0});
  return f;
}

SourceFile revnat_corpus(unsigned k) {
  SourceFile f;
  declare(f, {"0", "s", "nil", "cons", "app", "rev", "gen"});
  RuleBlock app;
  app.rules.push_back(rule("app", {ps("nil"), pv("l")}, mv("l"), "app-nil"));
  app.rules.push_back(rule("app", {ps("cons", {pv("x"), pv("xs")}), pv("l")},
                           Term::apps(sy("cons"), {mv("x"), Term::apps(sy("app"), {mv("xs"), mv("l")})}), "app-cons"));
  f.items.push_back(std::move(app));
  RuleBlock rev;
  rev.rules.push_back(rule("rev", {ps("nil")}, sy("nil"), "rev-nil"));
  rev.rules.push_back(rule("rev", {ps("cons", {pv("x"), pv("xs")})},
                           Term::apps(sy("app"), {Term::app(sy("rev"), mv("xs")),
                                                  Term::apps(sy("cons"), {mv("x"), sy("nil")})}),
                           "rev-cons"));
  f.items.push_back(std::move(rev));
  RuleBlock gen;
  gen.rules.push_back(rule("gen", {ps("0")}, sy("nil"), "gen-zero"));
  gen.rules.push_back(rule("gen", {ps("s", {pv("n")})},
                           Term::apps(sy("cons"), {Term::app(sy("s"), mv("n")), Term::app(sy("gen"), mv("n"))}),
                           "gen-succ"));
  f.items.push_back(std::move(gen));
  f.items.push_back(Compute{Term::app(sy("rev"), Term::app(sy("gen"), unary(k))), 0});
  return f;
}

std::optional<SourceFile> builtin_corpus(std::string_view spec) {
  static const std::regex re(R"(^\s*(fib|dispatch|revnat)\s*\(\s*([^)]*)\)\s*$)");
  std::cmatch m;
  if (!std::regex_match(spec.begin(), spec.end(), m, re)) return std::nullopt;
  const std::string name = m[1].str();
  std::vector<unsigned long> params;
  static const std::regex num(R"(\s*([0-9]+(?:e[0-9]+)?)\s*)");
  std::string rest = m[2].str();
  std::size_t start = 0;
  while (start <= rest.size()) {
    const std::size_t comma = rest.find(',', start);
    const std::string part = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::smatch pm;
    if (!std::regex_match(part, pm, num)) throw std::invalid_argument("bad parameter '" + part + "' in " + name);
    params.push_back(static_cast<unsigned long>(std::stod(pm[1].str())));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  auto arity = [&](std::size_t n) {
    if (params.size() != n) {
      throw std::invalid_argument(name + " expects " + std::to_string(n) + " parameter" + (n == 1 ? "" : "s"));
    }
  };
  if (name == "fib") {
    arity(1);
    return fib_corpus(static_cast<unsigned>(params[0]));
  }
  if (name == "dispatch") {
    arity(2);
    return dispatch_corpus(static_cast<unsigned>(params[0]), static_cast<unsigned>(params[1]));
  }
  arity(1);
  return revnat_corpus(static_cast<unsigned>(params[0]));
}

}  // namespace rw
