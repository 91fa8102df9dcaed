#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rw/dtree.hpp"
#include "rw/pattern.hpp"
#include "rw/term.hpp"

namespace rw {

enum class Strategy { Whnf, Snf };
enum class EngineKind { Tree, Naive };
enum class EqualityMode { Convertibility, Alpha };

struct EvalOptions {
  Strategy strategy = Strategy::Snf;
  EngineKind engine = EngineKind::Tree;
  std::size_t max_steps = 100'000'000;
  EqualityMode equality = EqualityMode::Convertibility;
  Heuristic heuristic = Heuristic::MaxConstructors;
};

// Compiled rule set plus evaluation settings. Immutable after construction.
// Shares terms with its rules, so it is confined to one thread at a time.
class EvalContext {
public:
  // Validates every rule (ValidationError) and compiles one tree per (head, arity).
  explicit EvalContext(std::vector<Rule> rules, EvalOptions opts = {});

  const EvalOptions& options() const { return opts_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const std::map<HeadKey, DecisionTree>& trees() const { return trees_; }

  struct ArityTree {
    std::size_t arity;
    DecisionTree tree;
  };
  // Trees for a head symbol, largest arity first; empty when the symbol has no rules.
  std::span<const ArityTree> trees_for(Symbol s) const;
  // Rules for a head symbol in declaration order.
  std::span<const Rule> rules_for(Symbol s) const;

private:
  EvalOptions opts_;
  std::vector<Rule> rules_;
  std::map<HeadKey, DecisionTree> trees_;
  std::unordered_map<Symbol, std::vector<ArityTree>> by_symbol_;
  std::unordered_map<Symbol, std::vector<Rule>> rules_by_symbol_;
};

struct StoredTerm {
  Term term;
  std::size_t snapshot;  // length of the binder list when stored
};

// Evaluator state. `stack.back()` is the top v₁; `binders` is the list V of
// fresh variables introduced when opening abstractions.
struct MachineState {
  std::vector<Term> stack;
  std::vector<StoredTerm> store;
  std::vector<Var> binders;

  // Stack with argument 1 on top.
  static MachineState from_args(std::span<const Term> args);
};

struct TraceEvent {
  std::string node;          // node kind with its parameters, e.g. "Swap 2"
  std::vector<Term> stack;   // top first, on entry to the node
  std::size_t store_size;    // on entry to the node
  std::string branch;        // case or outcome taken ("b/0", "λ", "*", "ok", "fail"), empty otherwise
};

class Normalizer;

struct TreeMatch {
  const Leaf* leaf;
  std::size_t arity;
};

// Runs the tree on `state` without instantiating the leaf.
std::optional<TreeMatch> match_tree(Normalizer& n, const DecisionTree& tree, MachineState& state,
                                    std::vector<TraceEvent>* trace = nullptr);

// Right-hand side of `leaf` with its variables read from the store.
Term instantiate(const Leaf& leaf, const MachineState& state);

struct TreeResult {
  Term result;
  std::size_t arity;
};

std::optional<TreeResult> eval_tree(Normalizer& n, const DecisionTree& tree, MachineState& state,
                                    std::vector<TraceEvent>* trace = nullptr);

// One evaluation with its own step budget (counted over β-steps and rule
// applications). Throws DivergenceError once the budget is exceeded.
class Normalizer {
public:
  explicit Normalizer(const EvalContext& ctx);

  const EvalContext& context() const { return ctx_; }
  std::size_t steps() const { return steps_; }

  Term whnf(const Term& t);
  Term snf(const Term& t);
  // Normal form according to the context's strategy.
  Term normalize(const Term& t);
  // α-equivalence of strong normal forms.
  bool convertible(const Term& t, const Term& u);
  // Equality of stored terms as configured by the context's equality mode.
  bool closures_equal(const Closure& a, const Closure& b);

  // One head rewrite of `head args` using the context's engine.
  std::optional<Term> rewrite_head(Symbol head, std::span<const Term> args);
  std::optional<Term> rewrite_head_tree(Symbol head, std::span<const Term> args);
  std::optional<Term> rewrite_head_naive(Symbol head, std::span<const Term> args);

  // Hooks that make the declarative matcher agree with this normalizer.
  MatchHooks hooks();

private:
  friend class PooledState;

  void tick();
  // Application spine with its head and every argument in strong normal form.
  Term snf_spine(const Term& t);
  // Tree rewrite of an application with `nargs` arguments, read in place.
  std::optional<Term> rewrite_app_tree(const Term& t, Symbol head, std::size_t nargs);

  const EvalContext& ctx_;
  std::size_t steps_ = 0;
  // Machine states reused across nested tree evaluations, indexed by nesting depth.
  std::vector<std::unique_ptr<MachineState>> pool_;
  std::size_t depth_ = 0;
};

// Convenience wrappers, each with a fresh budget.
Term whnf(const EvalContext& ctx, const Term& t);
Term snf(const EvalContext& ctx, const Term& t);
bool convertible(const EvalContext& ctx, const Term& t, const Term& u);
std::optional<Term> rewrite_head(const EvalContext& ctx, Symbol head, std::span<const Term> args);

}  // namespace rw
