#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "rw/matrix.hpp"
#include "rw/pattern.hpp"
#include "rw/term.hpp"

namespace rw {

struct TreeNode;

// Decision tree, immutable once built. Children are shared.
class DecisionTree {
public:
  const struct Leaf* as_leaf() const;
  bool is_fail() const;
  const struct Swap* as_swap() const;
  const struct Store* as_store() const;
  const struct Switch* as_switch() const;
  const struct BinNl* as_bin_nl() const;
  const struct BinCl* as_bin_cl() const;

  const TreeNode* node() const { return node_.get(); }

private:
  friend DecisionTree make_tree(TreeNode n);
  explicit DecisionTree(std::shared_ptr<const TreeNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TreeNode> node_;
};

// Value of a rhs variable: store slot plus which entries of the slot's
// binder snapshot are its formals.
struct SlotRef {
  std::size_t slot = 0;
  std::vector<std::size_t> formals;
  bool operator==(const SlotRef&) const = default;
};

struct Leaf {
  Term rhs;
  std::vector<std::pair<Name, SlotRef>> env;
  std::string source;
  std::size_t rule_index = 0;
};

struct Fail {};

// Exchanges stack entries 1 and `column` (1-based, column >= 2).
struct Swap {
  std::size_t column;
  DecisionTree child;
};

// Appends the stack top to the store without popping it.
struct Store {
  DecisionTree child;
};

struct SymbolCase {
  Symbol symbol;
  std::size_t arity;
  DecisionTree child;
};

struct Switch {
  std::vector<SymbolCase> cases;  // pairwise distinct (symbol, arity)
  std::optional<DecisionTree> abst;
  std::optional<DecisionTree> fallback;  // the default case `*`

  const DecisionTree* find(Symbol s, std::size_t arity) const;

  // Built by make_switch when there are enough cases to pay for hashing.
  std::unordered_map<Symbol, std::vector<std::pair<std::size_t, std::size_t>>> index;
};

// Non-linearity check between two stored terms (unordered pair of slots).
struct BinNl {
  DecisionTree succ;
  SlotRef left;
  SlotRef right;
  DecisionTree fail;
};

// Closedness check: free snapshot variables of the stored term must be among
// the `allowed` snapshot entries.
struct BinCl {
  DecisionTree succ;
  std::size_t slot;
  std::vector<std::size_t> allowed;
  DecisionTree fail;
};

struct TreeNode {
  std::variant<Leaf, Fail, Swap, Store, Switch, BinNl, BinCl> data;
};

inline const Leaf* DecisionTree::as_leaf() const { return node_ ? std::get_if<Leaf>(&node_->data) : nullptr; }
inline bool DecisionTree::is_fail() const { return node_ && std::holds_alternative<Fail>(node_->data); }
inline const Swap* DecisionTree::as_swap() const { return node_ ? std::get_if<Swap>(&node_->data) : nullptr; }
inline const Store* DecisionTree::as_store() const { return node_ ? std::get_if<Store>(&node_->data) : nullptr; }
inline const Switch* DecisionTree::as_switch() const { return node_ ? std::get_if<Switch>(&node_->data) : nullptr; }
inline const BinNl* DecisionTree::as_bin_nl() const { return node_ ? std::get_if<BinNl>(&node_->data) : nullptr; }
inline const BinCl* DecisionTree::as_bin_cl() const { return node_ ? std::get_if<BinCl>(&node_->data) : nullptr; }

DecisionTree make_tree(TreeNode n);
DecisionTree make_leaf(Term rhs, std::vector<std::pair<Name, SlotRef>> env = {}, std::string source = {});
DecisionTree make_fail();
DecisionTree make_swap(std::size_t column, DecisionTree child);
DecisionTree make_store(DecisionTree child);
DecisionTree make_switch(std::vector<SymbolCase> cases, std::optional<DecisionTree> abst = std::nullopt,
                         std::optional<DecisionTree> fallback = std::nullopt);
DecisionTree make_bin_nl(DecisionTree succ, SlotRef left, SlotRef right, DecisionTree fail);
DecisionTree make_bin_cl(DecisionTree succ, std::size_t slot, std::vector<std::size_t> allowed, DecisionTree fail);

// Compiler state: one position per matrix column, the store size, the
// position -> slot map and the abstraction positions traversed so far (in
// traversal order, i.e. the layout of the evaluator's binder list).
struct CompileState {
  std::vector<Position> columns;
  std::size_t store_size = 0;
  std::map<Position, std::size_t> slots;
  std::vector<Position> binders;

  static CompileState initial(std::size_t arity);
};

enum class Heuristic { MaxConstructors, LeftRight };

const char* heuristic_name(Heuristic h);
std::optional<Heuristic> heuristic_from_name(std::string_view s);

namespace action {
struct SpecializeColumn {
  std::size_t column;
};
struct StoreColumn {
  std::size_t column;
};
struct SolveNl {
  NlConstraint constraint;
};
struct SolveCl {
  ClConstraint constraint;
};
struct YieldRow {
  std::size_t row;
};
}  // namespace action

using Action =
    std::variant<action::SpecializeColumn, action::StoreColumn, action::SolveNl, action::SolveCl, action::YieldRow>;

// Next compilation step for a nonempty matrix. Columns and rows are 1-based.
Action choose_action(const ClauseMatrix& m, const CompileState& st, Heuristic h = Heuristic::MaxConstructors);

DecisionTree compile(const ClauseMatrix& m, const CompileState& st, Heuristic h = Heuristic::MaxConstructors);

struct HeadKey {
  Symbol symbol;
  std::size_t arity;
  auto operator<=>(const HeadKey&) const = default;
};

// One tree per (head symbol, lhs arity), rules kept in their given order.
std::map<HeadKey, DecisionTree> trees_of_ruleset(std::span<const Rule> rules,
                                                 Heuristic h = Heuristic::MaxConstructors);

struct TreeStats {
  std::size_t leaves = 0, fails = 0, swaps = 0, stores = 0, switches = 0, bin_nl = 0, bin_cl = 0;
  std::size_t depth = 0;
  std::size_t store_size = 0;  // most Store nodes on a root-to-leaf path

  std::size_t nodes() const { return leaves + fails + swaps + stores + switches + bin_nl + bin_cl; }
};

TreeStats tree_stats(const DecisionTree& t);

// The tree with every Store node replaced by its child.
DecisionTree erase_stores(const DecisionTree& t);

// Same node kinds, parameters and case keys; leaves compare rhs up to α.
bool same_shape(const DecisionTree& a, const DecisionTree& b);

// Indented multi-line rendering; the root is on the first line.
std::string to_text(const DecisionTree& t);
// Graphviz digraph; node ids follow a pre-order numbering.
std::string to_dot(const DecisionTree& t, const std::string& graph_name = "tree");

}  // namespace rw
