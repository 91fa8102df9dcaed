#include <sstream>

#include "rw/dtree.hpp"
#include "rw/syntax.hpp"

namespace rw {

namespace {

std::string index_list(const std::vector<std::size_t>& xs) {
  std::string out = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  return out + "}";
}

std::string slot_text(const SlotRef& r) {
  return r.formals.empty() ? std::to_string(r.slot) : std::to_string(r.slot) + index_list(r.formals);
}

std::string node_label(const DecisionTree& t) {
  if (const auto* l = t.as_leaf()) return "Leaf " + print_term(l->rhs);
  if (t.is_fail()) return "Fail";
  if (const auto* s = t.as_swap()) return "Swap " + std::to_string(s->column);
  if (t.as_store()) return "Store";
  if (t.as_switch()) return "Switch";
  if (const auto* n = t.as_bin_nl()) return "BinNl {" + slot_text(n->left) + ", " + slot_text(n->right) + "}";
  const auto* c = t.as_bin_cl();
  return "BinCl " + std::to_string(c->slot) + " " + index_list(c->allowed);
}

// Children in rendering order, each with its edge label ("" for the only child).
std::vector<std::pair<std::string, DecisionTree>> children(const DecisionTree& t) {
  std::vector<std::pair<std::string, DecisionTree>> out;
  if (const auto* s = t.as_swap()) out.emplace_back("", s->child);
  if (const auto* s = t.as_store()) out.emplace_back("", s->child);
  if (const auto* sw = t.as_switch()) {
    for (const auto& c : sw->cases) out.emplace_back(c.symbol.str() + "/" + std::to_string(c.arity), c.child);
    if (sw->abst) out.emplace_back("λ", *sw->abst);
    if (sw->fallback) out.emplace_back("*", *sw->fallback);
  }
  if (const auto* n = t.as_bin_nl()) {
    out.emplace_back("ok", n->succ);
    out.emplace_back("fail", n->fail);
  }
  if (const auto* c = t.as_bin_cl()) {
    out.emplace_back("ok", c->succ);
    out.emplace_back("fail", c->fail);
  }
  return out;
}

void text_rec(const DecisionTree& t, const std::string& edge, std::size_t depth, std::string& out) {
  out.append(2 * depth, ' ');
  if (!edge.empty()) out += edge + " -> ";
  out += node_label(t);
  out += '\n';
  for (const auto& [label, child] : children(t)) text_rec(child, label, depth + 1, out);
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::size_t dot_rec(const DecisionTree& t, std::size_t& next, std::ostringstream& out) {
  const std::size_t id = next++;
  std::string label;
  std::string shape = "box";
  if (const auto* l = t.as_leaf()) {
    label = print_term(l->rhs);
    shape = "plaintext";
  } else if (t.is_fail()) {
    label = "✗";
    shape = "plaintext";
  } else if (t.as_switch()) {
    label = "";
    shape = "circle";
  } else {
    label = node_label(t);
  }
  out << "  n" << id << " [label=\"" << dot_escape(label) << "\", shape=" << shape << "];\n";
  for (const auto& [edge, child] : children(t)) {
    const std::size_t cid = dot_rec(child, next, out);
    out << "  n" << id << " -> n" << cid;
    if (!edge.empty()) out << " [label=\"" << dot_escape(edge) << "\"]";
    out << ";\n";
  }
  return id;
}

}  // namespace

std::string to_text(const DecisionTree& t) {
  std::string out;
  text_rec(t, "", 0, out);
  return out;
}

std::string to_dot(const DecisionTree& t, const std::string& graph_name) {
  std::ostringstream out;
  out << "digraph \"" << dot_escape(graph_name) << "\" {\n";
  out << "  node [fontname=\"monospace\"];\n";
  std::size_t next = 0;
  dot_rec(t, next, out);
  out << "}\n";
  return out.str();
}

}  // namespace rw
