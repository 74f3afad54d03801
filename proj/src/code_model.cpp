#include "rguard/code_model.hpp"

#include <algorithm>
#include <map>

#include "rguard/errors.hpp"

namespace rguard {

bool SourceSpan::contains(const SourceSpan& other) const {
  const bool starts_inside =
      start_line < other.start_line ||
      (start_line == other.start_line && start_col <= other.start_col);
  const bool ends_inside = end_line > other.end_line ||
                           (end_line == other.end_line && end_col >= other.end_col);
  return starts_inside && ends_inside;
}

bool SourceSpan::starts_before(const SourceSpan& other) const {
  if (start_line != other.start_line) return start_line < other.start_line;
  return start_col < other.start_col;
}

std::pair<std::size_t, std::size_t> byte_range(std::string_view source,
                                               const SourceSpan& span) {
  auto line_start = [&](int line) -> std::size_t {
    std::size_t pos = 0;
    for (int l = 1; l < line; ++l) {
      pos = source.find('\n', pos);
      if (pos == std::string_view::npos) throw Error("span line out of range");
      ++pos;
    }
    return pos;
  };
  const std::size_t first = line_start(span.start_line) + static_cast<std::size_t>(span.start_col - 1);
  const std::size_t last = line_start(span.end_line) + static_cast<std::size_t>(span.end_col);
  if (first > last || last > source.size()) throw Error("span out of range");
  return {first, last};
}

std::string_view span_text(std::string_view source, const SourceSpan& span) {
  auto [first, last] = byte_range(source, span);
  return source.substr(first, last - first);
}

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Function: return "Function";
    case NodeKind::Block: return "Block";
    case NodeKind::If: return "If";
    case NodeKind::While: return "While";
    case NodeKind::For: return "For";
    case NodeKind::Switch: return "Switch";
    case NodeKind::CaseClause: return "CaseClause";
    case NodeKind::Return: return "Return";
    case NodeKind::VarDecl: return "VarDecl";
    case NodeKind::ExprStmt: return "ExprStmt";
    case NodeKind::Assign: return "Assign";
    case NodeKind::Call: return "Call";
    case NodeKind::BinaryOp: return "BinaryOp";
    case NodeKind::UnaryOp: return "UnaryOp";
    case NodeKind::Identifier: return "Identifier";
    case NodeKind::Literal: return "Literal";
    case NodeKind::MemberAccess: return "MemberAccess";
    case NodeKind::ConditionalExpr: return "ConditionalExpr";
  }
  return "?";
}

std::string_view to_string(FunctionKind kind) {
  return kind == FunctionKind::Standalone ? "standalone" : "class_member";
}

const Node* branch_condition(const Node& node) {
  switch (node.kind) {
    case NodeKind::If:
    case NodeKind::While:
    case NodeKind::ConditionalExpr:
      return &node.children.at(0);
    case NodeKind::For:
      if (!node.has_flag(node_flag::kForCond)) return nullptr;
      return &node.children.at(node.has_flag(node_flag::kForInit) ? 1 : 0);
    default:
      return nullptr;
  }
}

bool is_default_clause(const Node& node) {
  return node.kind == NodeKind::CaseClause && node.has_flag(node_flag::kDefaultClause);
}

const Node& function_block(const Node& function_node) { return function_node.children.back(); }

const Node& loop_body(const Node& node) {
  if (node.kind == NodeKind::If) return node.children.at(1);
  return node.children.back();
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.op != b.op || a.text != b.text || a.flags != b.flags ||
      a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  return true;
}

namespace {

class ShapeWriter {
 public:
  ShapeWriter(ShapeMode mode, const Node& root) : mode_(mode) {
    if (mode_ == ShapeMode::AlphaRenamed) collect_bindings(root);
  }

  void write(const Node& node, std::string& out, bool is_callee = false) {
    out += '(';
    out += to_string(node.kind);
    if (node.op) {
      out += ' ';
      out += *node.op;
    }
    if (node.flags != 0) {
      out += " #";
      out += std::to_string(node.flags);
    }
    if (node.text) {
      out += ' ';
      out += identifier_text(node, is_callee);
    }
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const Node& child = node.children[i];
      if (node.kind == NodeKind::MemberAccess && i == 1) {
        out += " .";
        out += child.text.value_or("");
        continue;
      }
      out += ' ';
      write(child, out, node.kind == NodeKind::Call && i == 0);
    }
    out += ')';
  }

 private:
  void collect_bindings(const Node& root) {
    walk(root, [&](const Node& n) {
      if (n.kind == NodeKind::Function) {
        for (const Node& c : n.children)
          if (c.kind == NodeKind::Identifier) bind(*c.text);
      } else if (n.kind == NodeKind::VarDecl) {
        bind(*n.children.at(0).text);
      }
    });
  }

  void bind(const std::string& name) {
    if (!renames_.contains(name)) renames_.emplace(name, "$" + std::to_string(renames_.size()));
  }

  std::string identifier_text(const Node& node, bool is_callee) const {
    if (node.kind != NodeKind::Identifier) return *node.text;
    switch (mode_) {
      case ShapeMode::Exact:
        return *node.text;
      case ShapeMode::AlphaRenamed: {
        auto it = renames_.find(*node.text);
        return it == renames_.end() ? *node.text : it->second;
      }
      case ShapeMode::ErasedNames:
        return is_callee ? *node.text : "_";
    }
    return *node.text;
  }

  ShapeMode mode_;
  std::map<std::string, std::string> renames_;
};

void collect_branches(const Node& node, std::vector<const Node*>& out) {
  switch (node.kind) {
    case NodeKind::If:
    case NodeKind::While:
    case NodeKind::For:
    case NodeKind::ConditionalExpr:
      out.push_back(&node);
      break;
    case NodeKind::CaseClause:
      if (!is_default_clause(node)) out.push_back(&node);
      break;
    default:
      break;
  }
  for (const Node& child : node.children) collect_branches(child, out);
}

bool is_nesting_kind(NodeKind kind) {
  return kind == NodeKind::If || kind == NodeKind::While || kind == NodeKind::For ||
         kind == NodeKind::Switch;
}

// An else branch that is an If, or a block whose only statement is an If.
const Node* else_if_target(const Node& else_branch) {
  if (else_branch.kind == NodeKind::If) return &else_branch;
  if (else_branch.kind == NodeKind::Block && else_branch.children.size() == 1 &&
      else_branch.children[0].kind == NodeKind::If)
    return &else_branch.children[0];
  return nullptr;
}

struct NestingScan {
  int best = 0;
  const Node* deepest = nullptr;

  void visit(const Node& node, int depth) {
    if (!is_nesting_kind(node.kind)) {
      for (const Node& child : node.children) visit(child, depth);
      return;
    }
    const int here = depth + 1;
    if (here > best) {
      best = here;
      deepest = &node;
    }
    if (node.kind == NodeKind::If) {
      visit(node.children[1], here);
      if (node.children.size() > 2) {
        const Node& else_branch = node.children[2];
        if (const Node* chained = else_if_target(else_branch))
          visit(*chained, depth);
        else
          visit(else_branch, here);
      }
      return;
    }
    for (const Node& child : node.children) visit(child, here);
  }
};

}  // namespace

std::string shape_of(const Node& node, ShapeMode mode) {
  std::string out;
  ShapeWriter(mode, node).write(node, out);
  return out;
}

std::vector<const Node*> branch_nodes(const Node& root) {
  std::vector<const Node*> out;
  collect_branches(root, out);
  return out;
}

std::vector<const Node*> branch_nodes(const SourceFunction& fn) { return branch_nodes(fn.body); }

int logical_operator_count(const Node& condition) {
  int count = 0;
  walk(condition, [&](const Node& n) {
    if (n.kind == NodeKind::BinaryOp && (n.op == "&&" || n.op == "||")) ++count;
  });
  return count;
}

std::pair<int, const Node*> deepest_nesting(const Node& root) {
  NestingScan scan;
  scan.visit(root, 0);
  return {scan.best, scan.deepest};
}

int max_nesting_depth(const Node& root) { return deepest_nesting(root).first; }

int max_nesting_depth(const SourceFunction& fn) { return max_nesting_depth(fn.body); }

}  // namespace rguard
