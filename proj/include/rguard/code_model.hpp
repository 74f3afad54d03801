#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rguard {

/// 1-based, inclusive source region. Columns count UTF-8 bytes; lines are
/// LF-delimited after normalization. end_col is the column of the last byte.
struct SourceSpan {
  std::string file;
  int start_line = 1;
  int start_col = 1;
  int end_line = 1;
  int end_col = 1;

  bool contains(const SourceSpan& other) const;
  bool starts_before(const SourceSpan& other) const;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// Byte range [first, last) of `span` inside `source`. Throws Error when the
/// span does not lie inside the text.
std::pair<std::size_t, std::size_t> byte_range(std::string_view source,
                                               const SourceSpan& span);
std::string_view span_text(std::string_view source, const SourceSpan& span);

enum class NodeKind : std::uint8_t {
  Function,
  Block,
  If,
  While,
  For,
  Switch,
  CaseClause,
  Return,
  VarDecl,
  ExprStmt,
  Assign,
  Call,
  BinaryOp,
  UnaryOp,
  Identifier,
  Literal,
  MemberAccess,
  ConditionalExpr,
};

std::string_view to_string(NodeKind kind);

namespace node_flag {
inline constexpr std::uint8_t kForInit = 1U << 0;
inline constexpr std::uint8_t kForCond = 1U << 1;
inline constexpr std::uint8_t kForUpdate = 1U << 2;
inline constexpr std::uint8_t kDefaultClause = 1U << 3;
}  // namespace node_flag

/// Syntax tree node. Child layout per kind:
///   Function        params (Identifier)..., Block
///   If              cond, then [, else]
///   While           cond, body
///   For             [init] [cond] [update] body   (presence in `flags`)
///   Switch          discriminant, CaseClause...
///   CaseClause      [test] stmt...                 (kDefaultClause = no test)
///   Return          [expr]
///   VarDecl         Identifier [init]
///   ExprStmt        expr
///   Assign          target, value
///   Call            callee, args...
///   MemberAccess    object, Identifier (property)
///   ConditionalExpr cond, then, else
struct Node {
  NodeKind kind = NodeKind::Block;
  SourceSpan span;
  std::vector<Node> children;
  std::optional<std::string> op;    // BinaryOp / UnaryOp only
  std::optional<std::string> text;  // Identifier / Literal only
  std::uint8_t flags = 0;

  bool has_flag(std::uint8_t f) const { return (flags & f) != 0; }
};

/// Preorder traversal; `visit` receives each node once, parents first.
template <class Visit>
void walk(const Node& node, Visit&& visit) {
  visit(node);
  for (const Node& child : node.children) walk(child, visit);
}

/// Test expression of If / While / For / ConditionalExpr, if any.
const Node* branch_condition(const Node& node);
bool is_default_clause(const Node& node);
/// The Block child of a Function node.
const Node& function_block(const Node& function_node);
/// Body statement of If(then) / While / For.
const Node& loop_body(const Node& node);

/// Kind-, operator-, text- and flag-wise equality, ignoring spans.
bool structurally_equal(const Node& a, const Node& b);

enum class ShapeMode : std::uint8_t {
  Exact,         // identifiers verbatim
  AlphaRenamed,  // names bound in the subtree (params, lets) -> $0, $1, ...
  ErasedNames,   // every identifier except callees and member names -> _
};

/// Compact serialization of a subtree's structure (spans ignored). Two
/// subtrees with equal shapes under AlphaRenamed differ only in local names.
std::string shape_of(const Node& node, ShapeMode mode = ShapeMode::Exact);

enum class FunctionKind : std::uint8_t { Standalone, ClassMember };
std::string_view to_string(FunctionKind kind);

struct SourceFunction {
  std::string name;
  FunctionKind kind = FunctionKind::Standalone;
  std::string language;
  SourceSpan span;
  Node body;  // kind == Function, body.span == span
  int loc = 1;
  std::vector<std::string> params;
  std::string text;  // exact source text covered by span
};

/// If / While / For / CaseClause (non-default) / ConditionalExpr nodes in
/// source order.
std::vector<const Node*> branch_nodes(const SourceFunction& fn);
std::vector<const Node*> branch_nodes(const Node& root);

/// Binary && and || operators in the subtree. Unary ! is not counted.
int logical_operator_count(const Node& condition);

/// Deepest If/While/For/Switch chain. `else if` does not nest.
int max_nesting_depth(const SourceFunction& fn);
int max_nesting_depth(const Node& root);

/// Like max_nesting_depth, also reporting the first node (source order) at
/// the deepest level. Null when depth is 0.
std::pair<int, const Node*> deepest_nesting(const Node& root);

}  // namespace rguard
