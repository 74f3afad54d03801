#include "rguard/smells.hpp"

#include <algorithm>

#include "rguard/errors.hpp"

namespace rguard {

std::string_view to_string(SmellKind kind) {
  switch (kind) {
    case SmellKind::ComplexMethod: return "ComplexMethod";
    case SmellKind::BumpyRoad: return "BumpyRoad";
    case SmellKind::DeepNestedLogic: return "DeepNestedLogic";
    case SmellKind::ComplexConditional: return "ComplexConditional";
    case SmellKind::LargeMethod: return "LargeMethod";
  }
  return "?";
}

std::string_view display_name(SmellKind kind) {
  switch (kind) {
    case SmellKind::ComplexMethod: return "Complex Method";
    case SmellKind::BumpyRoad: return "Bumpy Road";
    case SmellKind::DeepNestedLogic: return "Deep Nested Logic";
    case SmellKind::ComplexConditional: return "Complex Conditional";
    case SmellKind::LargeMethod: return "Large Method";
  }
  return "?";
}

std::optional<SmellKind> smell_kind_from_string(std::string_view name) {
  for (SmellKind kind : kAllSmellKinds)
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

SeverityOrder::SeverityOrder(const std::array<SmellKind, 5>& order) : order_(order) {
  for (SmellKind kind : kAllSmellKinds)
    if (std::count(order_.begin(), order_.end(), kind) != 1)
      throw ConfigError("severity order must list every smell kind exactly once");
}

int SeverityOrder::rank(SmellKind kind) const {
  auto it = std::find(order_.begin(), order_.end(), kind);
  return static_cast<int>(it - order_.begin()) + 1;
}

void Thresholds::validate() const {
  for (int v : {complex_conditional_min_ops, complex_method_min_cc, deep_nesting_min_depth,
                bumpy_road_min_bumps, bumpy_road_min_bump_depth, large_method_min_loc})
    if (v < 1) throw ConfigError("thresholds must be >= 1");
}

int cyclomatic_complexity(const SourceFunction& fn) {
  return 1 + static_cast<int>(branch_nodes(fn).size());
}

std::vector<const Node*> bumps(const SourceFunction& fn, int min_depth) {
  std::vector<const Node*> out;
  for (const Node& stmt : function_block(fn.body).children)
    if (max_nesting_depth(stmt) >= min_depth) out.push_back(&stmt);
  return out;
}

namespace {

CodeSmell make_smell(SmellKind kind, const SourceFunction& fn, SourceSpan span, int value,
                     int threshold) {
  return CodeSmell{kind, fn.name, std::move(span), value, threshold};
}

}  // namespace

std::vector<CodeSmell> detect_complex_conditionals(const SourceFunction& fn, const Thresholds& t) {
  std::vector<CodeSmell> out;
  for (const Node* branch : branch_nodes(fn)) {
    const Node* cond = branch_condition(*branch);
    if (cond == nullptr) continue;
    const int ops = logical_operator_count(*cond);
    if (ops >= t.complex_conditional_min_ops)
      out.push_back(make_smell(SmellKind::ComplexConditional, fn, cond->span, ops,
                               t.complex_conditional_min_ops));
  }
  return out;
}

std::optional<CodeSmell> detect_complex_method(const SourceFunction& fn, const Thresholds& t) {
  const int cc = cyclomatic_complexity(fn);
  if (cc < t.complex_method_min_cc) return std::nullopt;
  return make_smell(SmellKind::ComplexMethod, fn, fn.span, cc, t.complex_method_min_cc);
}

std::optional<CodeSmell> detect_deep_nested_logic(const SourceFunction& fn, const Thresholds& t) {
  auto [depth, deepest] = deepest_nesting(fn.body);
  if (depth < t.deep_nesting_min_depth) return std::nullopt;
  return make_smell(SmellKind::DeepNestedLogic, fn, deepest->span, depth,
                    t.deep_nesting_min_depth);
}

std::optional<CodeSmell> detect_bumpy_road(const SourceFunction& fn, const Thresholds& t) {
  const auto found = bumps(fn, t.bumpy_road_min_bump_depth);
  const int count = static_cast<int>(found.size());
  if (count < t.bumpy_road_min_bumps) return std::nullopt;
  SourceSpan span = found.front()->span;
  span.end_line = found.back()->span.end_line;
  span.end_col = found.back()->span.end_col;
  return make_smell(SmellKind::BumpyRoad, fn, std::move(span), count, t.bumpy_road_min_bumps);
}

std::optional<CodeSmell> detect_large_method(const SourceFunction& fn, const Thresholds& t) {
  if (fn.loc < t.large_method_min_loc) return std::nullopt;
  return make_smell(SmellKind::LargeMethod, fn, fn.span, fn.loc, t.large_method_min_loc);
}

std::vector<CodeSmell> detect_all(const SourceFunction& fn, const Thresholds& t,
                                  const SeverityOrder& severity) {
  std::vector<CodeSmell> out = detect_complex_conditionals(fn, t);
  for (auto found : {detect_complex_method(fn, t), detect_deep_nested_logic(fn, t),
                     detect_bumpy_road(fn, t), detect_large_method(fn, t)})
    if (found) out.push_back(std::move(*found));
  std::stable_sort(out.begin(), out.end(), [&](const CodeSmell& a, const CodeSmell& b) {
    const int ra = severity.rank(a.kind);
    const int rb = severity.rank(b.kind);
    if (ra != rb) return ra < rb;
    return a.span.starts_before(b.span);
  });
  return out;
}

}  // namespace rguard
