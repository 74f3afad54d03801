#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rguard/code_model.hpp"

namespace rguard {

enum class SmellKind : std::uint8_t {
  ComplexMethod,
  BumpyRoad,
  DeepNestedLogic,
  ComplexConditional,
  LargeMethod,
};

inline constexpr std::array<SmellKind, 5> kAllSmellKinds = {
    SmellKind::ComplexMethod, SmellKind::BumpyRoad, SmellKind::DeepNestedLogic,
    SmellKind::ComplexConditional, SmellKind::LargeMethod};

std::string_view to_string(SmellKind kind);
/// Human-readable name ("Complex Method").
std::string_view display_name(SmellKind kind);
std::optional<SmellKind> smell_kind_from_string(std::string_view name);

/// Strict total order over smell kinds, most severe first. Rank 1 is the
/// most severe.
class SeverityOrder {
 public:
  SeverityOrder() = default;
  /// Throws ConfigError unless `order` is a permutation of all kinds.
  explicit SeverityOrder(const std::array<SmellKind, 5>& order);

  int rank(SmellKind kind) const;
  bool less_severe(SmellKind candidate, SmellKind than) const {
    return rank(candidate) > rank(than);
  }
  const std::array<SmellKind, 5>& order() const { return order_; }

 private:
  std::array<SmellKind, 5> order_ = kAllSmellKinds;
};

struct CodeSmell {
  SmellKind kind = SmellKind::ComplexMethod;
  std::string function;
  SourceSpan span;
  int metric_value = 0;
  int threshold = 0;

  friend bool operator==(const CodeSmell&, const CodeSmell&) = default;
};

struct Thresholds {
  int complex_conditional_min_ops = 2;
  int complex_method_min_cc = 10;
  int deep_nesting_min_depth = 4;
  int bumpy_road_min_bumps = 2;
  int bumpy_road_min_bump_depth = 2;
  int large_method_min_loc = 70;

  void validate() const;  // throws ConfigError when any threshold < 1

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// 1 + number of branch nodes. Logical operators are not counted.
int cyclomatic_complexity(const SourceFunction& fn);

/// Top-level statements of the function whose own nesting reaches
/// `min_depth`, in source order.
std::vector<const Node*> bumps(const SourceFunction& fn, int min_depth);

std::vector<CodeSmell> detect_complex_conditionals(const SourceFunction& fn, const Thresholds& t);
std::optional<CodeSmell> detect_complex_method(const SourceFunction& fn, const Thresholds& t);
std::optional<CodeSmell> detect_deep_nested_logic(const SourceFunction& fn, const Thresholds& t);
std::optional<CodeSmell> detect_bumpy_road(const SourceFunction& fn, const Thresholds& t);
std::optional<CodeSmell> detect_large_method(const SourceFunction& fn, const Thresholds& t);

/// Union of all detectors ordered by severity rank, then span start.
std::vector<CodeSmell> detect_all(const SourceFunction& fn, const Thresholds& t,
                                  const SeverityOrder& severity = {});

}  // namespace rguard
