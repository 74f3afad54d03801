#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rguard/smells.hpp"

namespace rguard {

/// Per-kind deduction weights for the CodeHealth score.
struct HealthWeights {
  std::array<double, 5> by_kind = {1.5, 1.2, 1.0, 0.8, 0.6};  // indexed by SmellKind

  double weight(SmellKind kind) const { return by_kind[static_cast<std::size_t>(kind)]; }
  void set(SmellKind kind, double w) { by_kind[static_cast<std::size_t>(kind)] = w; }
  void validate() const;  // weights must be finite and > 0

  friend bool operator==(const HealthWeights&, const HealthWeights&) = default;
};

enum class HealthBasis : std::uint8_t { Function, File };

struct Deduction {
  SmellKind kind = SmellKind::ComplexMethod;
  double amount = 0.0;
};

inline constexpr double kMaxHealth = 10.0;
inline constexpr double kMinHealth = 1.0;

/// value == clamp(10 - sum(deductions), 1, 10).
struct CodeHealthScore {
  double value = kMaxHealth;
  std::vector<Deduction> deductions;
  HealthBasis basis = HealthBasis::Function;
};

enum class HealthDirection : std::uint8_t { Improved, Unchanged, Declined };
std::string_view to_string(HealthDirection direction);

struct HealthDelta {
  CodeHealthScore before;
  CodeHealthScore after;
  HealthDirection direction = HealthDirection::Unchanged;

  double change() const { return after.value - before.value; }
};

/// The i-th smell of a kind (ordered by span) deducts weight * 0.5^(i-1).
CodeHealthScore score_function(std::span<const CodeSmell> smells,
                               const HealthWeights& weights = {});

struct FunctionScore {
  int loc = 1;
  CodeHealthScore score;
};

/// LoC-weighted mean of function scores; 10.0 for an empty unit.
CodeHealthScore score_file(std::span<const FunctionScore> functions);

/// Throws Error when the two scores have different bases.
HealthDelta health_delta(const CodeHealthScore& before, const CodeHealthScore& after);

}  // namespace rguard
