#include "rguard/codehealth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rguard/errors.hpp"

namespace rguard {

void HealthWeights::validate() const {
  for (double w : by_kind)
    if (!std::isfinite(w) || w <= 0.0) throw ConfigError("health weights must be positive");
}

std::string_view to_string(HealthDirection direction) {
  switch (direction) {
    case HealthDirection::Improved: return "improved";
    case HealthDirection::Unchanged: return "unchanged";
    case HealthDirection::Declined: return "declined";
  }
  return "?";
}

namespace {

double clamp_health(double v) { return std::clamp(v, kMinHealth, kMaxHealth); }

}  // namespace

CodeHealthScore score_function(std::span<const CodeSmell> smells, const HealthWeights& weights) {
  std::vector<const CodeSmell*> ordered;
  for (const CodeSmell& s : smells) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(), [](const CodeSmell* a, const CodeSmell* b) {
    return a->span.starts_before(b->span);
  });

  CodeHealthScore score;
  score.basis = HealthBasis::Function;
  std::array<int, 5> seen{};
  double total = 0.0;
  for (const CodeSmell* s : ordered) {
    const int nth = seen[static_cast<std::size_t>(s->kind)]++;
    const double amount = weights.weight(s->kind) * std::pow(0.5, nth);
    score.deductions.push_back({s->kind, amount});
    total += amount;
  }
  score.value = clamp_health(kMaxHealth - total);
  return score;
}

CodeHealthScore score_file(std::span<const FunctionScore> functions) {
  CodeHealthScore file;
  file.basis = HealthBasis::File;
  double total_loc = 0.0;
  for (const FunctionScore& f : functions) total_loc += f.loc;
  if (functions.empty() || total_loc <= 0.0) return file;

  double weighted = 0.0;
  std::map<SmellKind, double> by_kind;
  for (const FunctionScore& f : functions) {
    const double share = f.loc / total_loc;
    weighted += f.loc * f.score.value;
    // Spread the function's effective (post-clamp) deduction over its
    // deductions so that the file deductions sum to 10 - value.
    double raw = 0.0;
    for (const Deduction& d : f.score.deductions) raw += d.amount;
    const double effective = kMaxHealth - f.score.value;
    if (raw <= 0.0) continue;
    for (const Deduction& d : f.score.deductions)
      by_kind[d.kind] += share * effective * (d.amount / raw);
  }
  file.value = clamp_health(weighted / total_loc);
  for (const auto& [kind, amount] : by_kind) file.deductions.push_back({kind, amount});
  return file;
}

HealthDelta health_delta(const CodeHealthScore& before, const CodeHealthScore& after) {
  if (before.basis != after.basis) throw Error("health_delta: basis mismatch");
  HealthDelta delta{before, after, HealthDirection::Unchanged};
  if (after.value > before.value)
    delta.direction = HealthDirection::Improved;
  else if (after.value < before.value)
    delta.direction = HealthDirection::Declined;
  return delta;
}

}  // namespace rguard
