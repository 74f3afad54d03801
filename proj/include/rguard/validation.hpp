#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rguard/analysis.hpp"

namespace rguard {

enum class Confidence : std::uint8_t { High, Mid, Discard };
std::string_view to_string(Confidence confidence);
std::optional<Confidence> confidence_from_string(std::string_view name);

/// Outcome of the syntactic and smell/health steps.
enum class StepVerdict : std::uint8_t { Pass, Demote, Discard };
std::string_view to_string(StepVerdict verdict);

enum class CheckOutcome : std::uint8_t { Pass, MinorDeviation, MajorDeviation };
std::string_view to_string(CheckOutcome outcome);

struct SyntacticResult {
  bool parsed = false;
  std::vector<LintFinding> new_warnings;
  StepVerdict verdict = StepVerdict::Discard;
  std::string detail;
};

struct NewSmell {
  SmellKind kind = SmellKind::LargeMethod;
  std::string function;
  bool less_severe = false;
};

struct SmellHealthResult {
  bool target_smell_resolved = false;
  std::optional<HealthDelta> delta;
  std::vector<NewSmell> new_smells;
  StepVerdict verdict = StepVerdict::Discard;
  std::string detail;
};

namespace semantic_check {
inline constexpr std::string_view kCallSet = "CALL_SET";
inline constexpr std::string_view kLiterals = "LITERALS";
inline constexpr std::string_view kEmptyStub = "EMPTY_STUB";
inline constexpr std::string_view kRedundantReimpl = "REDUNDANT_REIMPL";
inline constexpr std::string_view kReturnSurface = "RETURN_SURFACE";
inline constexpr std::string_view kExpectedShape = "EXPECTED_SHAPE";
}  // namespace semantic_check

struct SemanticCheck {
  std::string check_id;
  CheckOutcome outcome = CheckOutcome::Pass;
  std::string detail;
};

struct SemanticResult {
  std::vector<SemanticCheck> checks;
  CheckOutcome outcome = CheckOutcome::Pass;
};

/// Step-by-step record of one candidate's validation. Steps after a Discard
/// are not run and stay empty.
struct ValidationReport {
  SyntacticResult syntactic;
  std::optional<SmellHealthResult> smell_health;
  std::optional<SemanticResult> semantic;
  std::vector<std::string> rationale;
  Confidence confidence = Confidence::Discard;
};

/// Step 1. `original` and `refactored` are whole compilation units. A
/// refactored unit that fails to parse (or has no functions) is discarded;
/// new lint warnings demote one level.
SyntacticResult validate_syntactic(std::string_view original, std::string_view refactored,
                                   const LanguageAdapter& adapter);

/// Step 2. Compares smells and file CodeHealth of both units.
SmellHealthResult validate_smell_health(const std::vector<SourceFunction>& original_fns,
                                        const std::vector<SourceFunction>& refactored_fns,
                                        const CodeSmell& target, const AnalysisConfig& config);

/// Step 3. Runs the heuristic catalog over the target function's lineage
/// (the function plus any newly introduced helpers).
SemanticResult validate_semantic(const std::vector<SourceFunction>& original_fns,
                                 const std::vector<SourceFunction>& refactored_fns,
                                 const CodeSmell& target);

/// High, lowered one level per demotion; Discard on any discard, a major
/// semantic deviation, or more than one demotion. Absent steps (after a
/// short-circuit) must be preceded by a Discard.
Confidence assign_confidence(const SyntacticResult& syntactic,
                             const std::optional<SmellHealthResult>& smell_health,
                             const std::optional<SemanticResult>& semantic);
Confidence assign_confidence(StepVerdict syntactic, std::optional<StepVerdict> smell_health,
                             std::optional<CheckOutcome> semantic);

/// Replaces `fn`'s text in `unit` with `replacement`.
std::string splice_function(std::string_view unit, const SourceFunction& fn,
                            std::string_view replacement);

/// Full pipeline for one candidate: `replacement` takes the place of the
/// target function inside `original_unit`.
ValidationReport validate_candidate(std::string_view original_unit, const SourceFunction& target_fn,
                                    const CodeSmell& target, std::string_view replacement,
                                    const LanguageAdapter& adapter, const AnalysisConfig& config);

}  // namespace rguard
