#pragma once

// nlohmann::json conversions for the domain types that appear in reports,
// proposals and baselines. Enums are written as their string names.

#include <nlohmann/json.hpp>

#include "rguard/analysis.hpp"
#include "rguard/validation.hpp"

namespace rguard {

void to_json(nlohmann::json& j, const SourceSpan& span);
void from_json(const nlohmann::json& j, SourceSpan& span);

void to_json(nlohmann::json& j, SmellKind kind);
void from_json(const nlohmann::json& j, SmellKind& kind);

void to_json(nlohmann::json& j, const CodeSmell& smell);
void from_json(const nlohmann::json& j, CodeSmell& smell);

void to_json(nlohmann::json& j, const CodeHealthScore& score);
void from_json(const nlohmann::json& j, CodeHealthScore& score);

void to_json(nlohmann::json& j, const HealthDelta& delta);
void from_json(const nlohmann::json& j, HealthDelta& delta);

void to_json(nlohmann::json& j, const LintFinding& finding);
void from_json(const nlohmann::json& j, LintFinding& finding);

void to_json(nlohmann::json& j, Confidence confidence);
void from_json(const nlohmann::json& j, Confidence& confidence);

void to_json(nlohmann::json& j, const ValidationReport& report);
void from_json(const nlohmann::json& j, ValidationReport& report);

/// `{name, span, loc, score, smells: [...]}` as used by `scan --json`.
nlohmann::json function_report_json(const FunctionReport& report);

}  // namespace rguard
