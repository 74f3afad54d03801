#pragma once

#include <string>
#include <vector>

#include "rguard/codehealth.hpp"
#include "rguard/lang_frontend.hpp"
#include "rguard/smells.hpp"

namespace rguard {

/// Everything that determines smells and scores. Its fingerprint pins
/// baselines to the configuration they were computed with.
struct AnalysisConfig {
  Thresholds thresholds;
  HealthWeights weights;
  SeverityOrder severity;

  void validate() const;
  std::string fingerprint() const;
};

struct FunctionReport {
  SourceFunction function;
  std::vector<CodeSmell> smells;
  CodeHealthScore score;
};

struct UnitReport {
  std::vector<FunctionReport> functions;
  CodeHealthScore file_score;

  const FunctionReport* find(std::string_view name) const;
};

FunctionReport analyze_function(SourceFunction fn, const AnalysisConfig& config);
UnitReport analyze_unit(std::vector<SourceFunction> functions, const AnalysisConfig& config);

}  // namespace rguard
