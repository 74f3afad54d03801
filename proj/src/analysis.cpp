#include "rguard/analysis.hpp"

#include <nlohmann/json.hpp>

#include "rguard/hashing.hpp"

namespace rguard {

void AnalysisConfig::validate() const {
  thresholds.validate();
  weights.validate();
}

std::string AnalysisConfig::fingerprint() const {
  nlohmann::json doc;
  doc["thresholds"] = {thresholds.complex_conditional_min_ops, thresholds.complex_method_min_cc,
                       thresholds.deep_nesting_min_depth,      thresholds.bumpy_road_min_bumps,
                       thresholds.bumpy_road_min_bump_depth,   thresholds.large_method_min_loc};
  doc["weights"] = weights.by_kind;
  for (SmellKind kind : severity.order()) doc["severity"].push_back(std::string(to_string(kind)));
  return sha256_hex(doc.dump());
}

const FunctionReport* UnitReport::find(std::string_view name) const {
  for (const FunctionReport& f : functions)
    if (f.function.name == name) return &f;
  return nullptr;
}

FunctionReport analyze_function(SourceFunction fn, const AnalysisConfig& config) {
  FunctionReport report;
  report.smells = detect_all(fn, config.thresholds, config.severity);
  report.score = score_function(report.smells, config.weights);
  report.function = std::move(fn);
  return report;
}

UnitReport analyze_unit(std::vector<SourceFunction> functions, const AnalysisConfig& config) {
  UnitReport unit;
  std::vector<FunctionScore> scores;
  for (SourceFunction& fn : functions) {
    unit.functions.push_back(analyze_function(std::move(fn), config));
    scores.push_back({unit.functions.back().function.loc, unit.functions.back().score});
  }
  unit.file_score = score_file(scores);
  return unit;
}

}  // namespace rguard
