#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rguard/analysis.hpp"

namespace rguard {

struct SkippedFile {
  std::string path;
  std::string reason;
};

struct ScannedFile {
  std::string path;  // lexically normalized, generic separators
  std::string language;
  std::string source;
  UnitReport report;
};

struct Workspace {
  std::vector<ScannedFile> files;  // sorted by path
  std::vector<SkippedFile> skipped;
};

/// Expands directories recursively to files whose extension maps to a
/// language; explicitly named files are always attempted. Files that do
/// not parse are skipped with the parse error as reason.
Workspace scan_workspace(const std::vector<std::string>& paths, const AnalysisConfig& config,
                         const AdapterRegistry& registry = default_registry());

/// Key for a function within a file; the n-th duplicate of a name gets "#n".
std::vector<std::string> function_keys(const UnitReport& report);

struct BaselineFile {
  double score = kMaxHealth;
  std::map<std::string, double> functions;
};

struct Baseline {
  int version = 1;
  std::string created_at;
  std::string fingerprint;
  std::map<std::string, BaselineFile> files;
  std::vector<SkippedFile> skipped;

  nlohmann::json to_json() const;
  static Baseline from_json(const nlohmann::json& j);  // throws Error
  static Baseline load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

/// Throws Error when no file could be parsed.
Baseline snapshot_baseline(const Workspace& workspace, const AnalysisConfig& config);

class StaleBaseline : public Error {
 public:
  using Error::Error;
};

struct Decline {
  std::string file;
  std::string function;
  double before = kMaxHealth;
  double after = kMaxHealth;
};

struct GateTarget {
  std::string file;
  CodeSmell smell;
};

struct GateResult {
  bool passed = true;
  std::vector<Decline> declines;
  std::vector<GateTarget> targets;  // current smells of each declined function
};

/// Fails when a function present in both snapshots lost health, or when a
/// new function has any smell (it is compared against 10.0). Throws
/// StaleBaseline when the configuration fingerprint differs.
GateResult evaluate_gate(const Baseline& baseline, const Workspace& workspace,
                         const AnalysisConfig& config);

}  // namespace rguard
