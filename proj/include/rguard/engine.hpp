#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rguard/analysis.hpp"
#include "rguard/providers.hpp"
#include "rguard/validation.hpp"

namespace rguard {

struct EngineLimits {
  int max_function_loc = 130;
  int soft_function_loc = 70;  // above this, prompts carry a size warning
};

class FunctionTooLarge : public Error {
 public:
  FunctionTooLarge(std::string function, int loc, int limit);
  int loc() const { return loc_; }
  int limit() const { return limit_; }

 private:
  int loc_;
  int limit_;
};

/// Layered prompt for one (function, smell) pair.
struct PromptSpec {
  std::string language_tag;
  std::string function_source;
  FunctionKind function_kind = FunctionKind::Standalone;
  SmellKind smell_kind = SmellKind::ComplexMethod;
  std::string smell_description;
  SourceSpan smell_span;  // lines relative to the function's first line
  std::string strategy_hint;
  std::string constraints;
  std::string language_guidance;  // optional, per language
  bool size_warning = false;

  /// language, function_kind, smell, smell_location, constraints, source.
  PromptSections sections() const;
  /// SHA-256 over the rendered sections; the replay key.
  std::string sha256() const;
};

std::string_view strategy_hint(SmellKind kind);

/// Throws FunctionTooLarge when fn.loc > limits.max_function_loc, Error when
/// the smell does not belong to fn.
PromptSpec build_prompt(const SourceFunction& fn, const CodeSmell& smell,
                        const EngineLimits& limits = {});

struct IntRange {
  int min = 0;
  int max = 0;
  bool contains(int v) const { return v >= min && v <= max; }
};

struct SelectionRule {
  std::optional<std::string> language_tag;
  std::optional<SmellKind> smell_kind;
  std::optional<IntRange> loc_range;
  std::optional<IntRange> cc_range;
  std::string provider_id;

  bool matches(const SourceFunction& fn, const CodeSmell& smell) const;
};

/// First matching rule wins, otherwise the default.
struct SelectionPolicy {
  std::vector<SelectionRule> rules;
  std::string default_provider_id;
};

std::string select_provider(const SelectionPolicy& policy, const SourceFunction& fn,
                            const CodeSmell& smell);

struct Candidate {
  ProviderResult result;
  ValidationReport report;
  int changed_lines = 0;

  double health_change() const;
};

/// Every provider call failed at the transport level.
class ProviderUnavailable : public Error {
 public:
  using Error::Error;
};

/// Every candidate validated to Discard.
class AllCandidatesDiscarded : public Error {
 public:
  explicit AllCandidatesDiscarded(std::vector<Candidate> discarded);
  const std::vector<Candidate>& discarded() const { return discarded_; }

 private:
  std::vector<Candidate> discarded_;
};

/// Unit-level input to the engine.
struct RefactorTarget {
  std::string unit_source;  // the whole file
  SourceFunction function;
  CodeSmell smell;
};

struct GenerationResult {
  PromptSpec prompt;
  std::string provider_id;
  std::vector<Candidate> candidates;  // non-discarded, best first
};

class RefactorEngine {
 public:
  RefactorEngine(AnalysisConfig config, SelectionPolicy policy, EngineLimits limits = {},
                 const AdapterRegistry& registry = default_registry());

  void add_provider(std::shared_ptr<const Provider> provider);
  const Provider* provider(std::string_view id) const;

  /// Builds the prompt, asks the selected provider pool_size times with
  /// temperatures 0, 0.2, 0.4, ... (concurrently), validates each distinct
  /// response and returns the survivors sorted by (confidence, health gain
  /// descending, changed lines ascending).
  GenerationResult generate_candidates(const RefactorTarget& target, int pool_size = 3) const;

  const AnalysisConfig& config() const { return config_; }
  const EngineLimits& limits() const { return limits_; }

 private:
  AnalysisConfig config_;
  SelectionPolicy policy_;
  EngineLimits limits_;
  const AdapterRegistry& registry_;
  std::map<std::string, std::shared_ptr<const Provider>, std::less<>> providers_;
};

}  // namespace rguard
