#include "rguard/engine.hpp"

#include <algorithm>
#include <future>
#include <set>

#include "rguard/diff.hpp"
#include "rguard/hashing.hpp"

namespace rguard {

FunctionTooLarge::FunctionTooLarge(std::string function, int loc, int limit)
    : Error("function '" + function + "' has " + std::to_string(loc) +
            " lines of code; refactoring is limited to functions of at most " +
            std::to_string(limit) + " lines"),
      loc_(loc),
      limit_(limit) {}

namespace {

std::string language_description(std::string_view tag) {
  if (tag == MiniLangAdapter::kTag)
    return "MiniLang, a small JavaScript subset: top-level functions, `let`, if/else, while, "
           "for, switch, return and expressions. No classes, closures or exceptions.";
  return std::string(tag);
}

// Language-specific advice appended to the language section. MiniLang has
// no receiver keyword or other traps worth mentioning.
std::string language_guidance(std::string_view tag) {
  (void)tag;
  return {};
}

std::string describe(const CodeSmell& smell) {
  const std::string value = std::to_string(smell.metric_value);
  const std::string limit = " (threshold " + std::to_string(smell.threshold) + ").";
  std::string text(display_name(smell.kind));
  switch (smell.kind) {
    case SmellKind::ComplexMethod:
      return text + ": cyclomatic complexity is " + value + limit;
    case SmellKind::BumpyRoad:
      return text + ": " + value + " separate chunks of nested conditional logic" + limit;
    case SmellKind::DeepNestedLogic:
      return text + ": conditional logic is nested " + value + " levels deep" + limit;
    case SmellKind::ComplexConditional:
      return text + ": a condition combines " + value + " logical operators" + limit;
    case SmellKind::LargeMethod:
      return text + ": the function has " + value + " lines of code" + limit;
  }
  return text;
}

constexpr std::string_view kConstraints =
    "Preserve the behavior exactly: keep every literal value, every call to existing "
    "functions and every returned value. Make the minimal change that removes the code smell "
    "and nothing else. Keep the function's name and parameters. New helper functions must be "
    "top-level functions with new, descriptive names. Reply with the refactored function "
    "followed by any new helper functions, in a single fenced code block.";

}  // namespace

std::string_view strategy_hint(SmellKind kind) {
  switch (kind) {
    case SmellKind::ComplexConditional:
      return "Decompose the conditional into well-named helper functions that each return part "
             "of the condition.";
    case SmellKind::ComplexMethod:
      return "Use extract method: move cohesive groups of branches into well-named helper "
             "functions and call them from the original function.";
    case SmellKind::LargeMethod:
      return "Use extract method: split the function into smaller helper functions along its "
             "natural steps and call them in order.";
    case SmellKind::BumpyRoad:
      return "Use extract method: move each chunk of nested conditional logic into its own "
             "well-named helper function.";
    case SmellKind::DeepNestedLogic:
      return "Flatten the nesting: combine nested conditions or use guard clauses so the "
             "deepest logic sits fewer levels down.";
  }
  return {};
}

PromptSections PromptSpec::sections() const {
  std::string language = language_description(language_tag);
  if (!language_guidance.empty()) language += "\n" + language_guidance;
  std::string kind = function_kind == FunctionKind::ClassMember ? "Class member function."
                                                                  : "Standalone function.";
  std::string location = "Lines " + std::to_string(smell_span.start_line) + "-" +
                         std::to_string(smell_span.end_line) + " of the function (line 1 is the "
                         "function header).";
  std::string rules = constraints;
  if (size_warning)
    rules += " The function is long; keep the change focused on the smell location.";
  return {
      {std::string(prompt_section::kLanguage), std::move(language)},
      {std::string(prompt_section::kFunctionKind), std::move(kind)},
      {std::string(prompt_section::kSmell), smell_description + "\nStrategy: " + strategy_hint},
      {std::string(prompt_section::kSmellLocation), std::move(location)},
      {std::string(prompt_section::kConstraints), std::move(rules)},
      {std::string(prompt_section::kSource), function_source},
  };
}

std::string PromptSpec::sha256() const {
  std::string rendered;
  for (const auto& [name, text] : sections()) {
    rendered += "### " + name + "\n";
    rendered += text;
    rendered += "\n";
  }
  return sha256_hex(rendered);
}

PromptSpec build_prompt(const SourceFunction& fn, const CodeSmell& smell, const EngineLimits& limits) {
  if (smell.function != fn.name || !fn.span.contains(smell.span))
    throw Error("smell does not belong to function '" + fn.name + "'");
  if (fn.loc > limits.max_function_loc)
    throw FunctionTooLarge(fn.name, fn.loc, limits.max_function_loc);

  PromptSpec spec;
  spec.language_tag = fn.language;
  spec.function_source = fn.text;
  spec.function_kind = fn.kind;
  spec.smell_kind = smell.kind;
  spec.smell_description = describe(smell);
  spec.smell_span = smell.span;
  spec.smell_span.file.clear();
  spec.smell_span.start_line = smell.span.start_line - fn.span.start_line + 1;
  spec.smell_span.end_line = smell.span.end_line - fn.span.start_line + 1;
  spec.strategy_hint = strategy_hint(smell.kind);
  spec.constraints = kConstraints;
  spec.language_guidance = language_guidance(fn.language);
  spec.size_warning = fn.loc > limits.soft_function_loc;
  return spec;
}

bool SelectionRule::matches(const SourceFunction& fn, const CodeSmell& smell) const {
  if (language_tag && *language_tag != fn.language) return false;
  if (smell_kind && *smell_kind != smell.kind) return false;
  if (loc_range && !loc_range->contains(fn.loc)) return false;
  if (cc_range && !cc_range->contains(cyclomatic_complexity(fn))) return false;
  return true;
}

std::string select_provider(const SelectionPolicy& policy, const SourceFunction& fn,
                            const CodeSmell& smell) {
  for (const SelectionRule& rule : policy.rules)
    if (rule.matches(fn, smell)) return rule.provider_id;
  return policy.default_provider_id;
}

double Candidate::health_change() const {
  if (report.smell_health && report.smell_health->delta) return report.smell_health->delta->change();
  return 0.0;
}

AllCandidatesDiscarded::AllCandidatesDiscarded(std::vector<Candidate> discarded)
    : Error("no candidate refactoring passed validation (" + std::to_string(discarded.size()) +
            " discarded)"),
      discarded_(std::move(discarded)) {}

RefactorEngine::RefactorEngine(AnalysisConfig config, SelectionPolicy policy, EngineLimits limits,
                               const AdapterRegistry& registry)
    : config_(std::move(config)), policy_(std::move(policy)), limits_(limits), registry_(registry) {}

void RefactorEngine::add_provider(std::shared_ptr<const Provider> provider) {
  const std::string id = provider->id();
  providers_[id] = std::move(provider);
}

const Provider* RefactorEngine::provider(std::string_view id) const {
  auto it = providers_.find(id);
  return it == providers_.end() ? nullptr : it->second.get();
}

GenerationResult RefactorEngine::generate_candidates(const RefactorTarget& target,
                                                     int pool_size) const {
  if (pool_size < 1) throw Error("pool size must be at least 1");
  GenerationResult out;
  out.prompt = build_prompt(target.function, target.smell, limits_);
  out.provider_id = select_provider(policy_, target.function, target.smell);
  const Provider* chosen = provider(out.provider_id);
  if (!chosen) throw ConfigError("selection policy chose unknown provider '" + out.provider_id + "'");
  const LanguageAdapter& adapter = registry_.get(target.function.language);

  const PromptSections sections = out.prompt.sections();
  const std::string prompt_hash = out.prompt.sha256();
  std::vector<std::future<ProviderResult>> calls;
  for (int i = 0; i < pool_size; ++i) {
    ProviderRequest request{sections, 0.2 * i, 64 * 1024, prompt_hash};
    calls.push_back(std::async(std::launch::async,
                               [chosen, request = std::move(request)] { return chosen->complete(request); }));
  }

  std::vector<ProviderResult> responses;
  std::string first_failure;
  for (auto& call : calls) {
    try {
      responses.push_back(call.get());
    } catch (const std::exception& e) {
      if (first_failure.empty()) first_failure = e.what();
    }
  }
  if (responses.empty()) throw ProviderUnavailable("provider '" + out.provider_id + "' failed: " + first_failure);

  // Arrival order must not matter: canonicalize before de-duplicating.
  std::sort(responses.begin(), responses.end(), [](const ProviderResult& a, const ProviderResult& b) {
    return std::tie(a.refactored_source, a.provider_id) < std::tie(b.refactored_source, b.provider_id);
  });
  std::set<std::string> seen;
  std::vector<Candidate> kept;
  std::vector<Candidate> discarded;
  for (ProviderResult& response : responses) {
    if (!seen.insert(response.refactored_source).second) continue;
    Candidate c;
    c.report = validate_candidate(target.unit_source, target.function, target.smell,
                                  response.refactored_source, adapter, config_);
    c.changed_lines = changed_line_count(target.function.text, response.refactored_source);
    c.result = std::move(response);
    (c.report.confidence == Confidence::Discard ? discarded : kept).push_back(std::move(c));
  }
  if (kept.empty()) throw AllCandidatesDiscarded(std::move(discarded));

  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
    if (a.report.confidence != b.report.confidence) return a.report.confidence < b.report.confidence;
    if (a.health_change() != b.health_change()) return a.health_change() > b.health_change();
    if (a.changed_lines != b.changed_lines) return a.changed_lines < b.changed_lines;
    return std::tie(a.result.refactored_source, a.result.provider_id) <
           std::tie(b.result.refactored_source, b.result.provider_id);
  });
  out.candidates = std::move(kept);
  return out;
}

}  // namespace rguard
