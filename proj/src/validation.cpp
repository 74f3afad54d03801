#include "rguard/validation.hpp"

#include <algorithm>
#include <cstdio>
#include <cctype>
#include <cstdlib>
#include <map>
#include <set>

namespace rguard {

std::string_view to_string(Confidence confidence) {
  switch (confidence) {
    case Confidence::High: return "High";
    case Confidence::Mid: return "Mid";
    case Confidence::Discard: return "Discard";
  }
  return "?";
}

std::optional<Confidence> confidence_from_string(std::string_view name) {
  for (Confidence c : {Confidence::High, Confidence::Mid, Confidence::Discard})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

std::string_view to_string(StepVerdict verdict) {
  switch (verdict) {
    case StepVerdict::Pass: return "pass";
    case StepVerdict::Demote: return "demote";
    case StepVerdict::Discard: return "discard";
  }
  return "?";
}

std::string_view to_string(CheckOutcome outcome) {
  switch (outcome) {
    case CheckOutcome::Pass: return "pass";
    case CheckOutcome::MinorDeviation: return "minor_deviation";
    case CheckOutcome::MajorDeviation: return "major_deviation";
  }
  return "?";
}

namespace {

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string quoted(std::string_view name) { return "'" + std::string(name) + "'"; }

// The target function before and after, plus helpers the candidate added.
struct Lineage {
  const SourceFunction* original = nullptr;
  const SourceFunction* refactored = nullptr;
  std::vector<const SourceFunction*> helpers;
  std::set<std::string> helper_names;
  std::string error;

  bool ok() const { return error.empty(); }

  std::vector<const SourceFunction*> refactored_side() const {
    std::vector<const SourceFunction*> out{refactored};
    out.insert(out.end(), helpers.begin(), helpers.end());
    return out;
  }
};

Lineage match_lineage(const std::vector<SourceFunction>& original_fns,
                      const std::vector<SourceFunction>& refactored_fns,
                      const std::string& target_name) {
  Lineage lineage;
  std::map<std::string, int> before;
  std::map<std::string, int> after;
  for (const SourceFunction& fn : original_fns) {
    if (++before[fn.name] == 1 && fn.name == target_name) lineage.original = &fn;
  }
  for (const SourceFunction& fn : refactored_fns) ++after[fn.name];

  if (lineage.original == nullptr) {
    lineage.error = "target function " + quoted(target_name) + " not found in original code";
    return lineage;
  }
  if (after[target_name] == 0) {
    lineage.error = "function removed or renamed";
    return lineage;
  }
  for (const auto& [name, count] : after) {
    const int prior = before.contains(name) ? before[name] : 0;
    if (prior == 0 && count > 1) {
      lineage.error = "new function " + quoted(name) + " defined more than once";
      return lineage;
    }
    if (prior > 0 && count > prior) {
      lineage.error = "existing function " + quoted(name) + " redefined";
      return lineage;
    }
  }
  for (const SourceFunction& fn : refactored_fns) {
    if (fn.name == target_name && lineage.refactored == nullptr) lineage.refactored = &fn;
    if (!before.contains(fn.name)) {
      lineage.helpers.push_back(&fn);
      lineage.helper_names.insert(fn.name);
    }
  }
  return lineage;
}

// --- semantic helpers -------------------------------------------------------

std::string callee_name(const Node& callee) {
  switch (callee.kind) {
    case NodeKind::Identifier:
      return *callee.text;
    case NodeKind::MemberAccess:
      return callee_name(callee.children[0]) + "." + *callee.children[1].text;
    case NodeKind::Call:
      return callee_name(callee.children[0]) + "()";
    default:
      return shape_of(callee, ShapeMode::Exact);
  }
}

using Multiset = std::map<std::string, int>;

void add_calls(const Node& root, const std::set<std::string>& excluded, Multiset& out) {
  walk(root, [&](const Node& n) {
    if (n.kind != NodeKind::Call) return;
    std::string name = callee_name(n.children[0]);
    if (!excluded.contains(name)) ++out[name];
  });
}

std::string normalized_literal(const std::string& text) {
  if (!text.empty() && (text.front() == '"' || text.front() == '\''))
    return "s:" + text.substr(1, text.size() - 2);
  if (!text.empty() && std::isdigit(static_cast<unsigned char>(text.front()))) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", std::strtod(text.c_str(), nullptr));
    return std::string("n:") + buf;
  }
  return "k:" + text;
}

void add_literals(const Node& root, Multiset& out) {
  walk(root, [&](const Node& n) {
    if (n.kind == NodeKind::Literal) ++out[normalized_literal(*n.text)];
  });
}

std::string return_shape(const Node& ret) {
  return ret.children.empty() ? std::string("<void>")
                              : shape_of(ret.children[0], ShapeMode::ErasedNames);
}

void add_returns(const Node& root, Multiset& out) {
  walk(root, [&](const Node& n) {
    if (n.kind == NodeKind::Return) ++out[return_shape(n)];
  });
}

// Differences a - b and b - a as "name x2" lists.
std::pair<std::string, std::string> multiset_diff(const Multiset& a, const Multiset& b) {
  auto describe = [](const Multiset& x, const Multiset& y) {
    std::string out;
    for (const auto& [key, count] : x) {
      auto it = y.find(key);
      const int extra = count - (it == y.end() ? 0 : it->second);
      if (extra <= 0) continue;
      if (!out.empty()) out += ", ";
      out += key;
      if (extra > 1) out += " x" + std::to_string(extra);
    }
    return out;
  };
  return {describe(a, b), describe(b, a)};
}

bool is_stub(const SourceFunction& fn) {
  const Node& block = function_block(fn.body);
  return std::all_of(block.children.begin(), block.children.end(), [](const Node& stmt) {
    return stmt.kind == NodeKind::Return && stmt.children.empty();
  });
}

bool calls_any(const Node& root, const std::set<std::string>& names) {
  bool found = false;
  walk(root, [&](const Node& n) {
    if (n.kind == NodeKind::Call && n.children[0].kind == NodeKind::Identifier &&
        names.contains(*n.children[0].text))
      found = true;
  });
  return found;
}

SemanticCheck check_call_set(const Lineage& l) {
  Multiset before;
  Multiset after;
  add_calls(l.original->body, {}, before);
  for (const SourceFunction* fn : l.refactored_side()) add_calls(fn->body, l.helper_names, after);
  auto [missing, added] = multiset_diff(before, after);
  if (!missing.empty())
    return {std::string(semantic_check::kCallSet), CheckOutcome::MajorDeviation,
            "calls dropped: " + missing};
  if (!added.empty())
    return {std::string(semantic_check::kCallSet), CheckOutcome::MinorDeviation,
            "calls added to existing functions: " + added};
  return {std::string(semantic_check::kCallSet), CheckOutcome::Pass,
          "calls to existing functions preserved"};
}

SemanticCheck check_literals(const Lineage& l) {
  Multiset before;
  Multiset after;
  add_literals(l.original->body, before);
  for (const SourceFunction* fn : l.refactored_side()) add_literals(fn->body, after);
  auto [missing, added] = multiset_diff(before, after);
  if (missing.empty() && added.empty())
    return {std::string(semantic_check::kLiterals), CheckOutcome::Pass, "literals preserved"};
  std::string detail = "literals changed";
  if (!missing.empty()) detail += "; removed: " + missing;
  if (!added.empty()) detail += "; added: " + added;
  return {std::string(semantic_check::kLiterals), CheckOutcome::MajorDeviation, detail};
}

SemanticCheck check_empty_stub(const Lineage& l) {
  for (const SourceFunction* helper : l.helpers)
    if (is_stub(*helper))
      return {std::string(semantic_check::kEmptyStub), CheckOutcome::MajorDeviation,
              "new function " + quoted(helper->name) + " is an empty stub"};
  return {std::string(semantic_check::kEmptyStub), CheckOutcome::Pass, "no empty stubs"};
}

SemanticCheck check_redundant(const Lineage& l, const std::vector<SourceFunction>& original_fns) {
  for (const SourceFunction* helper : l.helpers) {
    const std::string shape = shape_of(helper->body, ShapeMode::AlphaRenamed);
    for (const SourceFunction& existing : original_fns)
      if (shape_of(existing.body, ShapeMode::AlphaRenamed) == shape)
        return {std::string(semantic_check::kRedundantReimpl), CheckOutcome::MinorDeviation,
                "new function " + quoted(helper->name) + " re-implements existing " +
                    quoted(existing.name)};
  }
  return {std::string(semantic_check::kRedundantReimpl), CheckOutcome::Pass,
          "no re-implementations of existing functions"};
}

SemanticCheck check_return_surface(const Lineage& l) {
  Multiset before;
  add_returns(l.original->body, before);

  std::map<std::string, const SourceFunction*> helpers;
  for (const SourceFunction* h : l.helpers) helpers[h->name] = h;
  Multiset after;
  walk(l.refactored->body, [&](const Node& n) {
    if (n.kind != NodeKind::Return) return;
    if (!n.children.empty() && n.children[0].kind == NodeKind::Call &&
        n.children[0].children[0].kind == NodeKind::Identifier) {
      auto it = helpers.find(*n.children[0].children[0].text);
      if (it != helpers.end()) {
        add_returns(it->second->body, after);
        return;
      }
    }
    ++after[return_shape(n)];
  });
  if (before == after)
    return {std::string(semantic_check::kReturnSurface), CheckOutcome::Pass,
            "return expressions preserved"};
  auto [missing, added] = multiset_diff(before, after);
  std::string detail = "return expressions changed";
  if (!missing.empty()) detail += "; removed: " + missing;
  if (!added.empty()) detail += "; added: " + added;
  return {std::string(semantic_check::kReturnSurface), CheckOutcome::MajorDeviation, detail};
}

SemanticCheck check_expected_shape(const Lineage& l, const CodeSmell& target) {
  const std::string id(semantic_check::kExpectedShape);
  if (target.kind == SmellKind::DeepNestedLogic) {
    const int before = max_nesting_depth(*l.original);
    const int after = max_nesting_depth(*l.refactored);
    if (after < before)
      return {id, CheckOutcome::Pass,
              "nesting reduced from " + std::to_string(before) + " to " + std::to_string(after)};
    return {id, CheckOutcome::MinorDeviation, "nesting depth of " + quoted(l.refactored->name) +
                                                  " not reduced"};
  }
  if (calls_any(l.refactored->body, l.helper_names))
    return {id, CheckOutcome::Pass, "extract method: " + quoted(l.refactored->name) +
                                        " delegates to extracted function(s)"};
  return {id, CheckOutcome::MinorDeviation,
          "expected an extract-method refactoring but " + quoted(l.refactored->name) +
              " calls no extracted function"};
}

}  // namespace

SyntacticResult validate_syntactic(std::string_view original, std::string_view refactored,
                                   const LanguageAdapter& adapter) {
  SyntacticResult result;
  const std::vector<LintFinding> before = adapter.lint(original);
  std::vector<LintFinding> after;
  try {
    after = adapter.lint(refactored);
  } catch (const ParseError& e) {
    result.parsed = false;
    result.verdict = StepVerdict::Discard;
    result.detail = std::string("refactored code does not parse: ") + e.what();
    return result;
  }
  result.parsed = true;
  result.new_warnings = warning_diff(before, after);
  if (result.new_warnings.empty()) {
    result.verdict = StepVerdict::Pass;
    result.detail = "refactored code parses with no new warnings";
  } else {
    result.verdict = StepVerdict::Demote;
    result.detail = std::to_string(result.new_warnings.size()) + " new warning(s):";
    for (const LintFinding& f : result.new_warnings)
      result.detail += " " + f.rule_id + " (" + f.message + ")";
  }
  return result;
}

SmellHealthResult validate_smell_health(const std::vector<SourceFunction>& original_fns,
                                        const std::vector<SourceFunction>& refactored_fns,
                                        const CodeSmell& target, const AnalysisConfig& config) {
  SmellHealthResult result;
  const Lineage lineage = match_lineage(original_fns, refactored_fns, target.function);
  if (!lineage.ok()) {
    result.verdict = StepVerdict::Discard;
    result.detail = lineage.error;
    return result;
  }

  const UnitReport before = analyze_unit(original_fns, config);
  const UnitReport after = analyze_unit(refactored_fns, config);
  result.delta = health_delta(before.file_score, after.file_score);

  std::array<int, 5> count_before{};
  for (const CodeSmell& s : before.find(target.function)->smells)
    ++count_before[static_cast<std::size_t>(s.kind)];
  std::array<std::vector<std::string>, 5> found_after;
  for (const SourceFunction* fn : lineage.refactored_side())
    for (const CodeSmell& s : after.find(fn->name)->smells)
      found_after[static_cast<std::size_t>(s.kind)].push_back(fn->name);

  const auto target_index = static_cast<std::size_t>(target.kind);
  result.target_smell_resolved = found_after[target_index].size() <
                                 static_cast<std::size_t>(count_before[target_index]);

  bool severe_new_smell = false;
  for (SmellKind kind : kAllSmellKinds) {
    const auto k = static_cast<std::size_t>(kind);
    if (kind == target.kind) continue;
    const auto& names = found_after[k];
    for (std::size_t i = static_cast<std::size_t>(count_before[k]); i < names.size(); ++i) {
      const bool lesser = config.severity.less_severe(kind, target.kind);
      result.new_smells.push_back({kind, names[i], lesser});
      severe_new_smell = severe_new_smell || !lesser;
    }
  }

  const std::string target_name(display_name(target.kind));
  if (!result.target_smell_resolved) {
    result.verdict = StepVerdict::Discard;
    result.detail = "targeted " + target_name + " is still present";
  } else if (result.delta->direction != HealthDirection::Improved) {
    result.verdict = StepVerdict::Discard;
    result.detail = "CodeHealth " + std::string(to_string(result.delta->direction)) + " (" +
                    format_score(result.delta->before.value) + " -> " +
                    format_score(result.delta->after.value) + ")";
  } else if (severe_new_smell) {
    result.verdict = StepVerdict::Discard;
    result.detail = "refactoring introduced a code smell at least as severe as " + target_name;
  } else if (!result.new_smells.empty()) {
    result.verdict = StepVerdict::Demote;
    result.detail = "targeted " + target_name + " resolved, but a new, less severe code smell "
                    "was introduced";
  } else {
    result.verdict = StepVerdict::Pass;
    result.detail = "targeted " + target_name + " resolved and CodeHealth improved";
  }
  return result;
}

SemanticResult validate_semantic(const std::vector<SourceFunction>& original_fns,
                                 const std::vector<SourceFunction>& refactored_fns,
                                 const CodeSmell& target) {
  SemanticResult result;
  const Lineage lineage = match_lineage(original_fns, refactored_fns, target.function);
  if (!lineage.ok()) {
    result.checks.push_back({"LINEAGE", CheckOutcome::MajorDeviation, lineage.error});
    result.outcome = CheckOutcome::MajorDeviation;
    return result;
  }
  result.checks.push_back(check_call_set(lineage));
  result.checks.push_back(check_literals(lineage));
  result.checks.push_back(check_empty_stub(lineage));
  result.checks.push_back(check_redundant(lineage, original_fns));
  result.checks.push_back(check_return_surface(lineage));
  result.checks.push_back(check_expected_shape(lineage, target));
  for (const SemanticCheck& c : result.checks)
    result.outcome = std::max(result.outcome, c.outcome);
  return result;
}

Confidence assign_confidence(StepVerdict syntactic, std::optional<StepVerdict> smell_health,
                             std::optional<CheckOutcome> semantic) {
  if (syntactic == StepVerdict::Discard) return Confidence::Discard;
  if (!smell_health || *smell_health == StepVerdict::Discard) return Confidence::Discard;
  if (!semantic || *semantic == CheckOutcome::MajorDeviation) return Confidence::Discard;
  int demotions = 0;
  if (syntactic == StepVerdict::Demote) ++demotions;
  if (*smell_health == StepVerdict::Demote) ++demotions;
  if (*semantic == CheckOutcome::MinorDeviation) ++demotions;
  switch (demotions) {
    case 0: return Confidence::High;
    case 1: return Confidence::Mid;
    default: return Confidence::Discard;
  }
}

Confidence assign_confidence(const SyntacticResult& syntactic,
                             const std::optional<SmellHealthResult>& smell_health,
                             const std::optional<SemanticResult>& semantic) {
  std::optional<StepVerdict> smell;
  if (smell_health) smell = smell_health->verdict;
  std::optional<CheckOutcome> sem;
  if (semantic) sem = semantic->outcome;
  return assign_confidence(syntactic.verdict, smell, sem);
}

std::string splice_function(std::string_view unit, const SourceFunction& fn,
                            std::string_view replacement) {
  auto [first, last] = byte_range(unit, fn.span);
  std::string out(unit.substr(0, first));
  out += replacement;
  out += unit.substr(last);
  return out;
}

ValidationReport validate_candidate(std::string_view original_unit, const SourceFunction& target_fn,
                                    const CodeSmell& target, std::string_view replacement,
                                    const LanguageAdapter& adapter, const AnalysisConfig& config) {
  ValidationReport report;
  const std::string original = normalize_newlines(original_unit);
  const std::string candidate = normalize_newlines(replacement);
  const std::string refactored = splice_function(original, target_fn, candidate);

  if (candidate.find_first_not_of(" \t\n") == std::string::npos) {
    report.syntactic.detail = "provider response contained no code";
  } else {
    report.syntactic = validate_syntactic(original, refactored, adapter);
  }
  report.rationale.push_back("Syntax: " + report.syntactic.detail +
                             (report.syntactic.verdict == StepVerdict::Demote
                                  ? "; confidence lowered one level."
                                  : "."));

  if (report.syntactic.verdict != StepVerdict::Discard) {
    const auto original_fns = adapter.parse_unit(original);
    const auto refactored_fns = adapter.parse_unit(refactored);
    report.smell_health = validate_smell_health(original_fns, refactored_fns, target, config);
    const SmellHealthResult& sh = *report.smell_health;
    report.rationale.push_back("Code smell: " + sh.detail + ".");
    if (sh.delta)
      report.rationale.push_back("CodeHealth: " + format_score(sh.delta->before.value) + " -> " +
                                 format_score(sh.delta->after.value) + " (" +
                                 std::string(to_string(sh.delta->direction)) + ").");
    for (const NewSmell& s : sh.new_smells)
      report.rationale.push_back(
          "New code smell " + std::string(display_name(s.kind)) + " in " + quoted(s.function) +
          (s.less_severe ? " is less severe than the target; confidence lowered one level."
                         : " is not less severe than the target."));

    if (sh.verdict != StepVerdict::Discard) {
      report.semantic = validate_semantic(original_fns, refactored_fns, target);
      for (const SemanticCheck& c : report.semantic->checks)
        report.rationale.push_back("Semantics " + c.check_id + ": " +
                                   std::string(to_string(c.outcome)) + " (" + c.detail + ").");
    }
  }

  report.confidence = assign_confidence(report.syntactic, report.smell_health, report.semantic);
  report.rationale.push_back("Confidence: " + std::string(to_string(report.confidence)) + ".");
  return report;
}

}  // namespace rguard
