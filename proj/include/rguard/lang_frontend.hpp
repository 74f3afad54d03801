#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rguard/code_model.hpp"
#include "rguard/errors.hpp"

namespace rguard {

class ParseError : public Error {
 public:
  ParseError(SourceSpan span, const std::string& message);
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

struct LintFinding {
  std::string rule_id;
  SourceSpan span;
  std::string message;

  friend bool operator==(const LintFinding&, const LintFinding&) = default;
};

namespace lint_rule {
inline constexpr std::string_view kUnusedVar = "UNUSED_VAR";
inline constexpr std::string_view kUnreachableCode = "UNREACHABLE_CODE";
inline constexpr std::string_view kShadowedParam = "SHADOWED_PARAM";
}  // namespace lint_rule

/// Seam between the engine and a concrete language. Implementations must be
/// pure: identical input yields identical output.
class LanguageAdapter {
 public:
  virtual ~LanguageAdapter() = default;

  virtual std::string_view language_tag() const = 0;

  /// Every top-level function in source order. Throws ParseError on the
  /// first syntax error; no partial results.
  virtual std::vector<SourceFunction> parse_unit(std::string_view source,
                                                 std::string_view file = {}) const = 0;

  /// Ordered findings. Throws ParseError when the source does not parse.
  virtual std::vector<LintFinding> lint(std::string_view source,
                                        std::string_view file = {}) const = 0;
};

/// Reference front-end for MiniLang, a small JavaScript-like language.
class MiniLangAdapter final : public LanguageAdapter {
 public:
  static constexpr std::string_view kTag = "minilang";

  std::string_view language_tag() const override { return kTag; }
  std::vector<SourceFunction> parse_unit(std::string_view source,
                                         std::string_view file = {}) const override;
  std::vector<LintFinding> lint(std::string_view source,
                                std::string_view file = {}) const override;
};

/// Lint rules over already-parsed functions (shared by adapters that reuse
/// the code model).
std::vector<LintFinding> lint_functions(const std::vector<SourceFunction>& functions);

/// Tag -> adapter table plus file-extension mapping. Populate at startup;
/// afterwards only const access is used.
class AdapterRegistry {
 public:
  AdapterRegistry();  // registers MiniLang with default extensions

  void add(std::shared_ptr<const LanguageAdapter> adapter);
  void map_extension(std::string extension, std::string language_tag);
  void clear_extensions() { extensions_.clear(); }

  const LanguageAdapter& get(std::string_view language_tag) const;  // throws Error
  const LanguageAdapter* find(std::string_view language_tag) const;
  /// Longest matching extension suffix wins (".ml.js" over ".js").
  std::optional<std::string> language_for_path(std::string_view path) const;
  const std::map<std::string, std::string>& extensions() const { return extensions_; }

 private:
  std::map<std::string, std::shared_ptr<const LanguageAdapter>, std::less<>> adapters_;
  std::map<std::string, std::string> extensions_;
};

/// Process-wide registry containing the built-in adapters.
const AdapterRegistry& default_registry();

std::vector<SourceFunction> parse_unit(std::string_view source, std::string_view language_tag);
std::vector<LintFinding> lint(std::string_view source, std::string_view language_tag);

/// Findings in `refactored` with no counterpart in `original`, matched by
/// rule id and message (spans ignored). Multiset semantics.
std::vector<LintFinding> warning_diff(const std::vector<LintFinding>& original,
                                      const std::vector<LintFinding>& refactored);

/// Replaces CRLF / lone CR with LF.
std::string normalize_newlines(std::string_view text);

}  // namespace rguard
