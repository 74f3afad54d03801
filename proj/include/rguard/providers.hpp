#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rguard/errors.hpp"
#include "rguard/lang_frontend.hpp"

namespace rguard {

/// Ordered (name, text) pairs of a layered prompt.
using PromptSections = std::vector<std::pair<std::string, std::string>>;

namespace prompt_section {
inline constexpr std::string_view kLanguage = "language";
inline constexpr std::string_view kFunctionKind = "function_kind";
inline constexpr std::string_view kSmell = "smell";
inline constexpr std::string_view kSmellLocation = "smell_location";
inline constexpr std::string_view kConstraints = "constraints";
inline constexpr std::string_view kSource = "source";
}  // namespace prompt_section

struct ProviderRequest {
  PromptSections prompt_sections;
  double temperature = 0.0;
  std::size_t max_output_size = 64 * 1024;
  std::string prompt_sha256;

  /// Text of the named section; empty when absent.
  std::string_view section(std::string_view name) const;
};

struct ProviderResult {
  std::string refactored_source;  // extracted code only
  std::string provider_id;
  long latency_ms = 0;
  std::string raw_response_id;
};

/// A single call failed at the transport level (network, missing fixture).
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Completion backend. Implementations must tolerate concurrent calls.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual const std::string& id() const = 0;
  /// Throws TransportError when no response could be obtained.
  virtual ProviderResult complete(const ProviderRequest& request) const = 0;
};

/// Body of the first fenced code block (``` with optional info string).
/// Empty when the response contains none.
std::string extract_code_block(std::string_view response);

/// Curated (original function text -> refactored replacement) pairs. Keys
/// are newline-normalized and trimmed.
class OracleFixtures {
 public:
  void add(std::string_view original, std::string_view refactored);
  const std::string* find(std::string_view original) const;
  std::size_t size() const { return pairs_.size(); }

  /// Loads every *.json under `dir` (recursively). Each file holds either
  /// {"original", "refactored"} or {"source", "function", "refactored"},
  /// where the second form names a function inside a whole unit.
  static OracleFixtures load_dir(const std::filesystem::path& dir,
                                 const AdapterRegistry& registry = default_registry());

 private:
  std::map<std::string, std::string, std::less<>> pairs_;
};

enum class MockBehavior {
  Identity,       // echoes the source
  Oracle,         // curated refactoring from fixtures
  MutateLiteral,  // oracle output with its first number (or string) altered
  DropCall,       // oracle output minus one call to a pre-existing function
  EmptyStub,      // extracts the busiest statement into an empty function
  BreakSyntax,    // oracle output (or source) without its final brace
};
std::string_view to_string(MockBehavior behavior);
std::optional<MockBehavior> mock_behavior_from_string(std::string_view name);

/// Deterministic in-process provider for tests and offline runs.
class MockProvider final : public Provider {
 public:
  MockProvider(std::string id, MockBehavior behavior,
               std::shared_ptr<const OracleFixtures> fixtures = nullptr,
               std::string language_tag = std::string(MiniLangAdapter::kTag));

  const std::string& id() const override { return id_; }
  MockBehavior behavior() const { return behavior_; }
  ProviderResult complete(const ProviderRequest& request) const override;

 private:
  std::string oracle_output(std::string_view source) const;

  std::string id_;
  MockBehavior behavior_;
  std::shared_ptr<const OracleFixtures> fixtures_;
  std::string language_tag_;
};

/// Serves recorded responses keyed by prompt hash: one JSON file per case,
/// {"prompt_sha256": hex, "response": text}.
class ReplayProvider final : public Provider {
 public:
  ReplayProvider(std::string id, const std::filesystem::path& dir);

  const std::string& id() const override { return id_; }
  ProviderResult complete(const ProviderRequest& request) const override;
  std::size_t size() const { return responses_.size(); }

 private:
  std::string id_;
  std::map<std::string, std::string> responses_;
};

/// Chat-completion style endpoint over plain HTTP. POSTs
/// {"model", "messages": [{"role", "content"}], "temperature"} and takes the
/// first fenced code block from the reply.
class HttpProvider final : public Provider {
 public:
  struct Options {
    std::string endpoint;  // http://host[:port]/path
    std::string model;
    std::map<std::string, std::string> headers;
    int timeout_seconds = 120;
  };

  HttpProvider(std::string id, Options options);

  const std::string& id() const override { return id_; }
  ProviderResult complete(const ProviderRequest& request) const override;

 private:
  std::string id_;
  Options options_;
  std::string origin_;  // scheme://host:port
  std::string path_;
};

}  // namespace rguard
