#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rguard/engine.hpp"

namespace rguard {

struct ProviderConfig {
  std::string id;
  std::string type;  // mock | replay | http
  // http
  std::string endpoint;
  std::string model;
  std::map<std::string, std::string> headers;
  int timeout_seconds = 120;
  // mock
  MockBehavior behavior = MockBehavior::Oracle;
  std::optional<std::filesystem::path> fixtures;
  // replay
  std::filesystem::path dir;
};

/// Everything the CLI reads from refactor-guard.json.
struct EngineConfig {
  AnalysisConfig analysis;
  std::vector<ProviderConfig> providers;
  SelectionPolicy policy;
  EngineLimits limits;
  int pool_size = 3;
  std::filesystem::path store_dir = ".refactor-guard";
  AdapterRegistry registry;  // built-ins plus configured extensions
};

/// Parses and validates a config document. Relative paths are resolved
/// against `base_dir`. Unknown keys anywhere are rejected with ConfigError.
EngineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads `path`; ConfigError when missing or malformed.
EngineConfig load_config(const std::filesystem::path& path);

/// Provider instances for every configured provider.
std::vector<std::shared_ptr<const Provider>> build_providers(const EngineConfig& config);

/// Engine wired with the configured policy and providers.
RefactorEngine make_engine(const EngineConfig& config);

}  // namespace rguard
