#include "rguard/config.hpp"

#include <set>

#include "rguard/fs_util.hpp"
#include "rguard/json_io.hpp"

namespace rguard {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Typed accessors that name the offending key in every error.
class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) fail(where_ + " must be an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [key, _] : obj_.items())
      if (!known.contains(key)) fail("unknown key '" + key + "' in " + where_);
  }

  bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }
  const json& at(const char* key) const { return obj_.at(key); }
  std::string path(const char* key) const { return where_ + "." + key; }

  const json& require(const char* key) const {
    if (!obj_.contains(key)) fail(where_ + " is missing required key '" + key + "'");
    return obj_.at(key);
  }

  int integer(const char* key) const {
    const json& v = require(key);
    if (!v.is_number_integer()) fail(path(key) + " must be an integer");
    return v.get<int>();
  }
  std::string string(const char* key) const {
    const json& v = require(key);
    if (!v.is_string()) fail(path(key) + " must be a string");
    return v.get<std::string>();
  }

  [[noreturn]] static void fail(const std::string& message) { throw ConfigError(message); }

 private:
  const json& obj_;
  std::string where_;
};

SmellKind smell_kind(const json& v, const std::string& where) {
  if (v.is_string())
    if (auto kind = smell_kind_from_string(v.get<std::string>())) return *kind;
  throw ConfigError(where + ": unknown smell kind " + v.dump());
}

IntRange int_range(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw ConfigError(where + " must be a [min, max] pair of integers");
  IntRange r{v[0].get<int>(), v[1].get<int>()};
  if (r.min > r.max) throw ConfigError(where + ": min exceeds max");
  return r;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

void parse_thresholds(const Reader& r, Thresholds& t) {
  r.allow({"complex_conditional_min_ops", "complex_method_min_cc", "deep_nesting_min_depth",
           "bumpy_road_min_bumps", "bumpy_road_min_bump_depth", "large_method_min_loc"});
  auto set = [&](const char* key, int& field) {
    if (r.has(key)) field = r.integer(key);
  };
  set("complex_conditional_min_ops", t.complex_conditional_min_ops);
  set("complex_method_min_cc", t.complex_method_min_cc);
  set("deep_nesting_min_depth", t.deep_nesting_min_depth);
  set("bumpy_road_min_bumps", t.bumpy_road_min_bumps);
  set("bumpy_road_min_bump_depth", t.bumpy_road_min_bump_depth);
  set("large_method_min_loc", t.large_method_min_loc);
}

ProviderConfig parse_provider(const json& v, std::size_t index, const fs::path& base) {
  const Reader r(v, "providers[" + std::to_string(index) + "]");
  ProviderConfig p;
  p.id = r.string("id");
  p.type = r.string("type");
  if (p.id.empty()) Reader::fail(r.path("id") + " must not be empty");
  if (p.type == "mock") {
    r.allow({"id", "type", "behavior", "fixtures"});
    if (r.has("behavior")) {
      const auto b = mock_behavior_from_string(r.string("behavior"));
      if (!b) Reader::fail(r.path("behavior") + ": unknown mock behavior '" + r.string("behavior") + "'");
      p.behavior = *b;
    }
    if (r.has("fixtures")) p.fixtures = resolve(base, r.string("fixtures"));
    if (p.behavior != MockBehavior::Identity && p.behavior != MockBehavior::EmptyStub &&
        p.behavior != MockBehavior::BreakSyntax && !p.fixtures)
      Reader::fail(r.path("fixtures") + " is required for mock behavior '" +
                   std::string(to_string(p.behavior)) + "'");
  } else if (p.type == "replay") {
    r.allow({"id", "type", "dir"});
    p.dir = resolve(base, r.string("dir"));
  } else if (p.type == "http") {
    r.allow({"id", "type", "endpoint", "model", "headers", "timeout_seconds"});
    p.endpoint = r.string("endpoint");
    if (p.endpoint.rfind("http://", 0) != 0)
      Reader::fail(r.path("endpoint") + " must be an http:// URL");
    if (r.has("model")) p.model = r.string("model");
    if (r.has("timeout_seconds")) p.timeout_seconds = r.integer("timeout_seconds");
    if (r.has("headers")) {
      const json& h = r.at("headers");
      if (!h.is_object()) Reader::fail(r.path("headers") + " must be an object");
      for (const auto& [k, val] : h.items()) {
        if (!val.is_string()) Reader::fail(r.path("headers") + "." + k + " must be a string");
        p.headers[k] = val.get<std::string>();
      }
    }
  } else {
    Reader::fail(r.path("type") + " must be one of mock, replay, http");
  }
  return p;
}

SelectionPolicy parse_policy(const Reader& r) {
  r.allow({"rules", "default"});
  SelectionPolicy policy;
  if (r.has("default")) policy.default_provider_id = r.string("default");
  if (!r.has("rules")) return policy;
  const json& rules = r.at("rules");
  if (!rules.is_array()) Reader::fail("policy.rules must be an array");
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const std::string where = "policy.rules[" + std::to_string(i) + "]";
    const Reader rule(rules[i], where);
    rule.allow({"match", "provider_id"});
    SelectionRule out;
    out.provider_id = rule.string("provider_id");
    if (rule.has("match")) {
      const Reader m(rule.at("match"), where + ".match");
      m.allow({"language_tag", "smell_kind", "loc_range", "cc_range"});
      if (m.has("language_tag")) out.language_tag = m.string("language_tag");
      if (m.has("smell_kind")) out.smell_kind = smell_kind(m.at("smell_kind"), m.path("smell_kind"));
      if (m.has("loc_range")) out.loc_range = int_range(m.at("loc_range"), m.path("loc_range"));
      if (m.has("cc_range")) out.cc_range = int_range(m.at("cc_range"), m.path("cc_range"));
    }
    policy.rules.push_back(std::move(out));
  }
  return policy;
}

}  // namespace

EngineConfig parse_config(const json& doc, const fs::path& base_dir) {
  const Reader r(doc, "config");
  r.allow({"thresholds", "health_weights", "severity_order", "providers", "policy",
           "max_function_loc", "soft_function_loc", "pool_size", "store_dir", "extensions"});
  EngineConfig c;
  if (r.has("thresholds")) parse_thresholds(Reader(r.at("thresholds"), "thresholds"), c.analysis.thresholds);
  if (r.has("health_weights")) {
    (void)Reader(r.at("health_weights"), "health_weights");  // object check
    for (const auto& [key, value] : r.at("health_weights").items()) {
      const SmellKind kind = smell_kind(json(key), "health_weights");
      if (!value.is_number()) Reader::fail("health_weights." + key + " must be a number");
      c.analysis.weights.set(kind, value.get<double>());
    }
  }
  if (r.has("severity_order")) {
    const json& order = r.at("severity_order");
    if (!order.is_array() || order.size() != kAllSmellKinds.size())
      Reader::fail("severity_order must list all five smell kinds");
    std::array<SmellKind, 5> kinds{};
    for (std::size_t i = 0; i < kinds.size(); ++i) kinds[i] = smell_kind(order[i], "severity_order");
    c.analysis.severity = SeverityOrder(kinds);
  }
  c.analysis.validate();

  if (r.has("providers")) {
    const json& providers = r.at("providers");
    if (!providers.is_array()) Reader::fail("providers must be an array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < providers.size(); ++i) {
      c.providers.push_back(parse_provider(providers[i], i, base_dir));
      if (!ids.insert(c.providers.back().id).second)
        Reader::fail("duplicate provider id '" + c.providers.back().id + "'");
    }
  }
  if (r.has("policy")) c.policy = parse_policy(Reader(r.at("policy"), "policy"));
  if (c.policy.default_provider_id.empty() && !c.providers.empty())
    c.policy.default_provider_id = c.providers.front().id;
  auto known = [&](const std::string& id) {
    for (const ProviderConfig& p : c.providers)
      if (p.id == id) return true;
    return false;
  };
  if (!c.policy.default_provider_id.empty() && !known(c.policy.default_provider_id))
    Reader::fail("policy.default names unknown provider '" + c.policy.default_provider_id + "'");
  for (const SelectionRule& rule : c.policy.rules)
    if (!known(rule.provider_id)) Reader::fail("policy rule names unknown provider '" + rule.provider_id + "'");

  if (r.has("max_function_loc")) c.limits.max_function_loc = r.integer("max_function_loc");
  if (r.has("soft_function_loc")) c.limits.soft_function_loc = r.integer("soft_function_loc");
  if (c.limits.max_function_loc < 1 || c.limits.soft_function_loc < 1)
    Reader::fail("function size limits must be at least 1");
  if (r.has("pool_size")) c.pool_size = r.integer("pool_size");
  if (c.pool_size < 1) Reader::fail("pool_size must be at least 1");
  c.store_dir = resolve(base_dir, r.has("store_dir") ? r.string("store_dir") : c.store_dir.string());

  if (r.has("extensions")) {
    const json& ext = r.at("extensions");
    if (!ext.is_object()) Reader::fail("extensions must be an object mapping suffix to language");
    for (const auto& [suffix, tag] : ext.items()) {
      if (!tag.is_string() || !c.registry.find(tag.get<std::string>()))
        Reader::fail("extensions." + suffix + " names an unknown language");
      if (suffix.empty() || suffix.front() != '.')
        Reader::fail("extension '" + suffix + "' must start with '.'");
      c.registry.map_extension(suffix, tag.get<std::string>());
    }
  }
  return c;
}

EngineConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");
  try {
    return parse_config(doc, path.has_parent_path() ? path.parent_path() : fs::path("."));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<std::shared_ptr<const Provider>> build_providers(const EngineConfig& config) {
  std::vector<std::shared_ptr<const Provider>> out;
  for (const ProviderConfig& p : config.providers) {
    if (p.type == "mock") {
      std::shared_ptr<const OracleFixtures> fixtures;
      if (p.fixtures)
        fixtures = std::make_shared<OracleFixtures>(OracleFixtures::load_dir(*p.fixtures, config.registry));
      out.push_back(std::make_shared<MockProvider>(p.id, p.behavior, std::move(fixtures)));
    } else if (p.type == "replay") {
      out.push_back(std::make_shared<ReplayProvider>(p.id, p.dir));
    } else {
      out.push_back(std::make_shared<HttpProvider>(
          p.id, HttpProvider::Options{p.endpoint, p.model, p.headers, p.timeout_seconds}));
    }
  }
  return out;
}

RefactorEngine make_engine(const EngineConfig& config) {
  RefactorEngine engine(config.analysis, config.policy, config.limits, config.registry);
  for (auto& provider : build_providers(config)) engine.add_provider(std::move(provider));
  return engine;
}

}  // namespace rguard
