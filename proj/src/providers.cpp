#include "rguard/providers.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "rguard/hashing.hpp"

namespace rguard {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view ProviderRequest::section(std::string_view name) const {
  for (const auto& [key, text] : prompt_sections)
    if (key == name) return text;
  return {};
}

std::string extract_code_block(std::string_view response) {
  const std::string text = normalize_newlines(response);
  std::size_t open = text.find("```");
  if (open == std::string::npos) return {};
  const std::size_t body = text.find('\n', open);
  if (body == std::string::npos) return {};
  std::size_t close = text.find("\n```", body);
  if (close == std::string::npos) return {};
  return text.substr(body + 1, close + 1 - (body + 1));
}

// --- oracle fixtures ----------------------------------------------------------

namespace {

std::string fixture_key(std::string_view text) {
  std::string s = normalize_newlines(text);
  const auto first = s.find_first_not_of(" \t\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\n");
  return s.substr(first, last - first + 1);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> json_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("fixture directory not found: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void OracleFixtures::add(std::string_view original, std::string_view refactored) {
  pairs_[fixture_key(original)] = normalize_newlines(refactored);
}

const std::string* OracleFixtures::find(std::string_view original) const {
  auto it = pairs_.find(fixture_key(original));
  return it == pairs_.end() ? nullptr : &it->second;
}

OracleFixtures OracleFixtures::load_dir(const fs::path& dir, const AdapterRegistry& registry) {
  OracleFixtures fixtures;
  for (const fs::path& path : json_files(dir)) {
    try {
      const json j = json::parse(read_text(path));
      const auto refactored = j.at("refactored").get<std::string>();
      if (j.contains("original")) {
        fixtures.add(j.at("original").get<std::string>(), refactored);
        continue;
      }
      const auto source = j.at("source").get<std::string>();
      const auto name = j.at("function").get<std::string>();
      const std::string language = j.value("language", std::string(MiniLangAdapter::kTag));
      bool found = false;
      for (const SourceFunction& fn : registry.get(language).parse_unit(source)) {
        if (fn.name != name) continue;
        fixtures.add(fn.text, refactored);
        found = true;
        break;
      }
      if (!found) throw Error("function '" + name + "' not in source");
    } catch (const std::exception& e) {
      throw ConfigError("bad oracle fixture " + path.string() + ": " + e.what());
    }
  }
  return fixtures;
}

// --- mock provider ------------------------------------------------------------

std::string_view to_string(MockBehavior behavior) {
  switch (behavior) {
    case MockBehavior::Identity: return "identity";
    case MockBehavior::Oracle: return "oracle";
    case MockBehavior::MutateLiteral: return "mutate_literal";
    case MockBehavior::DropCall: return "drop_call";
    case MockBehavior::EmptyStub: return "empty_stub";
    case MockBehavior::BreakSyntax: return "break_syntax";
  }
  return "?";
}

std::optional<MockBehavior> mock_behavior_from_string(std::string_view name) {
  for (MockBehavior b : {MockBehavior::Identity, MockBehavior::Oracle, MockBehavior::MutateLiteral,
                         MockBehavior::DropCall, MockBehavior::EmptyStub, MockBehavior::BreakSyntax})
    if (to_string(b) == name) return b;
  return std::nullopt;
}

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

// Bumps the first number literal outside strings and comments; falls back to
// altering the first string literal. Returns false when the code has none.
bool mutate_first_literal(std::string& code) {
  std::optional<std::pair<std::size_t, std::size_t>> first_string;
  std::size_t i = 0;
  while (i < code.size()) {
    const char c = code[i];
    if (c == '/' && i + 1 < code.size() && code[i + 1] == '/') {
      i = code.find('\n', i);
      if (i == std::string::npos) break;
    } else if (c == '/' && i + 1 < code.size() && code[i + 1] == '*') {
      i = code.find("*/", i + 2);
      if (i == std::string::npos) break;
      i += 2;
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < code.size() && code[j] != c) j += code[j] == '\\' ? 2 : 1;
      if (!first_string) first_string = {i, j};
      i = j + 1;
    } else if (std::isdigit(static_cast<unsigned char>(c)) && (i == 0 || !ident_char(code[i - 1]))) {
      std::size_t j = i;
      while (j < code.size() && (std::isdigit(static_cast<unsigned char>(code[j])) || code[j] == '.')) ++j;
      const double value = std::stod(code.substr(i, j - i));
      std::ostringstream out;
      out << value + 1;
      code.replace(i, j - i, out.str());
      return true;
    } else {
      ++i;
    }
  }
  if (!first_string) return false;
  code.insert(first_string->second, "_mutated");
  return true;
}

std::string callee_identifier(const Node& call) {
  const Node& callee = call.children[0];
  if (callee.kind == NodeKind::Identifier) return *callee.text;
  if (callee.kind == NodeKind::MemberAccess) return "." + *callee.children[1].text;
  return {};
}

struct CallSite {
  const Node* call = nullptr;
  const Node* statement = nullptr;  // ExprStmt wrapping exactly this call
};

void find_call(const Node& node, const Node* parent, const std::set<std::string>& skip,
               CallSite& site) {
  if (site.call) return;
  if (node.kind == NodeKind::Call && !skip.contains(callee_identifier(node))) {
    site.call = &node;
    if (parent && parent->kind == NodeKind::ExprStmt) site.statement = parent;
    return;
  }
  for (const Node& child : node.children) find_call(child, &node, skip, site);
}

// Removes the first call to a function that the code does not define itself.
bool drop_first_call(std::string& code, const LanguageAdapter& adapter) {
  const auto fns = adapter.parse_unit(code);
  std::set<std::string> defined;
  for (const SourceFunction& fn : fns) defined.insert(fn.name);
  for (const SourceFunction& fn : fns) {
    CallSite site;
    find_call(fn.body, nullptr, defined, site);
    if (!site.call) continue;
    if (site.statement) {
      auto [first, last] = byte_range(code, site.statement->span);
      code.erase(first, last - first);
    } else {
      const auto& args = site.call->children;
      const std::string replacement =
          args.size() > 1 ? std::string(span_text(code, args[1].span)) : "undefined";
      auto [first, last] = byte_range(code, site.call->span);
      code.replace(first, last - first, replacement);
    }
    return true;
  }
  return false;
}

std::string empty_stub_extraction(std::string_view source, const LanguageAdapter& adapter) {
  const std::string code(source);
  const auto fns = adapter.parse_unit(code);
  if (fns.empty()) return code;
  const SourceFunction& fn = fns.front();
  const std::string helper = fn.name + "Extracted";
  const Node& block = function_block(fn.body);
  std::string out = code;
  if (block.children.empty()) {
    auto [first, last] = byte_range(code, block.span);
    out.replace(first, last - first, "{\n  " + helper + "();\n}");
  } else {
    const Node* busiest = &block.children.front();
    std::size_t most = branch_nodes(*busiest).size();
    for (const Node& stmt : block.children) {
      const std::size_t n = branch_nodes(stmt).size();
      if (n > most) {
        most = n;
        busiest = &stmt;
      }
    }
    auto [first, last] = byte_range(code, busiest->span);
    out.replace(first, last - first, helper + "();");
  }
  return out + "\n\nfunction " + helper + "() {\n}";
}

}  // namespace

MockProvider::MockProvider(std::string id, MockBehavior behavior,
                           std::shared_ptr<const OracleFixtures> fixtures, std::string language_tag)
    : id_(std::move(id)),
      behavior_(behavior),
      fixtures_(std::move(fixtures)),
      language_tag_(std::move(language_tag)) {}

std::string MockProvider::oracle_output(std::string_view source) const {
  const std::string* hit = fixtures_ ? fixtures_->find(source) : nullptr;
  if (!hit) throw TransportError("mock provider '" + id_ + "': no oracle fixture for this function");
  return *hit;
}

ProviderResult MockProvider::complete(const ProviderRequest& request) const {
  const auto start = std::chrono::steady_clock::now();
  const std::string source = normalize_newlines(request.section(prompt_section::kSource));
  const LanguageAdapter& adapter = default_registry().get(language_tag_);
  std::string code;
  switch (behavior_) {
    case MockBehavior::Identity:
      code = source;
      break;
    case MockBehavior::Oracle:
      code = oracle_output(source);
      break;
    case MockBehavior::MutateLiteral:
      code = oracle_output(source);
      if (!mutate_first_literal(code)) throw TransportError("mock provider: no literal to mutate");
      break;
    case MockBehavior::DropCall:
      code = oracle_output(source);
      if (!drop_first_call(code, adapter)) throw TransportError("mock provider: no call to drop");
      break;
    case MockBehavior::EmptyStub:
      code = empty_stub_extraction(source, adapter);
      break;
    case MockBehavior::BreakSyntax: {
      const std::string* hit = fixtures_ ? fixtures_->find(source) : nullptr;
      code = hit ? *hit : source;
      const auto brace = code.rfind('}');
      if (brace != std::string::npos) code.erase(brace, 1);
      break;
    }
  }
  ProviderResult result;
  result.refactored_source = std::move(code);
  result.provider_id = id_;
  result.raw_response_id = std::string(to_string(behavior_)) + ":" + request.prompt_sha256.substr(0, 12);
  result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return result;
}

// --- replay provider ----------------------------------------------------------

ReplayProvider::ReplayProvider(std::string id, const fs::path& dir) : id_(std::move(id)) {
  for (const fs::path& path : json_files(dir)) {
    try {
      const json j = json::parse(read_text(path));
      responses_[j.at("prompt_sha256").get<std::string>()] = j.at("response").get<std::string>();
    } catch (const std::exception& e) {
      throw ConfigError("bad replay fixture " + path.string() + ": " + e.what());
    }
  }
}

ProviderResult ReplayProvider::complete(const ProviderRequest& request) const {
  auto it = responses_.find(request.prompt_sha256);
  if (it == responses_.end())
    throw TransportError("replay provider '" + id_ + "': no recording for prompt " +
                         request.prompt_sha256);
  ProviderResult result;
  result.refactored_source = extract_code_block(it->second);
  result.provider_id = id_;
  result.raw_response_id = it->first;
  return result;
}

// --- HTTP provider ------------------------------------------------------------

namespace {

std::string render_user_message(const PromptSections& sections) {
  std::string out;
  for (const auto& [name, text] : sections) {
    if (name == prompt_section::kConstraints) continue;
    if (!out.empty()) out += "\n\n";
    out += "## " + name + "\n";
    out += name == prompt_section::kSource ? "```\n" + text + "\n```" : text;
  }
  return out;
}

}  // namespace

HttpProvider::HttpProvider(std::string id, Options options)
    : id_(std::move(id)), options_(std::move(options)) {
  const std::string& url = options_.endpoint;
  if (url.rfind("http://", 0) != 0)
    throw ConfigError("provider '" + id_ + "': endpoint must be an http:// URL, got '" + url + "'");
  const std::size_t path_start = url.find('/', 7);
  origin_ = path_start == std::string::npos ? url : url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (origin_.size() <= 7) throw ConfigError("provider '" + id_ + "': endpoint has no host");
}

ProviderResult HttpProvider::complete(const ProviderRequest& request) const {
  const auto start = std::chrono::steady_clock::now();
  json body = {{"model", options_.model},
               {"messages",
                json::array({{{"role", "system"},
                              {"content", std::string(request.section(prompt_section::kConstraints))}},
                             {{"role", "user"}, {"content", render_user_message(request.prompt_sections)}}})},
               {"temperature", request.temperature}};

  httplib::Client client(origin_);
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  httplib::Headers headers;
  for (const auto& [k, v] : options_.headers) headers.emplace(k, v);
  auto response = client.Post(path_, headers, body.dump(), "application/json");
  if (!response)
    throw TransportError("provider '" + id_ + "': " + httplib::to_string(response.error()));
  if (response->status != 200)
    throw TransportError("provider '" + id_ + "': HTTP " + std::to_string(response->status));
  if (response->body.size() > request.max_output_size)
    throw TransportError("provider '" + id_ + "': response exceeds size limit");

  std::string content = response->body;
  const json parsed = json::parse(response->body, nullptr, false);
  if (!parsed.is_discarded() && parsed.is_object()) {
    if (parsed.contains("choices") && parsed["choices"].is_array() && !parsed["choices"].empty()) {
      const json& choice = parsed["choices"][0];
      if (!choice.is_object() || !choice.contains("message") || !choice["message"].is_object() ||
          !choice["message"].value("content", json()).is_string())
        throw TransportError("provider '" + id_ + "': malformed chat-completion response");
      content = choice["message"]["content"].get<std::string>();
    } else if (parsed.contains("content") && parsed["content"].is_string()) {
      content = parsed["content"].get<std::string>();
    }
  }
  ProviderResult result;
  result.refactored_source = extract_code_block(content);
  result.provider_id = id_;
  result.raw_response_id = sha256_hex(response->body).substr(0, 16);
  result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return result;
}

}  // namespace rguard
