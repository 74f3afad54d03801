#include "rguard/quality_gate.hpp"

#include <algorithm>
#include <set>

#include "rguard/fs_util.hpp"
#include "rguard/hashing.hpp"

namespace rguard {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string normalized(const fs::path& p) { return p.lexically_normal().generic_string(); }

}  // namespace

Workspace scan_workspace(const std::vector<std::string>& paths, const AnalysisConfig& config,
                         const AdapterRegistry& registry) {
  std::set<std::string> candidates;
  Workspace ws;
  for (const std::string& arg : paths) {
    std::error_code ec;
    if (fs::is_directory(arg, ec)) {
      for (auto it = fs::recursive_directory_iterator(arg, fs::directory_options::skip_permission_denied, ec);
           it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (it->is_directory() && it->path().filename().string().starts_with(".") &&
            it->path().filename() != "." && it->path().filename() != "..") {
          it.disable_recursion_pending();  // .git, .refactor-guard and friends
          continue;
        }
        if (it->is_regular_file() && registry.language_for_path(it->path().generic_string()))
          candidates.insert(normalized(it->path()));
      }
    } else if (fs::is_regular_file(arg, ec)) {
      candidates.insert(normalized(arg));
    } else {
      ws.skipped.push_back({normalized(arg), "no such file or directory"});
    }
  }

  for (const std::string& path : candidates) {
    const auto language = registry.language_for_path(path);
    if (!language) {
      ws.skipped.push_back({path, "no language registered for this file extension"});
      continue;
    }
    try {
      ScannedFile f;
      f.path = path;
      f.language = *language;
      f.source = normalize_newlines(read_text_file(path));
      f.report = analyze_unit(registry.get(*language).parse_unit(f.source, path), config);
      ws.files.push_back(std::move(f));
    } catch (const ParseError& e) {
      ws.skipped.push_back({path, e.what()});
    } catch (const Error& e) {
      ws.skipped.push_back({path, e.what()});
    }
  }
  std::sort(ws.skipped.begin(), ws.skipped.end(),
            [](const SkippedFile& a, const SkippedFile& b) { return a.path < b.path; });
  return ws;
}

std::vector<std::string> function_keys(const UnitReport& report) {
  std::map<std::string, int> seen;
  std::vector<std::string> keys;
  for (const FunctionReport& f : report.functions) {
    const int n = ++seen[f.function.name];
    keys.push_back(n == 1 ? f.function.name : f.function.name + "#" + std::to_string(n));
  }
  return keys;
}

json Baseline::to_json() const {
  json files_json = json::object();
  for (const auto& [path, entry] : files)
    files_json[path] = {{"score", entry.score}, {"functions", entry.functions}};
  json skipped_json = json::array();
  for (const SkippedFile& s : skipped) skipped_json.push_back({{"path", s.path}, {"reason", s.reason}});
  return json{{"version", version},
              {"created_at", created_at},
              {"fingerprint", fingerprint},
              {"files", std::move(files_json)},
              {"skipped", std::move(skipped_json)}};
}

Baseline Baseline::from_json(const json& j) {
  try {
    Baseline b;
    j.at("version").get_to(b.version);
    if (b.version != 1) throw Error("unsupported baseline version " + std::to_string(b.version));
    j.at("created_at").get_to(b.created_at);
    j.at("fingerprint").get_to(b.fingerprint);
    for (const auto& [path, entry] : j.at("files").items()) {
      BaselineFile f;
      entry.at("score").get_to(f.score);
      entry.at("functions").get_to(f.functions);
      b.files[path] = std::move(f);
    }
    for (const json& s : j.at("skipped"))
      b.skipped.push_back({s.at("path").get<std::string>(), s.at("reason").get<std::string>()});
    return b;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed baseline: ") + e.what());
  }
}

Baseline Baseline::load(const fs::path& path) {
  const std::string text = read_text_file(path);
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("baseline " + path.string() + " is not valid JSON");
  return from_json(j);
}

void Baseline::save(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  atomic_write(path, to_json().dump(2) + "\n");
}

Baseline snapshot_baseline(const Workspace& workspace, const AnalysisConfig& config) {
  if (workspace.files.empty()) throw Error("no parseable source files to baseline");
  Baseline b;
  b.created_at = utc_timestamp();
  b.fingerprint = config.fingerprint();
  for (const ScannedFile& f : workspace.files) {
    BaselineFile entry;
    entry.score = f.report.file_score.value;
    const auto keys = function_keys(f.report);
    for (std::size_t i = 0; i < keys.size(); ++i)
      entry.functions[keys[i]] = f.report.functions[i].score.value;
    b.files[f.path] = std::move(entry);
  }
  b.skipped = workspace.skipped;
  return b;
}

GateResult evaluate_gate(const Baseline& baseline, const Workspace& workspace,
                         const AnalysisConfig& config) {
  if (baseline.fingerprint != config.fingerprint())
    throw StaleBaseline("baseline was computed with different thresholds or weights; "
                        "re-run `baseline` to refresh it");
  GateResult result;
  for (const ScannedFile& f : workspace.files) {
    const auto file_it = baseline.files.find(f.path);
    const auto keys = function_keys(f.report);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const FunctionReport& fr = f.report.functions[i];
      double before = kMaxHealth;  // new functions are held to the smell-free bar
      if (file_it != baseline.files.end()) {
        const auto fn_it = file_it->second.functions.find(keys[i]);
        if (fn_it != file_it->second.functions.end()) before = fn_it->second;
      }
      const double after = fr.score.value;
      if (!(after < before)) continue;
      result.declines.push_back({f.path, keys[i], before, after});
      for (const CodeSmell& s : fr.smells) result.targets.push_back({f.path, s});
    }
  }
  result.passed = result.declines.empty();
  return result;
}

}  // namespace rguard
