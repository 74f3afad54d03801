#include "rguard/cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rguard/config.hpp"
#include "rguard/fs_util.hpp"
#include "rguard/json_io.hpp"
#include "rguard/proposal_store.hpp"
#include "rguard/quality_gate.hpp"
#include "rguard/review_service.hpp"

namespace rguard {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_shutdown{false};
static_assert(std::atomic<bool>::is_always_lock_free);

constexpr const char* kDefaultConfigName = "refactor-guard.json";

std::string score_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string lines_str(const SourceSpan& s) {
  return "lines " + std::to_string(s.start_line) + "-" + std::to_string(s.end_line);
}

std::string describe(const CodeSmell& s) {
  return std::string(to_string(s.kind)) + " (metric " + std::to_string(s.metric_value) +
         ", threshold " + std::to_string(s.threshold) + ", " + lines_str(s.span) + ")";
}

// --config beats REFACTOR_GUARD_CONFIG beats ./refactor-guard.json. Only the
// implicit default may be absent.
EngineConfig resolve_config(const std::string& flag) {
  if (!flag.empty()) return load_config(flag);
  if (const char* env = std::getenv("REFACTOR_GUARD_CONFIG"); env != nullptr && *env != '\0')
    return load_config(env);
  if (fs::exists(kDefaultConfigName)) return load_config(kDefaultConfigName);
  return parse_config(json::object(), fs::current_path());
}

struct Context {
  EngineConfig config;
  std::ostream& out;
  std::ostream& err;
};

fs::path store_dir(const Context& ctx, const std::string& override_dir) {
  return override_dir.empty() ? ctx.config.store_dir : fs::path(override_dir);
}

// ---- scan -----------------------------------------------------------------

int cmd_scan(Context& ctx, const std::vector<std::string>& paths, bool as_json) {
  const Workspace ws = scan_workspace(paths, ctx.config.analysis, ctx.config.registry);
  if (as_json) {
    json files = json::array();
    for (const ScannedFile& f : ws.files) {
      json functions = json::array();
      for (const FunctionReport& fr : f.report.functions) functions.push_back(function_report_json(fr));
      files.push_back({{"path", f.path},
                       {"language", f.language},
                       {"score", f.report.file_score.value},
                       {"functions", std::move(functions)}});
    }
    json skipped = json::array();
    for (const SkippedFile& s : ws.skipped) skipped.push_back({{"path", s.path}, {"reason", s.reason}});
    ctx.out << json{{"files", std::move(files)}, {"skipped", std::move(skipped)}}.dump(2) << "\n";
  } else {
    for (const ScannedFile& f : ws.files) {
      ctx.out << f.path << ": CodeHealth " << score_str(f.report.file_score.value) << "\n";
      for (const FunctionReport& fr : f.report.functions) {
        ctx.out << "  " << fr.function.name << " (" << lines_str(fr.function.span) << ", "
                << fr.function.loc << " LoC): CodeHealth " << score_str(fr.score.value) << "\n";
        for (const CodeSmell& s : fr.smells) ctx.out << "    " << describe(s) << "\n";
      }
    }
  }
  for (const SkippedFile& s : ws.skipped) ctx.err << "error: " << s.path << ": " << s.reason << "\n";
  return ws.skipped.empty() ? kExitOk : kExitUsage;
}

// ---- baseline -------------------------------------------------------------

int cmd_baseline(Context& ctx, const std::vector<std::string>& paths, const std::string& output) {
  const Workspace ws = scan_workspace(paths, ctx.config.analysis, ctx.config.registry);
  for (const SkippedFile& s : ws.skipped) ctx.err << "warning: skipped " << s.path << ": " << s.reason << "\n";
  const Baseline baseline = snapshot_baseline(ws, ctx.config.analysis);
  const fs::path target = output.empty() ? ctx.config.store_dir / "baseline.json" : fs::path(output);
  baseline.save(target);
  std::size_t functions = 0;
  for (const auto& [_, f] : baseline.files) functions += f.functions.size();
  ctx.out << "baseline: " << baseline.files.size() << " files, " << functions << " functions -> "
          << target.string() << "\n";
  return kExitOk;
}

// ---- shared proposal path ---------------------------------------------------

struct ProposeOutcome {
  int exit_code = kExitOk;
  std::optional<std::string> id;
  std::optional<Candidate> best;
};

void print_discards(Context& ctx, const AllCandidatesDiscarded& e) {
  ctx.err << "all " << e.discarded().size() << " candidate(s) were discarded\n";
  for (std::size_t i = 0; i < e.discarded().size(); ++i) {
    const Candidate& c = e.discarded()[i];
    ctx.err << "  candidate " << (i + 1) << " from " << c.result.provider_id << ":\n";
    for (const std::string& line : c.report.rationale) ctx.err << "    " << line << "\n";
  }
}

// Generates candidates for one target and persists the best survivor.
// FunctionTooLarge and all-discarded are domain negatives (exit 1);
// ProviderUnavailable propagates.
ProposeOutcome propose(Context& ctx, const RefactorEngine& engine, ProposalStore& store,
                       const std::string& file, const RefactorTarget& target) {
  ProposeOutcome outcome;
  GenerationResult gen;
  try {
    gen = engine.generate_candidates(target, ctx.config.pool_size);
  } catch (const FunctionTooLarge& e) {
    ctx.err << "error: " << e.what() << "\n";
    outcome.exit_code = kExitNegative;
    return outcome;
  } catch (const AllCandidatesDiscarded& e) {
    print_discards(ctx, e);
    outcome.exit_code = kExitNegative;
    return outcome;
  }
  if (gen.prompt.size_warning)
    ctx.err << "warning: " << target.function.name << " has " << target.function.loc
            << " lines of code, above the " << engine.limits().soft_function_loc
            << "-line soft limit; results may be less reliable\n";
  const Candidate& best = gen.candidates.front();
  outcome.id = store.persist(make_proposal(file, target, best, gen.prompt.sha256()));
  outcome.best = best;
  ctx.out << "proposal " << *outcome.id << ": " << target.function.name << " "
          << to_string(target.smell.kind) << ", confidence " << to_string(best.report.confidence)
          << " (" << gen.candidates.size() << " surviving candidate(s) from " << gen.provider_id << ")\n";
  return outcome;
}

std::string absolute_path(const std::string& path) {
  return fs::absolute(path).lexically_normal().generic_string();
}

void require_providers(const Context& ctx) {
  if (ctx.config.providers.empty())
    throw ConfigError("no completion providers configured; add one under \"providers\" in " +
                      std::string(kDefaultConfigName));
}

// ---- gate -----------------------------------------------------------------

int cmd_gate(Context& ctx, const std::string& baseline_flag, std::vector<std::string> paths,
             bool with_proposals, bool as_json, const std::string& store_flag) {
  const fs::path baseline_path =
      baseline_flag.empty() ? ctx.config.store_dir / "baseline.json" : fs::path(baseline_flag);
  const Baseline baseline = Baseline::load(baseline_path);
  if (paths.empty())
    for (const auto& [path, _] : baseline.files) paths.push_back(path);

  const Workspace ws = scan_workspace(paths, ctx.config.analysis, ctx.config.registry);
  bool broken = false;
  for (const SkippedFile& s : ws.skipped) {
    const bool known_bad = std::any_of(baseline.skipped.begin(), baseline.skipped.end(),
                                       [&](const SkippedFile& b) { return b.path == s.path; });
    if (!fs::exists(s.path) || known_bad) continue;  // deleted, or already unparseable at baseline
    ctx.err << "error: " << s.path << ": " << s.reason << "\n";
    broken = true;
  }
  if (broken) return kExitUsage;

  const GateResult result = evaluate_gate(baseline, ws, ctx.config.analysis);
  if (as_json) {
    json declines = json::array();
    for (const Decline& d : result.declines)
      declines.push_back({{"file", d.file}, {"function", d.function}, {"before", d.before}, {"after", d.after}});
    json targets = json::array();
    for (const GateTarget& t : result.targets) targets.push_back({{"file", t.file}, {"smell", t.smell}});
    ctx.out << json{{"status", result.passed ? "pass" : "fail"},
                    {"declines", std::move(declines)},
                    {"targets", std::move(targets)}}
                   .dump(2)
            << "\n";
  } else if (result.passed) {
    ctx.out << "gate: pass (" << ws.files.size() << " files checked)\n";
  } else {
    ctx.out << "gate: fail (" << result.declines.size() << " decline(s))\n";
    for (const Decline& d : result.declines)
      ctx.out << "decline: " << d.file << " " << d.function << " " << score_str(d.before) << " -> "
              << score_str(d.after) << "\n";
    for (const GateTarget& t : result.targets)
      ctx.out << "target: " << t.file << " " << t.smell.function << " " << describe(t.smell) << "\n";
  }
  if (result.passed || !with_proposals) return result.passed ? kExitOk : kExitNegative;

  require_providers(ctx);
  const RefactorEngine engine = make_engine(ctx.config);
  ProposalStore store(store_dir(ctx, store_flag));
  for (const GateTarget& t : result.targets) {
    const auto file_it = std::find_if(ws.files.begin(), ws.files.end(),
                                      [&](const ScannedFile& f) { return f.path == t.file; });
    const FunctionReport* owner = nullptr;
    for (const FunctionReport& fr : file_it->report.functions)
      if (std::find(fr.smells.begin(), fr.smells.end(), t.smell) != fr.smells.end()) owner = &fr;
    if (owner == nullptr) continue;
    propose(ctx, engine, store, absolute_path(t.file), {file_it->source, owner->function, t.smell});
  }
  return kExitNegative;
}

// ---- refactor -------------------------------------------------------------

int cmd_refactor(Context& ctx, const std::string& path, const std::string& function_name,
                 const std::string& smell_name, bool apply, const std::string& store_flag) {
  std::optional<SmellKind> wanted_kind;
  if (!smell_name.empty()) {
    wanted_kind = smell_kind_from_string(smell_name);
    if (!wanted_kind) {
      ctx.err << "error: unknown smell kind '" << smell_name << "'\n";
      return kExitUsage;
    }
  }
  const auto language = ctx.config.registry.language_for_path(path);
  if (!language) {
    ctx.err << "error: " << path << ": no language registered for this file extension\n";
    return kExitUsage;
  }
  const std::string source = normalize_newlines(read_text_file(path));
  const UnitReport report =
      analyze_unit(ctx.config.registry.get(*language).parse_unit(source, path), ctx.config.analysis);

  // Most severe matching smell wins; earlier functions win ties.
  const FunctionReport* chosen_fn = nullptr;
  const CodeSmell* chosen = nullptr;
  const SeverityOrder& severity = ctx.config.analysis.severity;
  for (const FunctionReport& fr : report.functions) {
    if (!function_name.empty() && fr.function.name != function_name) continue;
    for (const CodeSmell& s : fr.smells) {
      if (wanted_kind && s.kind != *wanted_kind) continue;
      if (chosen == nullptr || severity.rank(s.kind) < severity.rank(chosen->kind)) {
        chosen_fn = &fr;
        chosen = &s;
      }
    }
  }
  if (chosen == nullptr) {
    ctx.err << "nothing to refactor: no ";
    ctx.err << (wanted_kind ? std::string(to_string(*wanted_kind)) : std::string("code smell"));
    ctx.err << (function_name.empty() ? " in " + path : " in function '" + function_name + "'") << "\n";
    return kExitNegative;
  }

  require_providers(ctx);
  const RefactorEngine engine = make_engine(ctx.config);
  ProposalStore store(store_dir(ctx, store_flag));
  const RefactorTarget target{source, chosen_fn->function, *chosen};
  const ProposeOutcome outcome = propose(ctx, engine, store, absolute_path(path), target);
  if (!outcome.id) return outcome.exit_code;

  for (const std::string& line : outcome.best->report.rationale) ctx.out << "  " << line << "\n";
  if (!apply) return kExitOk;
  if (outcome.best->report.confidence != Confidence::High) {
    ctx.out << "review required: confidence is " << to_string(outcome.best->report.confidence)
            << "; proposal " << *outcome.id << " left pending\n";
    return kExitOk;
  }
  try {
    const ApplyResult applied = store.accept(*outcome.id, ctx.config.analysis, ctx.config.registry);
    ctx.out << "applied to " << path << ": file CodeHealth " << score_str(report.file_score.value)
            << " -> " << score_str(applied.new_file_health) << "\n";
  } catch (const SourceDrifted& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kExitNegative;
  }
  return kExitOk;
}

// ---- serve ----------------------------------------------------------------

int cmd_serve(Context& ctx, int port, const std::string& bind_address, const std::string& ui_dir,
              const std::string& store_flag) {
  ServiceOptions options;
  options.bind_address = bind_address;
  options.port = port;
  if (!ui_dir.empty()) {
    if (!fs::is_directory(ui_dir)) {
      ctx.err << "error: UI directory " << ui_dir << " does not exist\n";
      return kExitUsage;
    }
    options.ui_dir = ui_dir;
  }
  ProposalStore store(store_dir(ctx, store_flag));
  ReviewService service(store, ctx.config.analysis, options, ctx.config.registry);
  const int bound = service.bind();
  ctx.out << "serving " << store.root().string() << " on http://" << bind_address << ":" << bound << "/"
          << std::endl;

  g_shutdown.store(false);
  std::atomic<bool> finished{false};
  std::thread watcher([&] {
    while (!g_shutdown.load() && !finished.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    service.stop();
  });
  service.run();
  finished.store(true);
  watcher.join();
  ctx.out << "stopped" << std::endl;
  return kExitOk;
}

}  // namespace

void request_shutdown() noexcept { g_shutdown.store(true); }

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detects function-level code smells and guards LLM-proposed refactorings.",
               "refactor-guard"};
  app.require_subcommand(1);
  std::string config_flag;
  app.add_option("--config", config_flag,
                 "Config file (default ./refactor-guard.json, or $REFACTOR_GUARD_CONFIG)");

  std::vector<std::string> scan_paths;
  bool scan_json = false;
  CLI::App* scan = app.add_subcommand("scan", "Report smells and CodeHealth per function");
  scan->add_option("paths", scan_paths, "Files or directories")->required();
  scan->add_flag("--json", scan_json, "Machine-readable output");

  std::vector<std::string> baseline_paths{"."};
  std::string baseline_out;
  CLI::App* baseline = app.add_subcommand("baseline", "Snapshot current CodeHealth for the gate");
  baseline->add_option("paths", baseline_paths, "Files or directories (default .)");
  baseline->add_option("-o,--output", baseline_out, "Baseline file (default <store_dir>/baseline.json)");

  std::string gate_baseline, gate_store;
  std::vector<std::string> gate_paths;
  bool gate_propose = false, gate_json = false;
  CLI::App* gate = app.add_subcommand("gate", "Fail when any function lost CodeHealth");
  gate->add_option("--baseline", gate_baseline, "Baseline file (default <store_dir>/baseline.json)");
  gate->add_option("paths", gate_paths, "Files or directories (default: the baseline's files)");
  gate->add_flag("--propose", gate_propose, "Persist refactoring proposals for each target");
  gate->add_flag("--json", gate_json, "Machine-readable output");
  gate->add_option("--store", gate_store, "Proposal store directory");

  std::string refactor_path, refactor_function, refactor_smell, refactor_store;
  bool refactor_apply = false, refactor_propose = false;
  CLI::App* refactor = app.add_subcommand("refactor", "Generate and validate a refactoring");
  refactor->add_option("path", refactor_path, "Source file")->required();
  refactor->add_option("--function", refactor_function, "Function to refactor");
  refactor->add_option("--smell", refactor_smell, "Smell kind to target");
  CLI::Option* apply_opt =
      refactor->add_flag("--apply", refactor_apply, "Rewrite the file when confidence is High");
  CLI::Option* propose_opt =
      refactor->add_flag("--propose", refactor_propose, "Persist for review (the default)");
  apply_opt->excludes(propose_opt);
  refactor->add_option("--store", refactor_store, "Proposal store directory");

  int serve_port = 8420;
  std::string serve_bind = "127.0.0.1", serve_ui, serve_store;
  CLI::App* serve = app.add_subcommand("serve", "Serve the review API and UI");
  serve->add_option("--port", serve_port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--bind", serve_bind, "Bind address");
  serve->add_option("--ui", serve_ui, "Directory of static UI assets served at /");
  serve->add_option("--store", serve_store, "Proposal store directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    Context ctx{resolve_config(config_flag), out, err};
    if (*scan) return cmd_scan(ctx, scan_paths, scan_json);
    if (*baseline) return cmd_baseline(ctx, baseline_paths, baseline_out);
    if (*gate) return cmd_gate(ctx, gate_baseline, gate_paths, gate_propose, gate_json, gate_store);
    if (*refactor)
      return cmd_refactor(ctx, refactor_path, refactor_function, refactor_smell, refactor_apply,
                          refactor_store);
    return cmd_serve(ctx, serve_port, serve_bind, serve_ui, serve_store);
  } catch (const StaleBaseline& e) {
    err << "error: stale baseline: " << e.what() << "\n";
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const ProviderUnavailable& e) {
    err << "provider unavailable: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace rguard
