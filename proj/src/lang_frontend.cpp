#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "rguard/lang_frontend.hpp"

namespace rguard {

namespace {

class FunctionLinter {
 public:
  explicit FunctionLinter(const SourceFunction& fn)
      : fn_(fn), params_(fn.params.begin(), fn.params.end()) {}

  void run(std::vector<LintFinding>& out) {
    collect_reads(fn_.body);
    walk(fn_.body, [&](const Node& n) {
      if (n.kind == NodeKind::VarDecl) check_decl(n, out);
      if (n.kind == NodeKind::Block || n.kind == NodeKind::CaseClause) check_reachability(n, out);
    });
  }

 private:
  // Identifier reads: everything except declaration names, plain assignment
  // targets, member property names and parameter declarations.
  void collect_reads(const Node& node) {
    switch (node.kind) {
      case NodeKind::Identifier:
        reads_.insert(*node.text);
        return;
      case NodeKind::Function:
        collect_reads(node.children.back());
        return;
      case NodeKind::VarDecl:
        if (node.children.size() > 1) collect_reads(node.children[1]);
        return;
      case NodeKind::Assign:
        if (node.children[0].kind != NodeKind::Identifier) collect_reads(node.children[0]);
        collect_reads(node.children[1]);
        return;
      case NodeKind::MemberAccess:
        collect_reads(node.children[0]);
        return;
      default:
        for (const Node& child : node.children) collect_reads(child);
    }
  }

  void check_decl(const Node& decl, std::vector<LintFinding>& out) const {
    const std::string& name = *decl.children.at(0).text;
    if (!reads_.contains(name))
      out.push_back({std::string(lint_rule::kUnusedVar), decl.span,
                     "'" + name + "' is declared but never read"});
    if (params_.contains(name))
      out.push_back({std::string(lint_rule::kShadowedParam), decl.span,
                     "'" + name + "' shadows a parameter"});
  }

  static void check_reachability(const Node& container, std::vector<LintFinding>& out) {
    const std::size_t first_stmt = container.kind == NodeKind::CaseClause &&
                                           !is_default_clause(container)
                                       ? 1
                                       : 0;
    for (std::size_t i = first_stmt; i + 1 < container.children.size(); ++i) {
      if (container.children[i].kind == NodeKind::Return) {
        out.push_back({std::string(lint_rule::kUnreachableCode), container.children[i + 1].span,
                       "unreachable statement after return"});
        return;
      }
    }
  }

  const SourceFunction& fn_;
  std::set<std::string> params_;
  std::set<std::string> reads_;
};

}  // namespace

std::vector<LintFinding> lint_functions(const std::vector<SourceFunction>& functions) {
  std::vector<LintFinding> out;
  for (const SourceFunction& fn : functions) FunctionLinter(fn).run(out);
  std::stable_sort(out.begin(), out.end(), [](const LintFinding& a, const LintFinding& b) {
    return std::tie(a.span.start_line, a.span.start_col, a.rule_id, a.message) <
           std::tie(b.span.start_line, b.span.start_col, b.rule_id, b.message);
  });
  return out;
}

std::vector<LintFinding> warning_diff(const std::vector<LintFinding>& original,
                                      const std::vector<LintFinding>& refactored) {
  std::map<std::pair<std::string, std::string>, int> carried;
  for (const LintFinding& f : original) ++carried[{f.rule_id, f.message}];
  std::vector<LintFinding> out;
  for (const LintFinding& f : refactored) {
    int& remaining = carried[{f.rule_id, f.message}];
    if (remaining > 0)
      --remaining;
    else
      out.push_back(f);
  }
  return out;
}

AdapterRegistry::AdapterRegistry() {
  add(std::make_shared<MiniLangAdapter>());
  map_extension(".ml.js", std::string(MiniLangAdapter::kTag));
  map_extension(".mini", std::string(MiniLangAdapter::kTag));
}

void AdapterRegistry::add(std::shared_ptr<const LanguageAdapter> adapter) {
  std::string tag(adapter->language_tag());
  adapters_[std::move(tag)] = std::move(adapter);
}

void AdapterRegistry::map_extension(std::string extension, std::string language_tag) {
  extensions_[std::move(extension)] = std::move(language_tag);
}

const LanguageAdapter* AdapterRegistry::find(std::string_view language_tag) const {
  auto it = adapters_.find(language_tag);
  return it == adapters_.end() ? nullptr : it->second.get();
}

const LanguageAdapter& AdapterRegistry::get(std::string_view language_tag) const {
  if (const LanguageAdapter* adapter = find(language_tag)) return *adapter;
  throw Error("no language adapter registered for '" + std::string(language_tag) + "'");
}

std::optional<std::string> AdapterRegistry::language_for_path(std::string_view path) const {
  std::optional<std::string> best;
  std::size_t best_len = 0;
  for (const auto& [ext, tag] : extensions_) {
    if (path.size() >= ext.size() && path.substr(path.size() - ext.size()) == ext &&
        ext.size() > best_len) {
      best = tag;
      best_len = ext.size();
    }
  }
  return best;
}

const AdapterRegistry& default_registry() {
  static const AdapterRegistry registry;
  return registry;
}

std::vector<SourceFunction> parse_unit(std::string_view source, std::string_view language_tag) {
  return default_registry().get(language_tag).parse_unit(source);
}

std::vector<LintFinding> lint(std::string_view source, std::string_view language_tag) {
  return default_registry().get(language_tag).lint(source);
}

}  // namespace rguard
