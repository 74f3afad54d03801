#include "rguard/json_io.hpp"

namespace rguard {

using nlohmann::json;

namespace {

template <typename Enum, typename Parse>
Enum parse_enum(const json& j, Parse parse, const char* what) {
  const auto name = j.get<std::string>();
  if (auto value = parse(name)) return *value;
  throw Error(std::string("unknown ") + what + " '" + name + "'");
}

std::optional<HealthDirection> direction_from_string(std::string_view name) {
  for (HealthDirection d :
       {HealthDirection::Improved, HealthDirection::Unchanged, HealthDirection::Declined})
    if (to_string(d) == name) return d;
  return std::nullopt;
}

std::optional<StepVerdict> verdict_from_string(std::string_view name) {
  for (StepVerdict v : {StepVerdict::Pass, StepVerdict::Demote, StepVerdict::Discard})
    if (to_string(v) == name) return v;
  return std::nullopt;
}

std::optional<CheckOutcome> outcome_from_string(std::string_view name) {
  for (CheckOutcome o :
       {CheckOutcome::Pass, CheckOutcome::MinorDeviation, CheckOutcome::MajorDeviation})
    if (to_string(o) == name) return o;
  return std::nullopt;
}

}  // namespace

void to_json(json& j, const SourceSpan& span) {
  j = json{{"file", span.file},
           {"start_line", span.start_line},
           {"start_col", span.start_col},
           {"end_line", span.end_line},
           {"end_col", span.end_col}};
}

void from_json(const json& j, SourceSpan& span) {
  span.file = j.value("file", "");
  j.at("start_line").get_to(span.start_line);
  j.at("start_col").get_to(span.start_col);
  j.at("end_line").get_to(span.end_line);
  j.at("end_col").get_to(span.end_col);
}

void to_json(json& j, SmellKind kind) { j = std::string(to_string(kind)); }

void from_json(const json& j, SmellKind& kind) {
  kind = parse_enum<SmellKind>(j, smell_kind_from_string, "smell kind");
}

void to_json(json& j, const CodeSmell& smell) {
  j = json{{"kind", smell.kind},
           {"function", smell.function},
           {"span", smell.span},
           {"metric_value", smell.metric_value},
           {"threshold", smell.threshold}};
}

void from_json(const json& j, CodeSmell& smell) {
  j.at("kind").get_to(smell.kind);
  j.at("function").get_to(smell.function);
  j.at("span").get_to(smell.span);
  j.at("metric_value").get_to(smell.metric_value);
  j.at("threshold").get_to(smell.threshold);
}

void to_json(json& j, const CodeHealthScore& score) {
  json deductions = json::array();
  for (const Deduction& d : score.deductions)
    deductions.push_back({{"kind", d.kind}, {"amount", d.amount}});
  j = json{{"value", score.value},
           {"basis", score.basis == HealthBasis::File ? "file" : "function"},
           {"deductions", std::move(deductions)}};
}

void from_json(const json& j, CodeHealthScore& score) {
  j.at("value").get_to(score.value);
  score.basis = j.value("basis", "function") == "file" ? HealthBasis::File : HealthBasis::Function;
  score.deductions.clear();
  for (const json& d : j.value("deductions", json::array()))
    score.deductions.push_back({d.at("kind").get<SmellKind>(), d.at("amount").get<double>()});
}

void to_json(json& j, const HealthDelta& delta) {
  j = json{{"before", delta.before},
           {"after", delta.after},
           {"direction", std::string(to_string(delta.direction))}};
}

void from_json(const json& j, HealthDelta& delta) {
  j.at("before").get_to(delta.before);
  j.at("after").get_to(delta.after);
  delta.direction = parse_enum<HealthDirection>(j.at("direction"), direction_from_string, "direction");
}

void to_json(json& j, const LintFinding& finding) {
  j = json{{"rule_id", finding.rule_id}, {"span", finding.span}, {"message", finding.message}};
}

void from_json(const json& j, LintFinding& finding) {
  j.at("rule_id").get_to(finding.rule_id);
  j.at("span").get_to(finding.span);
  j.at("message").get_to(finding.message);
}

void to_json(json& j, Confidence confidence) { j = std::string(to_string(confidence)); }

void from_json(const json& j, Confidence& confidence) {
  confidence = parse_enum<Confidence>(j, confidence_from_string, "confidence level");
}

void to_json(json& j, const ValidationReport& report) {
  j = json::object();
  j["syntactic"] = {{"parsed", report.syntactic.parsed},
                    {"new_warnings", report.syntactic.new_warnings},
                    {"verdict", std::string(to_string(report.syntactic.verdict))},
                    {"detail", report.syntactic.detail}};
  if (report.smell_health) {
    const SmellHealthResult& sh = *report.smell_health;
    json fresh = json::array();
    for (const NewSmell& s : sh.new_smells)
      fresh.push_back({{"kind", s.kind}, {"function", s.function}, {"less_severe", s.less_severe}});
    j["smell_health"] = {{"target_smell_resolved", sh.target_smell_resolved},
                         {"delta", sh.delta ? json(*sh.delta) : json(nullptr)},
                         {"new_smells", std::move(fresh)},
                         {"verdict", std::string(to_string(sh.verdict))},
                         {"detail", sh.detail}};
  } else {
    j["smell_health"] = nullptr;
  }
  if (report.semantic) {
    json checks = json::array();
    for (const SemanticCheck& c : report.semantic->checks)
      checks.push_back({{"check_id", c.check_id},
                        {"outcome", std::string(to_string(c.outcome))},
                        {"detail", c.detail}});
    j["semantic"] = {{"checks", std::move(checks)},
                     {"outcome", std::string(to_string(report.semantic->outcome))}};
  } else {
    j["semantic"] = nullptr;
  }
  j["rationale"] = report.rationale;
  j["confidence"] = report.confidence;
}

void from_json(const json& j, ValidationReport& report) {
  const json& syn = j.at("syntactic");
  syn.at("parsed").get_to(report.syntactic.parsed);
  syn.at("new_warnings").get_to(report.syntactic.new_warnings);
  report.syntactic.verdict = parse_enum<StepVerdict>(syn.at("verdict"), verdict_from_string, "verdict");
  syn.at("detail").get_to(report.syntactic.detail);

  report.smell_health.reset();
  if (const json& sh = j.at("smell_health"); !sh.is_null()) {
    SmellHealthResult r;
    sh.at("target_smell_resolved").get_to(r.target_smell_resolved);
    if (!sh.at("delta").is_null()) r.delta = sh.at("delta").get<HealthDelta>();
    for (const json& s : sh.at("new_smells"))
      r.new_smells.push_back({s.at("kind").get<SmellKind>(), s.at("function").get<std::string>(),
                              s.at("less_severe").get<bool>()});
    r.verdict = parse_enum<StepVerdict>(sh.at("verdict"), verdict_from_string, "verdict");
    sh.at("detail").get_to(r.detail);
    report.smell_health = std::move(r);
  }

  report.semantic.reset();
  if (const json& sem = j.at("semantic"); !sem.is_null()) {
    SemanticResult r;
    for (const json& c : sem.at("checks"))
      r.checks.push_back({c.at("check_id").get<std::string>(),
                          parse_enum<CheckOutcome>(c.at("outcome"), outcome_from_string, "outcome"),
                          c.at("detail").get<std::string>()});
    r.outcome = parse_enum<CheckOutcome>(sem.at("outcome"), outcome_from_string, "outcome");
    report.semantic = std::move(r);
  }
  j.at("rationale").get_to(report.rationale);
  j.at("confidence").get_to(report.confidence);
}

json function_report_json(const FunctionReport& report) {
  return json{{"name", report.function.name},
              {"span", report.function.span},
              {"loc", report.function.loc},
              {"score", report.score.value},
              {"smells", report.smells}};
}

}  // namespace rguard
