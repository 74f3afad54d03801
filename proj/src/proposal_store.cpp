#include "rguard/proposal_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <random>

#include "rguard/diff.hpp"
#include "rguard/hashing.hpp"

namespace rguard {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ProposalStatus status) {
  switch (status) {
    case ProposalStatus::Pending: return "pending";
    case ProposalStatus::Accepted: return "accepted";
    case ProposalStatus::Rejected: return "rejected";
  }
  return "?";
}

std::optional<ProposalStatus> proposal_status_from_string(std::string_view name) {
  for (ProposalStatus s : {ProposalStatus::Pending, ProposalStatus::Accepted, ProposalStatus::Rejected})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

void to_json(json& j, const RefactoringProposal& p) {
  j = json{{"id", p.id},
           {"created_at", p.created_at},
           {"file", p.file},
           {"language", p.language},
           {"function", p.function},
           {"function_span", p.function_span},
           {"smell", p.smell},
           {"original_source", p.original_source},
           {"refactored_source", p.refactored_source},
           {"unified_diff", p.unified_diff},
           {"provider_id", p.provider_id},
           {"prompt_sha256", p.prompt_sha256},
           {"report", p.report},
           {"confidence", p.confidence},
           {"status", std::string(to_string(p.status))},
           {"decided_at", p.decided_at ? json(*p.decided_at) : json(nullptr)},
           {"decision_reason", p.decision_reason ? json(*p.decision_reason) : json(nullptr)},
           {"health_before", p.health_before},
           {"health_after", p.health_after}};
}

void from_json(const json& j, RefactoringProposal& p) {
  j.at("id").get_to(p.id);
  j.at("created_at").get_to(p.created_at);
  j.at("file").get_to(p.file);
  j.at("language").get_to(p.language);
  j.at("function").get_to(p.function);
  j.at("function_span").get_to(p.function_span);
  j.at("smell").get_to(p.smell);
  j.at("original_source").get_to(p.original_source);
  j.at("refactored_source").get_to(p.refactored_source);
  j.at("unified_diff").get_to(p.unified_diff);
  j.at("provider_id").get_to(p.provider_id);
  j.at("prompt_sha256").get_to(p.prompt_sha256);
  j.at("report").get_to(p.report);
  j.at("confidence").get_to(p.confidence);
  const auto status = proposal_status_from_string(j.at("status").get<std::string>());
  if (!status) throw Error("unknown proposal status");
  p.status = *status;
  p.decided_at.reset();
  if (!j.at("decided_at").is_null()) p.decided_at = j.at("decided_at").get<std::string>();
  p.decision_reason.reset();
  if (!j.at("decision_reason").is_null()) p.decision_reason = j.at("decision_reason").get<std::string>();
  j.at("health_before").get_to(p.health_before);
  j.at("health_after").get_to(p.health_after);
}

RefactoringProposal make_proposal(const std::string& file, const RefactorTarget& target,
                                  const Candidate& candidate, const std::string& prompt_sha256) {
  RefactoringProposal p;
  p.file = file;
  p.language = target.function.language;
  p.function = target.function.name;
  p.function_span = target.function.span;
  p.smell = target.smell;
  p.original_source = target.function.text;
  p.refactored_source = candidate.result.refactored_source;
  p.unified_diff = unified_diff(p.original_source, p.refactored_source,
                                "a/" + file, "b/" + file);
  p.provider_id = candidate.result.provider_id;
  p.prompt_sha256 = prompt_sha256;
  p.report = candidate.report;
  p.confidence = candidate.report.confidence;
  if (candidate.report.smell_health && candidate.report.smell_health->delta) {
    p.health_before = candidate.report.smell_health->delta->before.value;
    p.health_after = candidate.report.smell_health->delta->after.value;
  }
  return p;
}

json proposal_summary(const RefactoringProposal& p) {
  return json{{"id", p.id},
              {"file", p.file},
              {"function", p.function},
              {"smell_kind", p.smell.kind},
              {"confidence", p.confidence},
              {"status", std::string(to_string(p.status))},
              {"created_at", p.created_at}};
}

// --- ids ------------------------------------------------------------------------

namespace {

constexpr char kCrockford[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";

struct UlidState {
  std::mutex mutex;
  std::uint64_t last_ms = 0;
  std::uint16_t rand_hi = 0;  // top 16 of the 80 random bits
  std::uint64_t rand_lo = 0;  // low 64 bits
  std::mt19937_64 rng{std::random_device{}()};
};

}  // namespace

std::string new_ulid() {
  static UlidState state;
  std::lock_guard lock(state.mutex);
  auto ms = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                           std::chrono::system_clock::now().time_since_epoch())
                                           .count());
  if (ms <= state.last_ms) {
    ms = state.last_ms;
    if (++state.rand_lo == 0) ++state.rand_hi;  // same millisecond: increment
  } else {
    state.last_ms = ms;
    state.rand_lo = state.rng();
    state.rand_hi = static_cast<std::uint16_t>(state.rng() & 0x7FFF);  // leave headroom
  }
  std::string out(26, '0');
  for (int i = 9; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kCrockford[ms & 31];
    ms >>= 5;
  }
  // 80 random bits as 16 base32 digits, most significant first.
  auto bit = [&](int pos) -> unsigned {
    return pos >= 64 ? (state.rand_hi >> (pos - 64)) & 1U : static_cast<unsigned>(state.rand_lo >> pos) & 1U;
  };
  for (int digit = 0; digit < 16; ++digit) {
    unsigned v = 0;
    for (int b = 0; b < 5; ++b) v = (v << 1) | bit(79 - 5 * digit - b);
    out[static_cast<std::size_t>(10 + digit)] = kCrockford[v];
  }
  return out;
}

bool is_valid_id(std::string_view id) {
  return id.size() == 26 && std::all_of(id.begin(), id.end(), [](char c) {
           return std::string_view(kCrockford).find(c) != std::string_view::npos;
         });
}

// --- store ------------------------------------------------------------------------

namespace {

// Exclusive advisory lock on <root>/.lock for cross-process writers.
class FileLock {
 public:
  explicit FileLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error("cannot open store lock " + path.string());
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw Error("cannot lock store " + path.string());
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

bool has_crlf(std::string_view text) { return text.find("\r\n") != std::string_view::npos; }

std::string to_crlf(std::string_view text) {
  std::string out;
  out.reserve(text.size() + text.size() / 16);
  for (char c : text) {
    if (c == '\n') out += '\r';
    out += c;
  }
  return out;
}

}  // namespace

ProposalStore::ProposalStore(fs::path root) : root_(std::move(root)), dir_(root_ / "proposals") {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error("cannot create store directory " + dir_.string() + ": " + ec.message());
}

fs::path ProposalStore::path_for(std::string_view id) const {
  return dir_ / (std::string(id) + ".json");
}

void ProposalStore::write(const RefactoringProposal& p) {
  atomic_write(path_for(p.id), json(p).dump(2) + "\n", hook_);
}

std::optional<RefactoringProposal> ProposalStore::load(std::string_view id) const {
  if (!is_valid_id(id)) return std::nullopt;
  const fs::path path = path_for(id);
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  try {
    return json::parse(read_text_file(path)).get<RefactoringProposal>();
  } catch (const json::exception& e) {
    throw Error("corrupt proposal " + path.string() + ": " + e.what());
  }
}

RefactoringProposal ProposalStore::load_for_update(std::string_view id) const {
  auto p = load(id);
  if (!p) throw NotFound("proposal " + std::string(id) + " not found");
  if (p->status != ProposalStatus::Pending)
    throw AlreadyDecided("proposal " + std::string(id) + " is already " +
                         std::string(to_string(p->status)));
  return std::move(*p);
}

std::vector<RefactoringProposal> ProposalStore::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const fs::path& path = entry.path();
    if (!entry.is_regular_file() || is_temp_file(path) || path.extension() != ".json") continue;
    const std::string id = path.stem().string();
    if (is_valid_id(id)) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  std::vector<RefactoringProposal> out;
  for (const std::string& id : ids)
    if (auto p = load(id)) out.push_back(std::move(*p));
  return out;
}

std::string ProposalStore::persist(RefactoringProposal p) {
  if (p.confidence == Confidence::Discard || p.report.confidence == Confidence::Discard)
    throw InvariantViolation("discarded candidates are never stored");
  if (p.report.confidence != p.confidence)
    throw InvariantViolation("proposal confidence disagrees with its validation report");
  if (p.report.rationale.empty()) throw InvariantViolation("proposal has no rationale");
  if (p.status != ProposalStatus::Pending || p.decided_at)
    throw InvariantViolation("new proposals must be pending");
  try {
    if (apply_unified_diff(p.original_source, p.unified_diff) != p.refactored_source)
      throw InvariantViolation("unified diff does not reproduce the refactored source");
  } catch (const InvariantViolation&) {
    throw;
  } catch (const Error& e) {
    throw InvariantViolation(std::string("unified diff does not apply: ") + e.what());
  }

  std::lock_guard guard(mutex_);
  FileLock lock(root_ / ".lock");
  p.id = new_ulid();
  p.created_at = utc_timestamp();
  write(p);
  return p.id;
}

ApplyResult ProposalStore::accept(std::string_view id, const AnalysisConfig& config,
                                  const AdapterRegistry& registry) {
  std::lock_guard guard(mutex_);
  FileLock lock(root_ / ".lock");
  RefactoringProposal p = load_for_update(id);

  std::string drift;
  std::string raw;
  try {
    raw = read_text_file(p.file);
  } catch (const Error&) {
    drift = "file " + p.file + " can no longer be read";
  }
  const std::string text = normalize_newlines(raw);
  std::string updated;
  if (drift.empty()) {
    try {
      auto [first, last] = byte_range(text, p.function_span);
      if (text.compare(first, last - first, p.original_source) != 0)
        drift = "function '" + p.function + "' in " + p.file + " changed since the proposal was made";
      else
        updated = text.substr(0, first) + p.refactored_source + text.substr(last);
    } catch (const Error&) {
      drift = "function '" + p.function + "' is no longer at its recorded location in " + p.file;
    }
  }
  if (!drift.empty()) {
    p.status = ProposalStatus::Rejected;
    p.decided_at = utc_timestamp();
    p.decision_reason = "source drifted: " + drift;
    write(p);
    throw SourceDrifted(drift);
  }

  // Score before touching the file, so an unparsable result never lands.
  const LanguageAdapter& adapter = registry.get(p.language);
  const UnitReport after = analyze_unit(adapter.parse_unit(updated, p.file), config);
  atomic_write(p.file, has_crlf(raw) ? to_crlf(updated) : updated);

  p.status = ProposalStatus::Accepted;
  p.decided_at = utc_timestamp();
  write(p);
  return {p.file, after.file_score.value};
}

RefactoringProposal ProposalStore::reject(std::string_view id, std::optional<std::string> reason) {
  std::lock_guard guard(mutex_);
  FileLock lock(root_ / ".lock");
  RefactoringProposal p = load_for_update(id);
  p.status = ProposalStatus::Rejected;
  p.decided_at = utc_timestamp();
  p.decision_reason = std::move(reason);
  write(p);
  return p;
}

StoreSummary ProposalStore::summary() const {
  StoreSummary s;
  double delta_sum = 0.0;
  const auto all = list();
  for (const RefactoringProposal& p : all) {
    switch (p.status) {
      case ProposalStatus::Pending: ++s.pending; break;
      case ProposalStatus::Accepted: ++s.accepted; break;
      case ProposalStatus::Rejected: ++s.rejected; break;
    }
    delta_sum += p.health_after - p.health_before;
  }
  if (!all.empty()) s.mean_health_delta = delta_sum / static_cast<double>(all.size());
  return s;
}

}  // namespace rguard
