#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rguard/engine.hpp"
#include "rguard/fs_util.hpp"
#include "rguard/json_io.hpp"

namespace rguard {

enum class ProposalStatus : std::uint8_t { Pending, Accepted, Rejected };
std::string_view to_string(ProposalStatus status);
std::optional<ProposalStatus> proposal_status_from_string(std::string_view name);

struct RefactoringProposal {
  std::string id;          // assigned by persist
  std::string created_at;  // assigned by persist
  std::string file;
  std::string language;
  std::string function;
  SourceSpan function_span;  // where original_source sits in `file`
  CodeSmell smell;
  std::string original_source;
  std::string refactored_source;
  std::string unified_diff;
  std::string provider_id;
  std::string prompt_sha256;
  ValidationReport report;
  Confidence confidence = Confidence::High;
  ProposalStatus status = ProposalStatus::Pending;
  std::optional<std::string> decided_at;
  std::optional<std::string> decision_reason;
  double health_before = kMaxHealth;  // file CodeHealth, from the report
  double health_after = kMaxHealth;
};

void to_json(nlohmann::json& j, const RefactoringProposal& p);
void from_json(const nlohmann::json& j, RefactoringProposal& p);

/// Builds a pending proposal for `candidate` on `target`; the diff and
/// health figures are derived from the candidate.
RefactoringProposal make_proposal(const std::string& file, const RefactorTarget& target,
                                  const Candidate& candidate, const std::string& prompt_sha256);

/// Summary row served by GET /api/proposals.
nlohmann::json proposal_summary(const RefactoringProposal& p);

class NotFound : public Error {
 public:
  using Error::Error;
};
class AlreadyDecided : public Error {
 public:
  using Error::Error;
};
class SourceDrifted : public Error {
 public:
  using Error::Error;
};
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

struct ApplyResult {
  std::string file;
  double new_file_health = kMaxHealth;
};

struct StoreSummary {
  int pending = 0;
  int accepted = 0;
  int rejected = 0;
  double mean_health_delta = 0.0;
};

/// Sortable 26-character Crockford base32 id (48-bit millisecond time,
/// 80-bit random). Strictly increasing within a process.
std::string new_ulid();
bool is_valid_id(std::string_view id);

/// File-per-proposal store under `<root>/proposals/<id>.json`. Mutations
/// take an in-process mutex and an exclusive flock on `<root>/.lock`, so
/// concurrent handlers and concurrent CLI processes have a single writer.
/// Reads need no lock: documents are replaced by atomic rename.
class ProposalStore {
 public:
  explicit ProposalStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Checks the invariants, assigns id and created_at, writes the file.
  /// Throws InvariantViolation.
  std::string persist(RefactoringProposal proposal);

  std::optional<RefactoringProposal> load(std::string_view id) const;
  /// All proposals ordered by id (creation order).
  std::vector<RefactoringProposal> list() const;

  /// Replaces the function in the working file with the refactored source.
  /// Throws NotFound, AlreadyDecided, or SourceDrifted (after marking the
  /// proposal rejected; the file is left untouched).
  ApplyResult accept(std::string_view id, const AnalysisConfig& config,
                     const AdapterRegistry& registry = default_registry());

  /// Throws NotFound or AlreadyDecided.
  RefactoringProposal reject(std::string_view id, std::optional<std::string> reason = std::nullopt);

  StoreSummary summary() const;

  /// Test seam: runs between temp-file write and rename of every store write.
  void set_before_rename_hook(BeforeRenameHook hook) { hook_ = std::move(hook); }

 private:
  std::filesystem::path path_for(std::string_view id) const;
  void write(const RefactoringProposal& p);
  RefactoringProposal load_for_update(std::string_view id) const;

  std::filesystem::path root_;
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  BeforeRenameHook hook_;
};

}  // namespace rguard
