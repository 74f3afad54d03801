#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "rguard/engine.hpp"
#include "rguard/proposal_store.hpp"
#include "support/corpus.hpp"

namespace rguard::testing {

/// Writes the entry's unit to `dir/<name>.ml.js` and runs the engine with an
/// oracle provider for it, so the resulting proposal points at a real file.
struct ProposalFixture {
  std::filesystem::path file;
  RefactorTarget target;
  GenerationResult generation;

  RefactoringProposal proposal() const {
    return make_proposal(file.string(), target, generation.candidates.front(), generation.prompt.sha256());
  }
};

inline ProposalFixture make_fixture(const CorpusEntry& c, const std::filesystem::path& dir,
                                    const std::string& file_text_override = "") {
  ProposalFixture f;
  f.file = dir / (c.name + ".ml.js");
  write_file(f.file, file_text_override.empty() ? c.source : file_text_override);
  auto [fn, smell] = corpus_target(c);
  f.target = {c.source, fn, smell};
  auto fx = std::make_shared<OracleFixtures>();
  fx->add(fn.text, c.refactored);
  SelectionPolicy policy;
  policy.default_provider_id = "oracle";
  RefactorEngine engine(AnalysisConfig{}, policy);
  engine.add_provider(std::make_shared<MockProvider>("oracle", MockBehavior::Oracle, fx));
  f.generation = engine.generate_candidates(f.target, 1);
  return f;
}

}  // namespace rguard::testing
