#include <gtest/gtest.h>

#include <set>

#include "rguard/validation.hpp"
#include "support/corpus.hpp"

namespace rguard {
namespace {

using testing::corpus_target;
using testing::load_corpus;

std::string joined(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += "  " + l + "\n";
  return out;
}

void expect_corpus(const std::string& dir) {
  const auto corpus = load_corpus(dir);
  ASSERT_FALSE(corpus.empty());
  for (const auto& c : corpus) {
    SCOPED_TRACE(c.file);
    auto [fn, smell] = corpus_target(c);
    const ValidationReport r =
        validate_candidate(c.source, fn, smell, c.refactored, MiniLangAdapter{}, AnalysisConfig{});
    EXPECT_EQ(r.confidence, c.expect) << c.name << "\n" << joined(r.rationale);
  }
}

TEST(Corpus, OraclePairsValidateHigh) { expect_corpus("oracle"); }

TEST(Corpus, MidPairsValidateMid) { expect_corpus("mid"); }

TEST(Corpus, CoversEverySmellKind) {
  std::set<SmellKind> kinds;
  for (const auto& c : load_corpus("oracle")) kinds.insert(c.smell);
  EXPECT_EQ(kinds.size(), kAllSmellKinds.size());
}

}  // namespace
}  // namespace rguard
