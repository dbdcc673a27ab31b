#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "radtext/annotation.hpp"
#include "radtext/error.hpp"
#include "radtext/rng.hpp"
#include "test_support.hpp"

using namespace radtext;
using radtext::fixture::TempDir;

namespace {

/// Expands the matrix into individual rated items and evaluates the kappa
/// definition on the item list, with exact integer tallies.
double brute_force_kappa(const std::vector<std::vector<std::uint64_t>>& counts) {
  std::vector<std::pair<std::size_t, std::size_t>> items;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts.size(); ++j) {
      for (std::uint64_t k = 0; k < counts[i][j]; ++k) items.emplace_back(i, j);
    }
  }
  const auto n = static_cast<long double>(items.size());
  long double agree = 0;
  std::vector<long double> first(counts.size(), 0), second(counts.size(), 0);
  for (const auto& [a, b] : items) {
    agree += (a == b);
    first[a] += 1;
    second[b] += 1;
  }
  long double chance = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) chance += (first[k] / n) * (second[k] / n);
  const long double observed = agree / n;
  return static_cast<double>((observed - chance) / (1 - chance));
}

ConfusionMatrix three_by_three(std::vector<std::vector<std::uint64_t>> counts) {
  return ConfusionMatrix::from_counts({Label::R, Label::NR, Label::I}, std::move(counts));
}

AnnotationSet set_of(const std::string& id, std::map<std::string, Label> labels) { return {id, std::move(labels)}; }

std::vector<Record> corpus_of(std::initializer_list<const char*> ids) {
  std::vector<Record> out;
  for (const char* id : ids) out.push_back(fixture::make_record(id, "body"));
  return out;
}

}  // namespace

TEST(Confusion, PerfectAgreementDiagonal) {
  const auto m = confusion_matrix(set_of("a", {{"r1", Label::R}, {"r2", Label::NR}}),
                                  set_of("b", {{"r1", Label::R}, {"r2", Label::NR}}));
  EXPECT_EQ(m.counts[0][0], 1u);
  EXPECT_EQ(m.counts[1][1], 1u);
  EXPECT_EQ(m.counts[2][2], 0u);
  EXPECT_EQ(m.total(), 2u);
}

TEST(Confusion, SingleDisagreement) {
  const auto m = confusion_matrix(set_of("a", {{"r1", Label::R}}), set_of("b", {{"r1", Label::I}}));
  EXPECT_EQ(m.counts[label_index(Label::R)][label_index(Label::I)], 1u);
  EXPECT_EQ(m.total(), 1u);
}

TEST(Confusion, OnlySharedIdsAreCountedAndMatchTally) {
  Rng rng(3);
  AnnotationSet a{"a", {}}, b{"b", {}};
  std::vector<std::vector<std::uint64_t>> tally(3, std::vector<std::uint64_t>(3, 0));
  for (int i = 0; i < 6; ++i) {
    const Label la = kLabelOrder[rng.index(3)], lb = kLabelOrder[rng.index(3)];
    a.labels["s" + std::to_string(i)] = la;
    b.labels["s" + std::to_string(i)] = lb;
    ++tally[label_index(la)][label_index(lb)];
  }
  a.labels["only-a"] = Label::R;
  b.labels["only-b"] = Label::NR;
  EXPECT_EQ(confusion_matrix(a, b).counts, tally);
}

TEST(Confusion, EmptyOverlapIsError) {
  try {
    confusion_matrix(set_of("a", {{"x", Label::R}}), set_of("b", {{"y", Label::R}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_overlap);
  }
}

TEST(Kappa, HandCase) {
  const auto m = ConfusionMatrix::from_counts({Label::R, Label::NR}, {{45, 10}, {10, 35}});
  const auto k = cohens_kappa(m);
  EXPECT_NEAR(k.p_o, 0.80, 1e-15);
  EXPECT_NEAR(k.p_e, 0.505, 1e-15);
  EXPECT_NEAR(k.kappa, 0.59596, 1e-5);
  EXPECT_EQ(k.n, 100u);
  EXPECT_EQ(k.c, 2u);
}

TEST(Kappa, PerfectAgreementIsExactlyOne) {
  EXPECT_EQ(cohens_kappa(three_by_three({{3, 0, 0}, {0, 7, 0}, {0, 0, 1}})).kappa, 1.0);
  EXPECT_EQ(cohens_kappa(three_by_three({{1, 0, 0}, {0, 1, 0}, {0, 0, 0}})).kappa, 1.0);
}

TEST(Kappa, DegenerateCases) {
  try {
    cohens_kappa(three_by_three({{4, 0, 0}, {0, 0, 0}, {0, 0, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::undefined_kappa);
  }
  try {
    cohens_kappa(three_by_three({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_matrix);
  }
}

TEST(KappaProperty, MatchesBruteForceOnRandomMatrices) {
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::vector<std::uint64_t>> counts(3, std::vector<std::uint64_t>(3));
    for (auto& row : counts) {
      for (auto& v : row) v = rng.bernoulli(0.2) ? 0 : rng.index(40);
    }
    const auto m = three_by_three(counts);
    if (m.total() == 0) continue;
    KappaReport k;
    try {
      k = cohens_kappa(m);
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::undefined_kappa);
      continue;
    }
    ASSERT_NEAR(k.kappa, brute_force_kappa(counts), 1e-12);
    ASSERT_LE(k.kappa, 1.0);
    ASSERT_GT(k.kappa, -1.0);
    if (k.p_e >= 0) ASSERT_LE(k.kappa, k.p_o + 1e-15);
    ++checked;
  }
  EXPECT_GT(checked, 400);
}

TEST(KappaProperty, PermutationAndScalingInvariance) {
  Rng rng(77);
  const std::vector<std::array<std::size_t, 3>> perms{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<std::uint64_t>> counts(3, std::vector<std::uint64_t>(3));
    for (auto& row : counts) {
      for (auto& v : row) v = 1 + rng.index(20);
    }
    const double base = cohens_kappa(three_by_three(counts)).kappa;
    for (const auto& p : perms) {
      std::vector<std::vector<std::uint64_t>> permuted(3, std::vector<std::uint64_t>(3));
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) permuted[p[i]][p[j]] = counts[i][j];
      }
      ASSERT_NEAR(cohens_kappa(three_by_three(permuted)).kappa, base, 1e-12);
    }
    const std::uint64_t scale = 1 + rng.index(9);
    auto scaled = counts;
    for (auto& row : scaled) {
      for (auto& v : row) v *= scale;
    }
    const auto ks = cohens_kappa(three_by_three(scaled));
    ASSERT_NEAR(ks.kappa, base, 1e-12);
  }
}

TEST(KappaProperty, OneIffNoOffDiagonalMass) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<std::uint64_t>> counts(3, std::vector<std::uint64_t>(3, 0));
    for (std::size_t i = 0; i < 3; ++i) counts[i][i] = 1 + rng.index(10);
    const bool disagree = rng.bernoulli(0.5);
    if (disagree) {
      const std::size_t i = rng.index(3);
      counts[i][(i + 1 + rng.index(2)) % 3] += 1 + rng.index(5);
    }
    const double k = cohens_kappa(three_by_three(counts)).kappa;
    if (disagree) {
      ASSERT_LT(k, 1.0);
    } else {
      ASSERT_EQ(k, 1.0);
    }
  }
}

TEST(Adjudicate, FullAgreementDropPolicy) {
  const auto corpus = corpus_of({"a", "b", "c", "d", "e"});
  std::map<std::string, Label> labels{{"a", Label::R}, {"b", Label::NR}, {"c", Label::I}, {"d", Label::R}, {"e", Label::NR}};
  const auto result = adjudicate(corpus, set_of("x", labels), set_of("y", labels), AdjudicationPolicy::drop());
  EXPECT_EQ(result.gold.size(), 5u);
  EXPECT_EQ(result.report.agreements, 5u);
  for (const auto& g : result.gold) EXPECT_EQ(g.annotator_id, kGoldAnnotator);
}

TEST(Adjudicate, OneDisagreement) {
  const auto corpus = corpus_of({"a", "b", "c", "d", "e"});
  std::map<std::string, Label> la{{"a", Label::R}, {"b", Label::NR}, {"c", Label::I}, {"d", Label::R}, {"e", Label::NR}};
  auto lb = la;
  lb["c"] = Label::R;
  const auto dropped = adjudicate(corpus, set_of("x", la), set_of("y", lb), AdjudicationPolicy::drop());
  EXPECT_EQ(dropped.gold.size(), 4u);
  EXPECT_EQ(dropped.report.disagreements, 1u);
  EXPECT_EQ(dropped.report.pairs.counts[label_index(Label::I)][label_index(Label::R)], 1u);

  const auto preferred = adjudicate(corpus, set_of("x", la), set_of("y", lb), AdjudicationPolicy::prefer("x"));
  ASSERT_EQ(preferred.gold.size(), 5u);
  EXPECT_EQ(preferred.gold[2].record.id, "c");
  EXPECT_EQ(preferred.gold[2].label, Label::I);
  const auto other = adjudicate(corpus, set_of("x", la), set_of("y", lb), AdjudicationPolicy::prefer("y"));
  EXPECT_EQ(other.gold[2].label, Label::R);
}

TEST(Adjudicate, UnknownPreferredAnnotator) {
  const auto corpus = corpus_of({"a"});
  try {
    adjudicate(corpus, set_of("x", {{"a", Label::R}}), set_of("y", {{"a", Label::R}}), AdjudicationPolicy::prefer("z"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
  }
}

TEST(LabelLog, AppendReplayLatestWins) {
  TempDir dir("radtext-log");
  const auto path = dir / "labels.csv";
  append_label_event({"r1", "ann1", Label::R, "2020-01-01T00:00:00Z"}, path);
  append_label_event({"r1", "ann2", Label::NR, "2020-01-01T00:00:01Z"}, path);
  append_label_event({"r1", "ann1", Label::I, "2020-01-01T00:00:02Z"}, path);
  append_label_event({"r,2", "ann1", Label::NR, "t"}, path);
  const auto events = read_label_log(path);
  ASSERT_EQ(events.size(), 4u);
  EXPECT_EQ(events[3].record_id, "r,2");
  const auto sets = replay_label_log(events);
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets.at("ann1").labels.at("r1"), Label::I);
  EXPECT_EQ(sets.at("ann2").labels.at("r1"), Label::NR);

  write_label_log(events, dir / "copy.csv");
  EXPECT_EQ(read_label_log(dir / "copy.csv"), events);
}

TEST(LabelLog, BadRowsAreParseErrors) {
  TempDir dir("radtext-log");
  fixture::write_text(dir / "bad.csv", std::string(kLabelLogHeader) + "\nr1,a,X,t\n");
  EXPECT_THROW(read_label_log(dir / "bad.csv"), Error);
  fixture::write_text(dir / "hdr.csv", "id,who,label,time\n");
  EXPECT_THROW(read_label_log(dir / "hdr.csv"), Error);
}

TEST(LabelLog, AttachLabelsKeepsCorpusOrder) {
  const auto corpus = corpus_of({"c", "a", "b"});
  const auto labeled = attach_labels(corpus, set_of("gold", {{"a", Label::R}, {"c", Label::NR}}));
  ASSERT_EQ(labeled.size(), 2u);
  EXPECT_EQ(labeled[0].record.id, "c");
  EXPECT_EQ(labeled[1].label, Label::R);
}
