#include <gtest/gtest.h>

#include <filesystem>
#include <map>

#include "radtext/error.hpp"
#include "radtext/rng.hpp"
#include "radtext/trends.hpp"
#include "test_support.hpp"

using namespace radtext;
using radtext::fixture::make_labeled;

namespace {

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto at = haystack.find(needle); at != std::string::npos; at = haystack.find(needle, at + 1)) ++n;
  return n;
}

std::vector<LabeledRecord> random_labeled(Rng& rng, std::size_t n) {
  const std::vector<std::string> sources{"JKLF", "Valley Herald", "Summit Notes", "Ridge, Commentary"};
  std::vector<LabeledRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(make_labeled("r" + std::to_string(i), static_cast<Label>(rng.index(3)), "text",
                               sources[rng.index(sources.size())], 2006 + static_cast<int>(rng.index(13))));
  }
  return out;
}

/// Filter to R, group by (source, year), count; ordered map gives the sort.
std::vector<TimelinePoint> oracle(const std::vector<LabeledRecord>& records) {
  std::map<std::pair<std::string, int>, std::size_t> groups;
  for (const auto& r : records)
    if (r.label == Label::R) ++groups[{r.record.source_name, r.record.date.year}];
  std::vector<TimelinePoint> out;
  for (const auto& [k, c] : groups) out.push_back({k.first, k.second, c});
  return out;
}

}  // namespace

TEST(Timeline, CountsPerSourceYear) {
  const std::vector<LabeledRecord> records{
      make_labeled("a", Label::R, "x", "JKLF", 2009), make_labeled("b", Label::R, "x", "JKLF", 2009),
      make_labeled("c", Label::R, "x", "JKLF", 2010), make_labeled("d", Label::NR, "x", "JKLF", 2010)};
  const auto points = radical_timeline(records);
  const std::vector<TimelinePoint> expected{{"JKLF", 2009, 2}, {"JKLF", 2010, 1}};
  EXPECT_EQ(points, expected);
}

TEST(Timeline, NoRadicalRecordsGivesEmptyList) {
  const std::vector<LabeledRecord> records{make_labeled("a", Label::NR), make_labeled("b", Label::I)};
  EXPECT_TRUE(radical_timeline(records).empty());
  EXPECT_TRUE(radical_timeline(std::vector<LabeledRecord>{}).empty());
}

TEST(Timeline, MissingYearNamesRecord) {
  auto record = make_labeled("undated", Label::R);
  record.record.date = Date{};
  try {
    radical_timeline(std::vector<LabeledRecord>{record});
    FAIL() << "expected a validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
    EXPECT_NE(std::string(e.what()).find("undated"), std::string::npos);
  }
}

TEST(TimelineProperty, MatchesBruteForceOracle) {
  Rng rng(50);
  for (std::size_t n : {50u, 1000u}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto records = random_labeled(rng, n);
      ASSERT_EQ(radical_timeline(records), oracle(records));
    }
  }
}

TEST(TimelineProperty, ConservesCountsAndIgnoresOrder) {
  Rng rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    auto records = random_labeled(rng, 1 + rng.index(200));
    const auto points = radical_timeline(records);
    std::size_t total = 0, radical = 0;
    for (const auto& p : points) {
      ASSERT_GT(p.radical_count, 0u);
      total += p.radical_count;
    }
    for (const auto& r : records) radical += r.label == Label::R;
    ASSERT_EQ(total, radical);
    rng.shuffle(records);
    ASSERT_EQ(radical_timeline(records), points);
  }
}

TEST(TimelineCsv, HeaderAndQuoting) {
  const std::vector<TimelinePoint> one{{"JKLF", 2009, 2}};
  EXPECT_EQ(timeline_csv(one), "source,year,count\nJKLF,2009,2\n");
  const std::vector<TimelinePoint> quoted{{"Ridge, Commentary", 2010, 1}};
  EXPECT_EQ(timeline_csv(quoted), "source,year,count\n\"Ridge, Commentary\",2010,1\n");
}

TEST(TimelineSvg, AxisSpansDataYearsAndOneSeriesPerSource) {
  const std::vector<TimelinePoint> points{{"A", 2006, 3}, {"A", 2018, 1}, {"B", 2010, 2}};
  const auto svg = timeline_svg(points);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("data-min-year=\"2006\""), std::string::npos);
  EXPECT_NE(svg.find("data-max-year=\"2018\""), std::string::npos);
  EXPECT_EQ(count_of(svg, "class=\"x-tick\""), 13u);
  EXPECT_EQ(count_of(svg, "class=\"series\""), 2u);
  EXPECT_EQ(count_of(svg, "class=\"legend-entry\""), 2u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(svg.find("href"), std::string::npos);
}

TEST(TimelineSvg, EscapesSourceNames) {
  const std::vector<TimelinePoint> points{{"<Tom & Jerry>", 2010, 1}};
  const auto svg = timeline_svg(points);
  EXPECT_EQ(svg.find("<Tom"), std::string::npos);
  EXPECT_NE(svg.find("&lt;Tom &amp; Jerry&gt;"), std::string::npos);
}

TEST(RenderTimeline, WritesBothFiles) {
  fixture::TempDir dir("radtext-trends");
  const std::vector<TimelinePoint> one{{"JKLF", 2009, 2}};
  const auto result = render_timeline(one, dir.path());
  ASSERT_TRUE(result.emitted);
  EXPECT_FALSE(result.warning.has_value());
  EXPECT_EQ(fixture::read_text(result.csv_path), "source,year,count\nJKLF,2009,2\n");
  EXPECT_EQ(fixture::read_text(result.svg_path), timeline_svg(one));
}

TEST(RenderTimeline, EmptyInputWritesNothingAndWarns) {
  fixture::TempDir dir("radtext-trends-empty");
  const auto result = render_timeline(std::vector<TimelinePoint>{}, dir.path());
  EXPECT_FALSE(result.emitted);
  EXPECT_TRUE(result.warning.has_value());
  EXPECT_TRUE(std::filesystem::is_empty(dir.path()));
}
