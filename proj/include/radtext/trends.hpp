#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radtext/corpus.hpp"

namespace radtext {

struct TimelinePoint {
  std::string source_name;
  int year = 0;
  std::size_t radical_count = 0;

  friend bool operator==(const TimelinePoint&, const TimelinePoint&) = default;
};

/// Counts R-labeled records per (source, year), sorted by source then year.
/// Pairs with no R records are omitted. A record without a year is a
/// validation error naming the record.
std::vector<TimelinePoint> radical_timeline(std::span<const LabeledRecord> labeled);

/// CSV with header source,year,count.
std::string timeline_csv(std::span<const TimelinePoint> points);

/// Standalone SVG line chart: one series per source, x = year spanning exactly
/// the data's min..max year, y = count.
std::string timeline_svg(std::span<const TimelinePoint> points);

struct RenderResult {
  bool emitted = false;
  std::optional<std::string> warning;
  std::filesystem::path csv_path;
  std::filesystem::path svg_path;
};

/// Writes <stem>.csv and <stem>.svg into `out_dir`. Empty input writes nothing
/// and returns a warning.
RenderResult render_timeline(std::span<const TimelinePoint> points, const std::filesystem::path& out_dir,
                             const std::string& stem = "timeline");

}  // namespace radtext
