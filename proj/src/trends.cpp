#include "radtext/trends.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include "radtext/csv.hpp"
#include "radtext/error.hpp"

namespace radtext {

std::vector<TimelinePoint> radical_timeline(std::span<const LabeledRecord> labeled) {
  std::map<std::pair<std::string, int>, std::size_t> counts;
  for (const auto& item : labeled) {
    if (item.record.date.year == 0) {
      throw Error(ErrorKind::validation, "record '" + item.record.id + "' has no year");
    }
    if (item.label != Label::R) continue;
    ++counts[{item.record.source_name, item.record.date.year}];
  }
  std::vector<TimelinePoint> out;
  out.reserve(counts.size());
  for (const auto& [key, count] : counts) out.push_back({key.first, key.second, count});
  return out;
}

std::string timeline_csv(std::span<const TimelinePoint> points) {
  std::string out = "source,year,count\n";
  for (const auto& p : points) {
    out += csv::join({p.source_name, std::to_string(p.year), std::to_string(p.radical_count)});
    out += '\n';
  }
  return out;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string timeline_svg(std::span<const TimelinePoint> points) {
  constexpr double width = 860, height = 420;
  constexpr double left = 60, right = 200, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  int min_year = 0, max_year = 0;
  std::size_t max_count = 1;
  std::map<std::string, std::vector<const TimelinePoint*>> series;
  if (!points.empty()) min_year = max_year = points.front().year;
  for (const auto& p : points) {
    min_year = std::min(min_year, p.year);
    max_year = std::max(max_year, p.year);
    max_count = std::max(max_count, p.radical_count);
    series[p.source_name].push_back(&p);
  }
  const int span = std::max(1, max_year - min_year);
  auto x_of = [&](int year) {
    if (max_year == min_year) return left + plot_w / 2;
    return left + plot_w * static_cast<double>(year - min_year) / span;
  };
  auto y_of = [&](std::size_t count) {
    return top + plot_h * (1.0 - static_cast<double>(count) / static_cast<double>(max_count));
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" data-min-year=\"" + std::to_string(min_year) +
         "\" data-max-year=\"" + std::to_string(max_year) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(left) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">Radical records per year</text>\n";
  svg += "<line class=\"axis\" x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(left + plot_w) +
         "\" y2=\"" + num(top + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<line class=\"axis\" x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" +
         num(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (int year = min_year; year <= max_year; ++year) {
    svg += "<text class=\"x-tick\" x=\"" + num(x_of(year)) + "\" y=\"" + num(top + plot_h + 18) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" + std::to_string(year) + "</text>\n";
  }
  const std::size_t y_step = std::max<std::size_t>(1, (max_count + 4) / 5);
  for (std::size_t c = 0; c <= max_count; c += y_step) {
    svg += "<text class=\"y-tick\" x=\"" + num(left - 8) + "\" y=\"" + num(y_of(c) + 4) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" + std::to_string(c) + "</text>\n";
  }
  svg += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 10) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">year</text>\n";

  std::size_t index = 0;
  for (const auto& [source, pts] : series) {
    const char* color = kPalette[index % std::size(kPalette)];
    const std::string name = xml_escape(source);
    svg += "<g class=\"series\" data-source=\"" + name + "\">\n<polyline fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) {
      svg += (k ? " " : "") + num(x_of(pts[k]->year)) + "," + num(y_of(pts[k]->radical_count));
    }
    svg += "\"/>\n";
    for (const auto* p : pts) {
      svg += "<circle cx=\"" + num(x_of(p->year)) + "\" cy=\"" + num(y_of(p->radical_count)) + "\" r=\"3\" fill=\"" +
             color + "\"/>\n";
    }
    svg += "</g>\n";
    const double ly = top + 16.0 * static_cast<double>(index);
    svg += "<g class=\"legend-entry\"><rect x=\"" + num(left + plot_w + 16) + "\" y=\"" + num(ly) +
           "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/><text x=\"" + num(left + plot_w + 32) + "\" y=\"" +
           num(ly + 9) + "\" font-family=\"sans-serif\" font-size=\"11\">" + name + "</text></g>\n";
    ++index;
  }
  svg += "</svg>\n";
  return svg;
}

RenderResult render_timeline(std::span<const TimelinePoint> points, const std::filesystem::path& out_dir,
                             const std::string& stem) {
  RenderResult result;
  if (points.empty()) {
    result.warning = "no radical records to plot; timeline not written";
    return result;
  }
  std::filesystem::create_directories(out_dir);
  result.csv_path = out_dir / (stem + ".csv");
  result.svg_path = out_dir / (stem + ".svg");
  std::ofstream csv_out(result.csv_path, std::ios::binary);
  std::ofstream svg_out(result.svg_path, std::ios::binary);
  if (!csv_out || !svg_out) throw Error(ErrorKind::io, "cannot write timeline into " + out_dir.string());
  csv_out << timeline_csv(points);
  svg_out << timeline_svg(points);
  result.emitted = true;
  return result;
}

}  // namespace radtext
