#include "radtext/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include "radtext/error.hpp"

namespace radtext {

const ClassMetrics& EvalReport::for_class(Label label) const {
  for (const auto& m : per_class) {
    if (m.label == label) return m;
  }
  throw Error(ErrorKind::validation, std::string("report has no class ") + to_string(label));
}

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

EvalReport evaluate(std::span<const Prediction> predictions, std::span<const LabeledRecord> truth,
                    std::vector<Label> classes) {
  std::map<std::string, Label> truth_by_id;
  for (const auto& t : truth) {
    if (!truth_by_id.emplace(t.record.id, t.label).second) {
      throw Error(ErrorKind::validation, "duplicate truth id '" + t.record.id + "'");
    }
  }
  std::map<std::string, Label> predicted_by_id;
  for (const auto& p : predictions) {
    if (!truth_by_id.count(p.record_id)) {
      throw Error(ErrorKind::validation, "prediction for unknown record '" + p.record_id + "'");
    }
    if (!predicted_by_id.emplace(p.record_id, p.label).second) {
      throw Error(ErrorKind::validation, "duplicate prediction for '" + p.record_id + "'");
    }
  }
  if (predicted_by_id.size() != truth_by_id.size()) {
    throw Error(ErrorKind::validation, "predictions cover " + std::to_string(predicted_by_id.size()) + " of " +
                                           std::to_string(truth_by_id.size()) + " records");
  }

  if (classes.empty()) {
    std::array<bool, 3> seen{};
    for (const auto& [id, label] : truth_by_id) seen[label_index(label)] = true;
    for (const auto& [id, label] : predicted_by_id) seen[label_index(label)] = true;
    for (Label l : kLabelOrder) {
      if (seen[label_index(l)]) classes.push_back(l);
    }
  }
  std::sort(classes.begin(), classes.end(), [](Label a, Label b) { return label_index(a) < label_index(b); });

  std::array<std::size_t, 3> tp{}, fp{}, fn{}, support{};
  EvalReport report;
  for (const auto& [id, actual] : truth_by_id) {
    const Label predicted = predicted_by_id.at(id);
    ++support[label_index(actual)];
    ++report.total;
    if (predicted == actual) {
      ++tp[label_index(actual)];
      ++report.correct;
    } else {
      ++fp[label_index(predicted)];
      ++fn[label_index(actual)];
    }
  }
  report.accuracy = report.total ? static_cast<double>(report.correct) / static_cast<double>(report.total) : 0.0;

  for (Label l : classes) {
    const auto k = label_index(l);
    ClassMetrics m{l, tp[k], fp[k], fn[k], support[k]};
    m.precision = tp[k] + fp[k] ? static_cast<double>(tp[k]) / static_cast<double>(tp[k] + fp[k]) : 0.0;
    m.recall = tp[k] + fn[k] ? static_cast<double>(tp[k]) / static_cast<double>(tp[k] + fn[k]) : 0.0;
    m.f1 = f1_score(m.precision, m.recall);
    report.macro_precision += m.precision;
    report.macro_recall += m.recall;
    report.macro_f1 += m.f1;
    report.per_class.push_back(m);
  }
  if (!classes.empty()) {
    const double c = static_cast<double>(classes.size());
    report.macro_precision /= c;
    report.macro_recall /= c;
    report.macro_f1 /= c;
  }
  if (std::find(classes.begin(), classes.end(), Label::R) == classes.end() && !classes.empty()) {
    report.positive_class = classes.front();
  }
  return report;
}

std::string eval_report_csv(const EvalReport& report) {
  std::string out = "scope,precision,recall,f1,accuracy,support\n";
  char line[160];
  for (const auto& m : report.per_class) {
    std::snprintf(line, sizeof line, "%s,%.6f,%.6f,%.6f,,%zu\n", to_string(m.label), m.precision, m.recall, m.f1,
                  m.support);
    out += line;
  }
  std::snprintf(line, sizeof line, "macro,%.6f,%.6f,%.6f,,%zu\n", report.macro_precision, report.macro_recall,
                report.macro_f1, report.total);
  out += line;
  std::snprintf(line, sizeof line, "overall,,,,%.6f,%zu\n", report.accuracy, report.total);
  out += line;
  return out;
}

void write_eval_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << eval_report_csv(report);
}

ComparisonRow ComparisonRow::from_report(std::string name, const EvalReport& report) {
  const auto& pos = report.positive();
  return {std::move(name), pos.precision, pos.recall, pos.f1, report.accuracy};
}

ComparisonTable comparison_table(std::vector<ComparisonRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    if (a.precision != b.precision) return a.precision > b.precision;
    return a.name < b.name;
  });

  auto pct = [](double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", v * 100.0);
    return std::string(buffer);
  };
  auto acc = [&](const std::optional<double>& v) { return v ? pct(*v) : std::string("NA"); };

  ComparisonTable table;
  table.csv = "name,precision,recall,f1,accuracy\n";
  std::size_t name_width = 4;
  for (const auto& r : rows) name_width = std::max(name_width, r.name.size());
  auto pad = [](std::string s, std::size_t width, bool left) {
    if (s.size() >= width) return s;
    return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
  };
  table.text = pad("name", name_width, true) + "  " + pad("precision", 9, false) + "  " + pad("recall", 9, false) +
               "  " + pad("f1", 9, false) + "  " + pad("accuracy", 9, false) + "\n";
  for (const auto& r : rows) {
    table.csv += r.name + "," + pct(r.precision) + "," + pct(r.recall) + "," + pct(r.f1) + "," + acc(r.accuracy) + "\n";
    table.text += pad(r.name, name_width, true) + "  " + pad(pct(r.precision), 9, false) + "  " +
                  pad(pct(r.recall), 9, false) + "  " + pad(pct(r.f1), 9, false) + "  " +
                  pad(acc(r.accuracy), 9, false) + "\n";
  }
  table.text += "(percent; undefined precision/recall/F1 reported as 0)\n";
  table.rows = std::move(rows);
  return table;
}

}  // namespace radtext
