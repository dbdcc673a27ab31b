#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radtext/corpus.hpp"
#include "radtext/prediction.hpp"

namespace radtext {

struct ClassMetrics {
  Label label = Label::R;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t support = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Undefined precision, recall or F1 (zero denominator) is reported as 0.
struct EvalReport {
  std::vector<ClassMetrics> per_class;  // in (R, NR, I) order
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t total = 0;
  std::size_t correct = 0;
  Label positive_class = Label::R;

  const ClassMetrics& for_class(Label label) const;
  const ClassMetrics& positive() const { return for_class(positive_class); }
};

double f1_score(double precision, double recall);

/// Requires the prediction and truth id sets to match exactly. `classes`
/// defaults to every label seen in either list.
EvalReport evaluate(std::span<const Prediction> predictions, std::span<const LabeledRecord> truth,
                    std::vector<Label> classes = {});

void write_eval_report(const EvalReport& report, const std::filesystem::path& path);
std::string eval_report_csv(const EvalReport& report);

struct ComparisonRow {
  std::string name;
  double precision = 0.0;  // fractions in [0, 1]
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> accuracy;

  /// Positive-class precision/recall/F1 plus accuracy.
  static ComparisonRow from_report(std::string name, const EvalReport& report);
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // descending precision
  std::string text;
  std::string csv;
};

/// Sorts by precision (descending, ties by name) and renders an aligned text
/// table and a CSV with columns name,precision,recall,f1,accuracy in percent.
ComparisonTable comparison_table(std::vector<ComparisonRow> rows);

}  // namespace radtext
