#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radtext/corpus.hpp"

namespace radtext {

struct AnnotationSet {
  std::string annotator_id;
  std::map<std::string, Label> labels;  // record_id -> label
};

/// counts[i][j]: items labeled classes[i] by the first rater and classes[j] by the second.
struct ConfusionMatrix {
  std::vector<Label> classes;
  std::vector<std::vector<std::uint64_t>> counts;

  std::size_t size() const { return classes.size(); }
  std::uint64_t total() const;
  std::uint64_t row_sum(std::size_t i) const;
  std::uint64_t col_sum(std::size_t j) const;

  /// Builds a c x c matrix; rows must be square and match classes.size().
  static ConfusionMatrix from_counts(std::vector<Label> classes, std::vector<std::vector<std::uint64_t>> counts);
};

struct KappaReport {
  double p_o = 0.0;
  double p_e = 0.0;
  double kappa = 0.0;
  std::uint64_t n = 0;
  std::size_t c = 0;
};

/// Tallies only the record ids both sets share; class order is (R, NR, I).
/// Throws Error(empty_overlap) when nothing is shared.
ConfusionMatrix confusion_matrix(const AnnotationSet& a, const AnnotationSet& b);

/// Cohen's kappa from exact integer counts. Throws Error(empty_matrix) for n = 0
/// and Error(undefined_kappa) when chance agreement is 1.
KappaReport cohens_kappa(const ConfusionMatrix& m);

struct AdjudicationPolicy {
  enum class Kind { drop_disagreements, prefer_annotator };
  Kind kind = Kind::drop_disagreements;
  std::string annotator_id;  // used by prefer_annotator

  static AdjudicationPolicy drop() { return {}; }
  static AdjudicationPolicy prefer(std::string id) { return {Kind::prefer_annotator, std::move(id)}; }
};

struct AdjudicationReport {
  std::size_t shared = 0;
  std::size_t agreements = 0;
  std::size_t disagreements = 0;
  ConfusionMatrix pairs;  // per class-pair tallies over shared records
};

struct AdjudicationResult {
  std::vector<LabeledRecord> gold;
  AdjudicationReport report;
};

inline constexpr const char* kGoldAnnotator = "gold";

/// Resolves two annotators' labels into gold records drawn from `corpus`. Gold
/// records keep corpus order. Shared ids missing from the corpus are a
/// validation error, as is a prefer policy naming neither annotator.
AdjudicationResult adjudicate(std::span<const Record> corpus, const AnnotationSet& a, const AnnotationSet& b,
                              const AdjudicationPolicy& policy);

struct LabelEvent {
  std::string record_id;
  std::string annotator_id;
  Label label = Label::NR;
  std::string timestamp;

  friend bool operator==(const LabelEvent&, const LabelEvent&) = default;
};

inline constexpr const char* kLabelLogHeader = "record_id,annotator_id,label,timestamp";

/// Reads a label log (CSV with header record_id,annotator_id,label,timestamp).
std::vector<LabelEvent> read_label_log(const std::filesystem::path& path);
void write_label_log(std::span<const LabelEvent> events, const std::filesystem::path& path);
/// Appends one event, writing the header first if the file is new or empty.
void append_label_event(const LabelEvent& event, const std::filesystem::path& path);
std::string label_event_line(const LabelEvent& event);

/// Replays events in log order; a later event for the same (record, annotator)
/// supersedes the earlier one. Result is keyed by annotator id.
std::map<std::string, AnnotationSet> replay_label_log(std::span<const LabelEvent> events);

/// All labels in a log collapsed into one set regardless of annotator id.
AnnotationSet annotation_set_from_log(std::span<const LabelEvent> events, std::string annotator_id);

/// Joins gold labels onto corpus records, dropping records without a label.
std::vector<LabeledRecord> attach_labels(std::span<const Record> corpus, const AnnotationSet& labels);

}  // namespace radtext
