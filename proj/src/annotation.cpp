#include "radtext/annotation.hpp"

#include <fstream>
#include <unordered_map>

#include "radtext/csv.hpp"
#include "radtext/error.hpp"

namespace radtext {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts) {
    for (auto v : row) n += v;
  }
  return n;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t i) const {
  std::uint64_t s = 0;
  for (auto v : counts[i]) s += v;
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t j) const {
  std::uint64_t s = 0;
  for (const auto& row : counts) s += row[j];
  return s;
}

ConfusionMatrix ConfusionMatrix::from_counts(std::vector<Label> classes,
                                             std::vector<std::vector<std::uint64_t>> counts) {
  if (counts.size() != classes.size()) throw Error(ErrorKind::validation, "confusion matrix row count != class count");
  for (const auto& row : counts) {
    if (row.size() != classes.size()) throw Error(ErrorKind::validation, "confusion matrix is not square");
  }
  return ConfusionMatrix{std::move(classes), std::move(counts)};
}

ConfusionMatrix confusion_matrix(const AnnotationSet& a, const AnnotationSet& b) {
  ConfusionMatrix m{{kLabelOrder.begin(), kLabelOrder.end()}, std::vector<std::vector<std::uint64_t>>(3, std::vector<std::uint64_t>(3, 0))};
  std::uint64_t shared = 0;
  for (const auto& [id, label_a] : a.labels) {
    auto it = b.labels.find(id);
    if (it == b.labels.end()) continue;
    ++m.counts[label_index(label_a)][label_index(it->second)];
    ++shared;
  }
  if (shared == 0) {
    throw Error(ErrorKind::empty_overlap,
                "annotators '" + a.annotator_id + "' and '" + b.annotator_id + "' share no record ids");
  }
  return m;
}

KappaReport cohens_kappa(const ConfusionMatrix& m) {
  const std::uint64_t n = m.total();
  if (n == 0) throw Error(ErrorKind::empty_matrix, "kappa needs at least one item");
  std::uint64_t trace = 0;
  // Numerator of p_e over n^2, kept as an exact integer (n up to 2^32 fits).
  unsigned __int128 marginal_product = 0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    trace += m.counts[k][k];
    marginal_product += static_cast<unsigned __int128>(m.row_sum(k)) * m.col_sum(k);
  }
  const unsigned __int128 n_squared = static_cast<unsigned __int128>(n) * n;
  if (marginal_product == n_squared) {
    throw Error(ErrorKind::undefined_kappa, "chance agreement is 1 (all mass in a single class)");
  }
  KappaReport report;
  report.n = n;
  report.c = m.size();
  const double nd = static_cast<double>(n);
  report.p_o = static_cast<double>(trace) / nd;
  report.p_e = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    report.p_e += (static_cast<double>(m.row_sum(k)) / nd) * (static_cast<double>(m.col_sum(k)) / nd);
  }
  report.kappa = trace == n ? 1.0 : (report.p_o - report.p_e) / (1.0 - report.p_e);
  return report;
}

AdjudicationResult adjudicate(std::span<const Record> corpus, const AnnotationSet& a, const AnnotationSet& b,
                              const AdjudicationPolicy& policy) {
  const AnnotationSet* preferred = nullptr;
  if (policy.kind == AdjudicationPolicy::Kind::prefer_annotator) {
    if (policy.annotator_id == a.annotator_id) {
      preferred = &a;
    } else if (policy.annotator_id == b.annotator_id) {
      preferred = &b;
    } else {
      throw Error(ErrorKind::validation, "adjudication policy names unknown annotator '" + policy.annotator_id + "'");
    }
  }

  AdjudicationResult result;
  result.report.pairs = confusion_matrix(a, b);

  std::unordered_map<std::string, const Record*> by_id;
  for (const auto& record : corpus) by_id.emplace(record.id, &record);
  for (const auto& [id, label_a] : a.labels) {
    auto it = b.labels.find(id);
    if (it == b.labels.end()) continue;
    if (!by_id.count(id)) throw Error(ErrorKind::validation, "labeled record '" + id + "' is not in the corpus");
  }

  for (const auto& record : corpus) {
    auto ia = a.labels.find(record.id);
    auto ib = b.labels.find(record.id);
    if (ia == a.labels.end() || ib == b.labels.end()) continue;
    ++result.report.shared;
    const bool agree = ia->second == ib->second;
    if (agree) {
      ++result.report.agreements;
    } else {
      ++result.report.disagreements;
    }
    if (agree) {
      result.gold.push_back({record, ia->second, kGoldAnnotator});
    } else if (preferred) {
      result.gold.push_back({record, preferred->labels.at(record.id), kGoldAnnotator});
    }
  }
  return result;
}

std::string label_event_line(const LabelEvent& event) {
  return csv::join({event.record_id, event.annotator_id, to_string(event.label), event.timestamp});
}

std::vector<LabelEvent> read_label_log(const std::filesystem::path& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) return {};
  const auto& header = rows.front().fields;
  if (header != std::vector<std::string>{"record_id", "annotator_id", "label", "timestamp"}) {
    throw Error(ErrorKind::parse, path.string() + " line 1: expected header " + kLabelLogHeader);
  }
  std::vector<LabelEvent> events;
  events.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != 4) {
      throw Error(ErrorKind::parse, path.string() + " line " + std::to_string(rows[r].line) + ": expected 4 fields");
    }
    auto label = try_parse_label(f[2]);
    if (!label || f[0].empty() || f[1].empty()) {
      throw Error(ErrorKind::parse, path.string() + " line " + std::to_string(rows[r].line) + ": invalid label event");
    }
    events.push_back({f[0], f[1], *label, f[3]});
  }
  return events;
}

void write_label_log(std::span<const LabelEvent> events, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << kLabelLogHeader << '\n';
  for (const auto& e : events) out << label_event_line(e) << '\n';
}

void append_label_event(const LabelEvent& event, const std::filesystem::path& path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorKind::io, "cannot append to " + path.string());
  if (fresh) out << kLabelLogHeader << '\n';
  out << label_event_line(event) << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::io, "append failed: " + path.string());
}

std::map<std::string, AnnotationSet> replay_label_log(std::span<const LabelEvent> events) {
  std::map<std::string, AnnotationSet> sets;
  for (const auto& e : events) {
    auto& set = sets[e.annotator_id];
    set.annotator_id = e.annotator_id;
    set.labels[e.record_id] = e.label;
  }
  return sets;
}

AnnotationSet annotation_set_from_log(std::span<const LabelEvent> events, std::string annotator_id) {
  AnnotationSet set{std::move(annotator_id), {}};
  for (const auto& e : events) set.labels[e.record_id] = e.label;
  return set;
}

std::vector<LabeledRecord> attach_labels(std::span<const Record> corpus, const AnnotationSet& labels) {
  std::vector<LabeledRecord> out;
  for (const auto& record : corpus) {
    auto it = labels.labels.find(record.id);
    if (it != labels.labels.end()) out.push_back({record, it->second, labels.annotator_id});
  }
  return out;
}

}  // namespace radtext
