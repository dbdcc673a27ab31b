#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace radtext {

enum class Label { R = 0, NR = 1, I = 2 };

inline constexpr std::array<Label, 3> kLabelOrder{Label::R, Label::NR, Label::I};

const char* to_string(Label label) noexcept;
/// Throws Error(validation) for anything other than "R", "NR" or "I".
Label parse_label(std::string_view text);
std::optional<Label> try_parse_label(std::string_view text) noexcept;
inline std::size_t label_index(Label label) noexcept { return static_cast<std::size_t>(label); }

enum class SourceType { news, article, blog };

const char* to_string(SourceType type) noexcept;
SourceType parse_source_type(std::string_view text);

struct Date {
  int year = 0;
  std::optional<int> month;
  std::optional<int> day;

  friend bool operator==(const Date&, const Date&) = default;
};

/// Accepts "YYYY" or "YYYY-MM-DD"; year must lie in [1990, 2100].
Date parse_date(std::string_view text);
std::string to_string(const Date& date);

struct Record {
  std::string id;
  std::string source_name;
  SourceType source_type = SourceType::blog;
  Date date;
  std::string title;
  std::string body;
  std::string language = "en";

  friend bool operator==(const Record&, const Record&) = default;
};

struct LabeledRecord {
  Record record;
  Label label = Label::NR;
  std::string annotator_id;

  friend bool operator==(const LabeledRecord&, const LabeledRecord&) = default;
};

struct TokenSequence {
  std::vector<std::string> tokens;
  std::string source_record_id;
};

class StopwordList {
 public:
  StopwordList() = default;
  StopwordList(std::string name, const std::vector<std::string>& words);

  /// UTF-8, one word per line, '#' starts a comment. Entries are lowercased.
  static StopwordList load(const std::filesystem::path& path);

  bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
  const std::set<std::string>& words() const { return words_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::set<std::string> words_;
};

/// Path of the stopword list shipped with the repository.
std::filesystem::path default_stopwords_path();

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool stratified = true;
};

enum class RecordFormat { jsonl, csv };

RecordFormat parse_record_format(std::string_view text);

struct IngestReport {
  std::size_t rows = 0;
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

struct IngestResult {
  std::vector<Record> records;
  IngestReport report;
};

/// Loads records from a local file, dropping rows whose body is blank or only
/// punctuation. Malformed rows raise Error(parse) naming the line; duplicate ids
/// raise Error(validation).
IngestResult ingest_records(const std::filesystem::path& path, RecordFormat format);
IngestResult parse_records(std::string_view text, RecordFormat format);

void write_jsonl(std::span<const Record> records, const std::filesystem::path& path);
std::string record_to_json_line(const Record& record);

/// True for ASCII punctuation and the typographic quotes/dashes/ellipsis that
/// get stripped from token edges. `cp` is a Unicode code point.
bool is_strip_punctuation(char32_t cp) noexcept;

/// Strips strip-set characters from both ends of `token` (UTF-8 aware).
std::string strip_edge_punctuation(std::string_view token);

/// True when the text has no characters left once whitespace and punctuation are removed.
bool is_blank_or_punctuation(std::string_view text);

TokenSequence clean_and_tokenize(const Record& record, const StopwordList& stopwords);
std::vector<std::string> tokenize_text(std::string_view text, const StopwordList& stopwords);

struct Split {
  std::vector<LabeledRecord> train;
  std::vector<LabeledRecord> test;
};

/// Seeded partition with |train| = round(train_fraction * n). Stratified mode
/// apportions the train quota per class by largest remainder so every class is
/// within one record of its exact share.
Split split_corpus(std::span<const LabeledRecord> corpus, const SplitSpec& spec);

}  // namespace radtext
