#include "radtext/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "radtext/csv.hpp"
#include "radtext/error.hpp"
#include "radtext/rng.hpp"

#ifndef RADTEXT_DATA_DIR
#define RADTEXT_DATA_DIR "data"
#endif

namespace radtext {

const char* to_string(Label label) noexcept {
  switch (label) {
    case Label::R: return "R";
    case Label::NR: return "NR";
    case Label::I: return "I";
  }
  return "?";
}

std::optional<Label> try_parse_label(std::string_view text) noexcept {
  if (text == "R") return Label::R;
  if (text == "NR") return Label::NR;
  if (text == "I") return Label::I;
  return std::nullopt;
}

Label parse_label(std::string_view text) {
  if (auto label = try_parse_label(text)) return *label;
  throw Error(ErrorKind::validation, "invalid label '" + std::string(text) + "' (expected R, NR or I)");
}

const char* to_string(SourceType type) noexcept {
  switch (type) {
    case SourceType::news: return "news";
    case SourceType::article: return "article";
    case SourceType::blog: return "blog";
  }
  return "?";
}

SourceType parse_source_type(std::string_view text) {
  if (text == "news") return SourceType::news;
  if (text == "article") return SourceType::article;
  if (text == "blog") return SourceType::blog;
  throw Error(ErrorKind::validation, "invalid source_type '" + std::string(text) + "'");
}

namespace {

int parse_int_field(std::string_view text, std::string_view what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw Error(ErrorKind::validation, "invalid " + std::string(what) + " in date");
  }
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  Date date;
  if (text.size() == 4) {
    date.year = parse_int_field(text, "year");
  } else if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    date.year = parse_int_field(text.substr(0, 4), "year");
    date.month = parse_int_field(text.substr(5, 2), "month");
    date.day = parse_int_field(text.substr(8, 2), "day");
    if (*date.month < 1 || *date.month > 12 || *date.day < 1 || *date.day > 31) {
      throw Error(ErrorKind::validation, "date out of range: " + std::string(text));
    }
  } else {
    throw Error(ErrorKind::validation, "date must be YYYY or YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  if (date.year < 1990 || date.year > 2100) {
    throw Error(ErrorKind::validation, "year outside [1990, 2100]: " + std::string(text));
  }
  return date;
}

std::string to_string(const Date& date) {
  char buffer[16];
  if (date.month && date.day) {
    std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02d", date.year, *date.month, *date.day);
  } else {
    std::snprintf(buffer, sizeof buffer, "%04d", date.year);
  }
  return buffer;
}

// ---------------------------------------------------------------------------
// Punctuation and tokenization

namespace {

/// Decodes the code point starting at `pos`; sets `len` to its byte length.
/// Invalid bytes decode as themselves with length 1.
char32_t decode_at(std::string_view s, std::size_t pos, std::size_t& len) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t k) {
    return pos + k < s.size() && (static_cast<unsigned char>(s[pos + k]) & 0xC0) == 0x80;
  };
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    len = 2;
    return (char32_t(b0 & 0x1F) << 6) | (static_cast<unsigned char>(s[pos + 1]) & 0x3F);
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    len = 3;
    return (char32_t(b0 & 0x0F) << 12) | (char32_t(static_cast<unsigned char>(s[pos + 1]) & 0x3F) << 6) |
           (static_cast<unsigned char>(s[pos + 2]) & 0x3F);
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    len = 4;
    return (char32_t(b0 & 0x07) << 18) | (char32_t(static_cast<unsigned char>(s[pos + 1]) & 0x3F) << 12) |
           (char32_t(static_cast<unsigned char>(s[pos + 2]) & 0x3F) << 6) |
           (static_cast<unsigned char>(s[pos + 3]) & 0x3F);
  }
  len = 1;
  return b0;
}

/// Start offset of the last code point in a non-empty string.
std::size_t last_code_point_start(std::string_view s) {
  std::size_t pos = s.size() - 1;
  std::size_t steps = 0;
  while (pos > 0 && steps < 3 && (static_cast<unsigned char>(s[pos]) & 0xC0) == 0x80) {
    --pos;
    ++steps;
  }
  return pos;
}

bool is_ascii_space(char ch) {
  return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
}

}  // namespace

bool is_strip_punctuation(char32_t cp) noexcept {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
           (cp >= 0x7B && cp <= 0x7E);
  }
  switch (cp) {
    case 0x00AB: case 0x00BB:                                // guillemets
    case 0x2010: case 0x2011: case 0x2012: case 0x2013:      // hyphens, dashes
    case 0x2014: case 0x2015:
    case 0x2018: case 0x2019: case 0x201A: case 0x201B:      // single quotes
    case 0x201C: case 0x201D: case 0x201E: case 0x201F:      // double quotes
    case 0x2026:                                             // ellipsis
    case 0x2032: case 0x2033:                                // primes
      return true;
    default:
      return false;
  }
}

std::string strip_edge_punctuation(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end) {
    std::size_t len = 0;
    const char32_t cp = decode_at(token.substr(0, end), begin, len);
    if (!is_strip_punctuation(cp)) break;
    begin += len;
  }
  while (begin < end) {
    const auto view = token.substr(begin, end - begin);
    const std::size_t start = last_code_point_start(view);
    std::size_t len = 0;
    const char32_t cp = decode_at(view, start, len);
    if (start + len != view.size() || !is_strip_punctuation(cp)) break;
    end = begin + start;
  }
  return std::string(token.substr(begin, end - begin));
}

bool is_blank_or_punctuation(std::string_view text) {
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t len = 0;
    const char32_t cp = decode_at(text, pos, len);
    if (!(cp < 0x80 && is_ascii_space(static_cast<char>(cp))) && !is_strip_punctuation(cp)) return false;
    pos += len;
  }
  return true;
}

std::vector<std::string> tokenize_text(std::string_view text, const StopwordList& stopwords) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_ascii_space(text[pos])) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !is_ascii_space(text[end])) ++end;
    if (end > pos) {
      std::string raw(text.substr(pos, end - pos));
      for (char& ch : raw) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
      }
      std::string token = strip_edge_punctuation(raw);
      if (!token.empty() && !stopwords.contains(token)) tokens.push_back(std::move(token));
    }
    pos = end;
  }
  return tokens;
}

TokenSequence clean_and_tokenize(const Record& record, const StopwordList& stopwords) {
  return TokenSequence{tokenize_text(record.body, stopwords), record.id};
}

// ---------------------------------------------------------------------------
// Stopwords

StopwordList::StopwordList(std::string name, const std::vector<std::string>& words) : name_(std::move(name)) {
  for (std::string word : words) {
    std::transform(word.begin(), word.end(), word.begin(),
                   [](char ch) { return (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch; });
    if (!word.empty()) words_.insert(std::move(word));
  }
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open stopword file " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    words.push_back(line.substr(first, last - first + 1));
  }
  return StopwordList(path.stem().string(), words);
}

std::filesystem::path default_stopwords_path() {
  return std::filesystem::path(RADTEXT_DATA_DIR) / "stopwords_en.txt";
}

// ---------------------------------------------------------------------------
// Ingestion

RecordFormat parse_record_format(std::string_view text) {
  if (text == "jsonl") return RecordFormat::jsonl;
  if (text == "csv") return RecordFormat::csv;
  throw Error(ErrorKind::validation, "unknown record format '" + std::string(text) + "'");
}

namespace {

const std::vector<std::string> kRecordFields{"id", "source_name", "source_type", "date",
                                             "title", "body", "language"};

Error parse_error(std::size_t line, const std::string& what) {
  return Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what);
}

Record record_from_json(const nlohmann::json& obj, std::size_t line) {
  if (!obj.is_object()) throw parse_error(line, "expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(kRecordFields.begin(), kRecordFields.end(), key) == kRecordFields.end()) {
      throw parse_error(line, "unexpected key '" + key + "'");
    }
    if (!value.is_string()) throw parse_error(line, "field '" + key + "' must be a string");
  }
  auto required = [&](const char* key) -> std::string {
    auto it = obj.find(key);
    if (it == obj.end()) throw parse_error(line, std::string("missing field '") + key + "'");
    return it->get<std::string>();
  };
  Record record;
  try {
    record.id = required("id");
    record.source_name = required("source_name");
    record.source_type = parse_source_type(required("source_type"));
    record.date = parse_date(required("date"));
    record.body = required("body");
    record.title = obj.value("title", std::string{});
    record.language = obj.value("language", std::string{"en"});
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse) throw;
    throw parse_error(line, e.what());
  }
  if (record.id.empty()) throw parse_error(line, "empty id");
  return record;
}

Record record_from_csv(const csv::Row& row, const std::vector<int>& column_of) {
  auto field = [&](std::size_t which, bool required) -> std::string {
    const int col = column_of[which];
    if (col < 0) {
      if (required) throw parse_error(row.line, "missing column '" + kRecordFields[which] + "'");
      return {};
    }
    return row.fields[static_cast<std::size_t>(col)];
  };
  Record record;
  try {
    record.id = field(0, true);
    record.source_name = field(1, true);
    record.source_type = parse_source_type(field(2, true));
    record.date = parse_date(field(3, true));
    record.title = field(4, false);
    record.body = field(5, true);
    std::string language = field(6, false);
    record.language = language.empty() ? "en" : language;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse) throw;
    throw parse_error(row.line, e.what());
  }
  if (record.id.empty()) throw parse_error(row.line, "empty id");
  return record;
}

void keep_or_drop(Record record, IngestResult& out, std::unordered_set<std::string>& seen,
                  std::size_t line) {
  ++out.report.rows;
  if (is_blank_or_punctuation(record.body)) {
    ++out.report.dropped;
    return;
  }
  if (!seen.insert(record.id).second) {
    throw Error(ErrorKind::validation,
                "line " + std::to_string(line) + ": duplicate record id '" + record.id + "'");
  }
  ++out.report.kept;
  out.records.push_back(std::move(record));
}

}  // namespace

IngestResult parse_records(std::string_view text, RecordFormat format) {
  IngestResult out;
  std::unordered_set<std::string> seen;
  if (format == RecordFormat::jsonl) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      ++line_no;
      pos = nl + 1;
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
        if (nl == text.size()) break;
        continue;
      }
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(line_no, std::string("malformed JSON: ") + e.what());
      }
      keep_or_drop(record_from_json(obj, line_no), out, seen, line_no);
      if (nl == text.size()) break;
    }
    return out;
  }

  const auto rows = csv::parse(text);
  if (rows.empty()) throw Error(ErrorKind::parse, "line 1: missing CSV header");
  std::vector<int> column_of(kRecordFields.size(), -1);
  const auto& header = rows.front();
  for (std::size_t col = 0; col < header.fields.size(); ++col) {
    auto it = std::find(kRecordFields.begin(), kRecordFields.end(), header.fields[col]);
    if (it == kRecordFields.end()) {
      throw parse_error(header.line, "unknown column '" + header.fields[col] + "'");
    }
    column_of[static_cast<std::size_t>(it - kRecordFields.begin())] = static_cast<int>(col);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].fields.size() != header.fields.size()) {
      throw parse_error(rows[r].line, "expected " + std::to_string(header.fields.size()) + " fields, got " +
                                          std::to_string(rows[r].fields.size()));
    }
    keep_or_drop(record_from_csv(rows[r], column_of), out, seen, rows[r].line);
  }
  return out;
}

IngestResult ingest_records(const std::filesystem::path& path, RecordFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::io, "read failed: " + path.string());
  return parse_records(buffer.str(), format);
}

std::string record_to_json_line(const Record& record) {
  nlohmann::ordered_json obj;
  obj["id"] = record.id;
  obj["source_name"] = record.source_name;
  obj["source_type"] = to_string(record.source_type);
  obj["date"] = to_string(record.date);
  obj["title"] = record.title;
  obj["body"] = record.body;
  obj["language"] = record.language;
  return obj.dump();
}

void write_jsonl(std::span<const Record> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  for (const auto& record : records) out << record_to_json_line(record) << '\n';
}

// ---------------------------------------------------------------------------
// Splitting

Split split_corpus(std::span<const LabeledRecord> corpus, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorKind::validation, "train_fraction must lie in (0, 1)");
  }
  if (corpus.empty()) throw Error(ErrorKind::validation, "cannot split an empty corpus");
  const std::size_t n = corpus.size();
  const auto train_size = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
  if (train_size == 0 || train_size == n) {
    throw Error(ErrorKind::degenerate_split, "split of " + std::to_string(n) + " records at fraction " +
                                                 std::to_string(spec.train_fraction) +
                                                 " leaves an empty partition");
  }

  Rng rng(spec.seed);
  std::vector<bool> in_train(n, false);
  if (!spec.stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    for (std::size_t i = 0; i < train_size; ++i) in_train[order[i]] = true;
  } else {
    std::array<std::vector<std::size_t>, 3> members;
    for (std::size_t i = 0; i < n; ++i) members[label_index(corpus[i].label)].push_back(i);

    std::array<std::size_t, 3> quota{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      const double exact = spec.train_fraction * static_cast<double>(members[c].size());
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      remainder[c] = exact - static_cast<double>(quota[c]);
      assigned += quota[c];
    }
    std::array<std::size_t, 3> by_remainder{0, 1, 2};
    std::stable_sort(by_remainder.begin(), by_remainder.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < train_size && k < 3; ++k) {
      const std::size_t c = by_remainder[k];
      if (quota[c] < members[c].size()) {
        ++quota[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < 3; ++c) {
      rng.shuffle(members[c]);
      for (std::size_t i = 0; i < quota[c]; ++i) in_train[members[c][i]] = true;
    }
  }

  Split split;
  split.train.reserve(train_size);
  split.test.reserve(n - train_size);
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? split.train : split.test).push_back(corpus[i]);
  return split;
}

}  // namespace radtext
