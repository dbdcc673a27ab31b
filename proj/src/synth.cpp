#include "radtext/synth.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "radtext/error.hpp"
#include "radtext/rng.hpp"

namespace radtext {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::array<const char*, 12> kFiller{"the", "and", "of", "to", "in", "is",
                                             "was", "for", "on", "with", "that", "by"};
constexpr const char* kSynthTimestamp = "2019-01-01T00:00:00Z";

std::vector<std::string> generated_pool(std::size_t offset, std::size_t size) {
  std::vector<std::string> pool;
  pool.reserve(size);
  for (std::size_t i = 0; i < size; ++i) pool.push_back(nonsense_word(offset + i));
  return pool;
}

}  // namespace

std::string nonsense_word(std::size_t index) {
  const std::size_t base = kConsonants.size() * kVowels.size();
  std::size_t n = index + base * base;  // at least three syllables
  std::string word;
  while (n > 0) {
    const std::size_t syllable = n % base;
    word.insert(word.begin(), kVowels[syllable % kVowels.size()]);
    word.insert(word.begin(), kConsonants[syllable / kVowels.size()]);
    n /= base;
  }
  return word;
}

std::vector<SynthSource> SynthConfig::default_sources() {
  return {{"Valley Herald", SourceType::news},
          {"Northern Dispatch", SourceType::news},
          {"Ridge Commentary", SourceType::article},
          {"Lakeside Voices", SourceType::blog},
          {"Summit Notes", SourceType::blog},
          {"Riverbank Diary", SourceType::blog}};
}

void SynthConfig::validate() const {
  if (n_records == 0) throw Error(ErrorKind::validation, "synthetic corpus needs n_records >= 1");
  double sum = 0.0;
  for (double p : proportions) {
    if (!(p >= 0.0)) throw Error(ErrorKind::validation, "class proportions must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorKind::validation, "class proportions must sum to 1");
  for (double rate : {r_injection_rate, nr_injection_rate}) {
    if (!(rate > 0.0 && rate <= 1.0)) throw Error(ErrorKind::validation, "marker injection rate must lie in (0, 1]");
  }
  if (!(disagreement_rate >= 0.0 && disagreement_rate <= 1.0) || !(stopword_rate >= 0.0 && stopword_rate < 1.0)) {
    throw Error(ErrorKind::validation, "rates must lie in [0, 1]");
  }
  if (mean_length < 20) throw Error(ErrorKind::validation, "mean document length must be >= 20");
  if (first_year < 1990 || last_year > 2100 || first_year > last_year) {
    throw Error(ErrorKind::validation, "year range must lie within [1990, 2100]");
  }
  if (sources.empty()) throw Error(ErrorKind::validation, "source pool is empty");
  const std::size_t shared = shared_words.empty() ? shared_pool : shared_words.size();
  const std::size_t r = r_markers.empty() ? r_marker_pool : r_markers.size();
  const std::size_t nr = nr_markers.empty() ? nr_marker_pool : nr_markers.size();
  if (shared == 0 || r == 0 || nr == 0) throw Error(ErrorKind::validation, "word pools must be non-empty");
  std::unordered_set<std::string> seen;
  for (const auto* pool : {&shared_words, &r_markers, &nr_markers}) {
    for (const auto& w : *pool) {
      if (!seen.insert(w).second) throw Error(ErrorKind::validation, "word pools overlap on '" + w + "'");
    }
  }
}

std::array<std::size_t, 3> class_quota(std::size_t n, const std::array<double, 3>& proportions) {
  std::array<std::size_t, 3> quota{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    const double exact = proportions[c] * static_cast<double>(n);
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
    ++quota[order[k]];
    ++assigned;
  }
  return quota;
}

SynthCorpus generate_corpus(const SynthConfig& config) {
  config.validate();
  SynthCorpus out;
  out.shared_words = config.shared_words.empty() ? generated_pool(0, config.shared_pool) : config.shared_words;
  out.r_markers = config.r_markers.empty() ? generated_pool(config.shared_pool, config.r_marker_pool) : config.r_markers;
  out.nr_markers = config.nr_markers.empty()
                       ? generated_pool(config.shared_pool + config.r_marker_pool, config.nr_marker_pool)
                       : config.nr_markers;

  Rng rng(config.seed);
  const auto quota = class_quota(config.n_records, config.proportions);
  std::vector<Label> labels;
  for (std::size_t c = 0; c < 3; ++c) labels.insert(labels.end(), quota[c], kLabelOrder[c]);
  rng.shuffle(labels);

  const double stop_p = 1.0 / static_cast<double>(config.mean_length);
  const std::size_t max_length = 2 * config.mean_length;
  auto pick = [&](const std::vector<std::string>& pool) -> const std::string& {
    return pool[static_cast<std::size_t>(rng.index(pool.size()))];
  };

  out.records.reserve(config.n_records);
  for (std::size_t i = 0; i < config.n_records; ++i) {
    const Label label = labels[i];
    Record record;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%06zu", i + 1);
    record.id = id;
    const auto& source = config.sources[static_cast<std::size_t>(rng.index(config.sources.size()))];
    record.source_name = source.name;
    record.source_type = source.type;
    record.date.year = config.first_year +
                       static_cast<int>(rng.index(static_cast<std::uint64_t>(config.last_year - config.first_year + 1)));
    record.date.month = 1 + static_cast<int>(rng.index(12));
    record.date.day = 1 + static_cast<int>(rng.index(28));
    record.title = rng.bernoulli(0.2) ? std::string{} : "Post " + std::to_string(i + 1);

    // Geometric length with the configured mean, clipped to [20, 2 * mean].
    const double u = 1.0 - rng.uniform();
    auto length = static_cast<std::size_t>(1.0 + std::floor(std::log(u) / std::log(1.0 - stop_p)));
    length = std::clamp<std::size_t>(length, 20, max_length);

    std::string body;
    for (std::size_t t = 0; t < length; ++t) {
      if (rng.bernoulli(config.stopword_rate)) {
        body += kFiller[static_cast<std::size_t>(rng.index(kFiller.size()))];
        body += ' ';
      }
      std::string token;
      if (label == Label::R && rng.bernoulli(config.r_injection_rate)) {
        token = pick(out.r_markers);
      } else if (label == Label::NR && rng.bernoulli(config.nr_injection_rate)) {
        token = pick(out.nr_markers);
      } else {
        token = pick(out.shared_words);
      }
      if (t % 12 == 0 && !token.empty() && token[0] >= 'a' && token[0] <= 'z') {
        token[0] = static_cast<char>(token[0] - 'a' + 'A');
      }
      body += token;
      if (t % 12 == 11 || t + 1 == length) {
        body += '.';
      } else if (rng.bernoulli(0.05)) {
        body += ',';
      }
      if (t + 1 < length) body += ' ';
    }
    record.body = std::move(body);
    out.records.push_back({std::move(record), label, kGoldAnnotator});
  }

  Rng annotator_rng(derive_seed(config.seed, "synth.annotators"));
  for (const auto& item : out.records) {
    out.annotator_a.push_back({item.record.id, kSynthAnnotatorA, item.label, kSynthTimestamp});
    Label b = item.label;
    if (annotator_rng.bernoulli(config.disagreement_rate)) {
      const std::size_t shift = 1 + static_cast<std::size_t>(annotator_rng.index(2));
      b = kLabelOrder[(label_index(item.label) + shift) % 3];
    }
    out.annotator_b.push_back({item.record.id, kSynthAnnotatorB, b, kSynthTimestamp});
  }
  return out;
}

void write_synth_corpus(const SynthCorpus& corpus, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<Record> records;
  std::vector<LabelEvent> gold;
  records.reserve(corpus.records.size());
  for (const auto& item : corpus.records) {
    records.push_back(item.record);
    gold.push_back({item.record.id, kGoldAnnotator, item.label, kSynthTimestamp});
  }
  write_jsonl(records, out_dir / "corpus.jsonl");
  write_label_log(gold, out_dir / "gold.csv");
  write_label_log(corpus.annotator_a, out_dir / "labels_a.csv");
  write_label_log(corpus.annotator_b, out_dir / "labels_b.csv");
}

}  // namespace radtext
