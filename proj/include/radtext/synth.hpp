#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "radtext/annotation.hpp"
#include "radtext/corpus.hpp"

namespace radtext {

struct SynthSource {
  std::string name;
  SourceType type = SourceType::blog;
};

struct SynthConfig {
  std::size_t n_records = 500;
  std::size_t mean_length = 60;  // tokens, before stopword filler
  std::size_t shared_pool = 300;
  std::size_t r_marker_pool = 20;
  std::size_t nr_marker_pool = 20;
  double r_injection_rate = 0.15;
  double nr_injection_rate = 0.15;
  std::array<double, 3> proportions{0.4, 0.4, 0.2};  // (R, NR, I)
  std::uint64_t seed = 1;
  int first_year = 2006;
  int last_year = 2018;
  std::vector<SynthSource> sources = default_sources();
  /// Chance that the second synthetic annotator departs from the gold label.
  double disagreement_rate = 0.1;
  /// Chance of a filler stopword between content tokens; exercises cleaning.
  double stopword_rate = 0.2;
  /// Explicit pools; empty means generated nonsense words of the configured sizes.
  std::vector<std::string> shared_words;
  std::vector<std::string> r_markers;
  std::vector<std::string> nr_markers;

  static std::vector<SynthSource> default_sources();
  /// Throws Error(validation) for bad proportions, rates, lengths or overlapping pools.
  void validate() const;
};

struct SynthCorpus {
  std::vector<LabeledRecord> records;  // gold labels, annotator "gold"
  std::vector<LabelEvent> annotator_a;
  std::vector<LabelEvent> annotator_b;
  std::vector<std::string> shared_words;
  std::vector<std::string> r_markers;
  std::vector<std::string> nr_markers;
};

/// Pronounceable nonsense word for a non-negative index; distinct indices give distinct words.
std::string nonsense_word(std::size_t index);

/// Floor plus largest-remainder apportionment of n over the proportions.
std::array<std::size_t, 3> class_quota(std::size_t n, const std::array<double, 3>& proportions);

SynthCorpus generate_corpus(const SynthConfig& config);

inline constexpr const char* kSynthAnnotatorA = "annotator_a";
inline constexpr const char* kSynthAnnotatorB = "annotator_b";

/// Writes corpus.jsonl, gold.csv, labels_a.csv and labels_b.csv into `out_dir`.
void write_synth_corpus(const SynthCorpus& corpus, const std::filesystem::path& out_dir);

}  // namespace radtext
