#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "radtext/corpus.hpp"

namespace radtext {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::string_view kOovToken = "<unk>";
inline constexpr std::size_t kOovIndex = 0;

/// Token index with an out-of-vocabulary sentinel at index 0. Kept tokens are
/// ordered by descending frequency, ties broken lexicographically.
class Vocabulary {
 public:
  Vocabulary();

  /// Rebuilds a vocabulary from an ordered token list whose first entry is the sentinel.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::size_t size() const { return index_to_token_.size(); }
  std::size_t index_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(std::size_t index) const { return index_to_token_.at(index); }
  const std::vector<std::string>& tokens() const { return index_to_token_; }
  /// Corpus frequency; the sentinel counts every occurrence mapped to it.
  std::uint64_t count(std::size_t index) const { return counts_.at(index); }
  std::size_t min_count() const { return min_count_; }

  std::vector<std::size_t> encode(const TokenSequence& sequence) const;

 private:
  friend Vocabulary build_vocab(std::span<const TokenSequence>, std::size_t);

  std::unordered_map<std::string, std::size_t> token_to_index_;
  std::vector<std::string> index_to_token_;
  std::vector<std::uint64_t> counts_;
  std::size_t min_count_ = 1;
};

/// Throws Error(validation) when every sequence is empty.
Vocabulary build_vocab(std::span<const TokenSequence> sequences, std::size_t min_count);

struct EmbeddingMatrix {
  RowMatrix vectors;  // V x d

  std::size_t rows() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(vectors.cols()); }
  Eigen::VectorXd row(std::size_t index) const { return vectors.row(static_cast<Eigen::Index>(index)).transpose(); }
};

/// w_out = w_in * alpha + b elementwise. Throws Error(numeric) on non-finite input.
Eigen::VectorXd affine_update(const Eigen::VectorXd& w_in, double alpha, double b);

enum class EmbedTrainMode {
  skip_gram,
  /// Skip-gram whose output-layer weights pass through affine_update(alpha, bias)
  /// at the end of every epoch.
  paper_literal,
};

struct EmbedTrainConfig {
  std::size_t dimension = 50;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;  // linearly decayed
  EmbedTrainMode mode = EmbedTrainMode::skip_gram;
  double affine_alpha = 1.0;
  double affine_bias = 0.0;
  std::uint64_t seed = 1;
  std::uint64_t max_iterations = 50'000'000;  // (center, context) updates
  double gradient_tolerance = 1e-4;

  void validate() const;
};

enum class EmbedStopReason { epochs_completed, max_iterations, gradient_tolerance };

struct EmbedTrainStats {
  std::size_t epochs_run = 0;
  std::uint64_t iterations = 0;
  double last_mean_gradient_norm = 0.0;
  EmbedStopReason stop_reason = EmbedStopReason::epochs_completed;
};

/// Seeded uniform initialisation in [-0.5/d, 0.5/d].
EmbeddingMatrix initial_embeddings(std::size_t vocab_size, std::size_t dimension, std::uint64_t seed);

/// Skip-gram with negative sampling (noise distribution: unigram^0.75).
/// Single-threaded and bit-deterministic for a given seed.
EmbeddingMatrix train_embeddings(std::span<const TokenSequence> sequences, const Vocabulary& vocab,
                                 const EmbedTrainConfig& config, EmbedTrainStats* stats = nullptr);

struct DocVector {
  Eigen::VectorXd vector;
  bool all_oov = false;
};

/// Unweighted mean of in-vocabulary token vectors; OOV tokens are skipped. A
/// sequence made only of OOV tokens yields the sentinel's vector with all_oov set.
DocVector doc_vector(const TokenSequence& sequence, const EmbeddingMatrix& emb, const Vocabulary& vocab);

struct ClassCentroids {
  Eigen::VectorXd mean_r;
  Eigen::VectorXd mean_nr;
  std::size_t count_r = 0;
  std::size_t count_nr = 0;
};

struct LabeledVector {
  Label label = Label::NR;
  Eigen::VectorXd vector;
};

/// Means of R and NR document vectors; I-labeled entries are ignored.
ClassCentroids class_centroids(std::span<const LabeledVector> train);

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Text format: "V d" header then one "token v1 ... vd" line per row, 17 significant digits.
void save_embeddings(const EmbeddingMatrix& emb, const Vocabulary& vocab, const std::filesystem::path& path);

struct LoadedEmbeddings {
  Vocabulary vocab;
  EmbeddingMatrix matrix;
};

LoadedEmbeddings load_embeddings(const std::filesystem::path& path);

}  // namespace radtext
