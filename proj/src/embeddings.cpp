#include "radtext/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "radtext/error.hpp"
#include "radtext/rng.hpp"

namespace radtext {

Vocabulary::Vocabulary() {
  index_to_token_.emplace_back(kOovToken);
  token_to_index_.emplace(std::string(kOovToken), kOovIndex);
  counts_.push_back(0);
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.empty() || tokens.front() != kOovToken) {
    throw Error(ErrorKind::validation, "vocabulary must start with the OOV sentinel");
  }
  Vocabulary vocab;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (!vocab.token_to_index_.emplace(tokens[i], i).second) {
      throw Error(ErrorKind::validation, "duplicate vocabulary token '" + tokens[i] + "'");
    }
  }
  vocab.index_to_token_ = std::move(tokens);
  vocab.counts_.assign(vocab.index_to_token_.size(), 0);
  return vocab;
}

std::size_t Vocabulary::index_of(std::string_view token) const {
  auto it = token_to_index_.find(std::string(token));
  return it == token_to_index_.end() ? kOovIndex : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  auto it = token_to_index_.find(std::string(token));
  return it != token_to_index_.end() && it->second != kOovIndex;
}

std::vector<std::size_t> Vocabulary::encode(const TokenSequence& sequence) const {
  std::vector<std::size_t> ids;
  ids.reserve(sequence.tokens.size());
  for (const auto& token : sequence.tokens) ids.push_back(index_of(token));
  return ids;
}

Vocabulary build_vocab(std::span<const TokenSequence> sequences, std::size_t min_count) {
  std::map<std::string, std::uint64_t> freq;
  for (const auto& seq : sequences) {
    for (const auto& token : seq.tokens) ++freq[token];
  }
  if (freq.empty()) throw Error(ErrorKind::validation, "cannot build a vocabulary from empty sequences");

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  std::uint64_t oov = 0;
  for (auto& [token, count] : freq) {
    if (count >= min_count && token != kOovToken) {
      kept.emplace_back(token, count);
    } else {
      oov += count;
    }
  }
  // std::map iteration is lexicographic, so a stable sort on count alone
  // leaves ties in lexicographic order.
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary vocab;
  vocab.min_count_ = min_count;
  vocab.counts_[kOovIndex] = oov;
  for (auto& [token, count] : kept) {
    vocab.token_to_index_.emplace(token, vocab.index_to_token_.size());
    vocab.index_to_token_.push_back(token);
    vocab.counts_.push_back(count);
  }
  return vocab;
}

Eigen::VectorXd affine_update(const Eigen::VectorXd& w_in, double alpha, double b) {
  if (!std::isfinite(alpha) || !std::isfinite(b) || !w_in.allFinite()) {
    throw Error(ErrorKind::numeric, "affine_update received a non-finite value");
  }
  Eigen::VectorXd out(w_in.size());
  for (Eigen::Index i = 0; i < w_in.size(); ++i) out[i] = w_in[i] * alpha + b;
  return out;
}

void EmbedTrainConfig::validate() const {
  if (dimension < 2) throw Error(ErrorKind::validation, "embedding dimension must be >= 2");
  if (window < 1) throw Error(ErrorKind::validation, "context window must be >= 1");
  if (negatives < 1) throw Error(ErrorKind::validation, "negative samples must be >= 1");
  if (!(learning_rate > 0.0) || !(affine_alpha > 0.0)) {
    throw Error(ErrorKind::validation, "learning rates must be > 0");
  }
  if (!(gradient_tolerance > 0.0)) throw Error(ErrorKind::validation, "gradient tolerance must be > 0");
}

EmbeddingMatrix initial_embeddings(std::size_t vocab_size, std::size_t dimension, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingMatrix emb{RowMatrix(static_cast<Eigen::Index>(vocab_size), static_cast<Eigen::Index>(dimension))};
  const double half_width = 0.5 / static_cast<double>(dimension);
  for (Eigen::Index r = 0; r < emb.vectors.rows(); ++r) {
    for (Eigen::Index c = 0; c < emb.vectors.cols(); ++c) emb.vectors(r, c) = rng.uniform(-half_width, half_width);
  }
  return emb;
}

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}


}  // namespace

EmbeddingMatrix train_embeddings(std::span<const TokenSequence> sequences, const Vocabulary& vocab,
                                 const EmbedTrainConfig& config, EmbedTrainStats* stats) {
  config.validate();
  EmbeddingMatrix input = initial_embeddings(vocab.size(), config.dimension, config.seed);
  EmbedTrainStats local;
  if (config.epochs == 0) {
    if (stats) *stats = local;
    return input;
  }

  std::vector<std::vector<std::size_t>> encoded;
  encoded.reserve(sequences.size());
  std::uint64_t total_tokens = 0;
  bool any_known = false;
  for (const auto& seq : sequences) {
    encoded.push_back(vocab.encode(seq));
    total_tokens += encoded.back().size();
    for (auto id : encoded.back()) any_known = any_known || id != kOovIndex;
  }
  if (!any_known) {
    throw Error(ErrorKind::validation, "every training token is out of vocabulary");
  }

  // Noise distribution: unigram^0.75. A vocabulary reloaded from a file has no
  // counts, so fall back to frequencies over the training sequences.
  std::vector<double> noise_cdf(vocab.size(), 0.0);
  {
    bool has_counts = false;
    for (std::size_t i = 0; i < vocab.size(); ++i) has_counts = has_counts || vocab.count(i) > 0;
    std::vector<std::uint64_t> freq(vocab.size(), 0);
    if (has_counts) {
      for (std::size_t i = 0; i < vocab.size(); ++i) freq[i] = vocab.count(i);
    } else {
      for (const auto& ids : encoded) {
        for (auto id : ids) ++freq[id];
      }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      acc += std::pow(static_cast<double>(freq[i]), 0.75);
      noise_cdf[i] = acc;
    }
  }
  auto draw_noise = [&](Rng& rng) {
    const double target = rng.uniform() * noise_cdf.back();
    auto it = std::upper_bound(noise_cdf.begin(), noise_cdf.end(), target);
    if (it == noise_cdf.end()) --it;
    return static_cast<std::size_t>(it - noise_cdf.begin());
  };

  const auto d = static_cast<Eigen::Index>(config.dimension);
  RowMatrix output = RowMatrix::Zero(static_cast<Eigen::Index>(vocab.size()), d);
  Rng rng(derive_seed(config.seed, "embeddings.negatives"));
  Eigen::VectorXd center_grad(d);

  const double planned = static_cast<double>(total_tokens) * static_cast<double>(config.epochs);
  std::uint64_t processed_tokens = 0;
  bool stop = false;

  for (std::size_t epoch = 0; epoch < config.epochs && !stop; ++epoch) {
    double grad_norm_sum = 0.0;
    std::uint64_t grad_updates = 0;
    for (const auto& ids : encoded) {
      for (std::size_t pos = 0; pos < ids.size() && !stop; ++pos) {
        const double progress = planned > 0 ? static_cast<double>(processed_tokens) / planned : 0.0;
        const double lr = config.learning_rate * std::max(1e-4, 1.0 - progress);
        ++processed_tokens;
        const std::size_t center = ids[pos];
        const std::size_t lo = pos >= config.window ? pos - config.window : 0;
        const std::size_t hi = std::min(ids.size() - 1, pos + config.window);
        for (std::size_t ctx = lo; ctx <= hi; ++ctx) {
          if (ctx == pos) continue;
          center_grad.setZero();
          auto v_center = input.vectors.row(static_cast<Eigen::Index>(center));
          for (std::size_t k = 0; k <= config.negatives; ++k) {
            std::size_t target;
            double label;
            if (k == 0) {
              target = ids[ctx];
              label = 1.0;
            } else {
              target = draw_noise(rng);
              if (target == ids[ctx]) continue;
              label = 0.0;
            }
            auto u_target = output.row(static_cast<Eigen::Index>(target));
            const double g = label - sigmoid(v_center.dot(u_target));
            center_grad.noalias() += g * u_target.transpose();
            u_target.noalias() += (lr * g) * v_center;
          }
          v_center.noalias() += lr * center_grad.transpose();
          grad_norm_sum += center_grad.norm();
          ++grad_updates;
          if (++local.iterations >= config.max_iterations) {
            stop = true;
            local.stop_reason = EmbedStopReason::max_iterations;
            break;
          }
        }
      }
      if (stop) break;
    }
    if (config.mode == EmbedTrainMode::paper_literal) {
      for (Eigen::Index r = 0; r < output.rows(); ++r) {
        output.row(r) = affine_update(output.row(r).transpose(), config.affine_alpha, config.affine_bias).transpose();
      }
    }
    ++local.epochs_run;
    local.last_mean_gradient_norm = grad_updates ? grad_norm_sum / static_cast<double>(grad_updates) : 0.0;
    if (!input.vectors.allFinite()) {
      throw Error(ErrorKind::divergence, "embedding training diverged in epoch " + std::to_string(epoch + 1));
    }
    if (!stop && local.last_mean_gradient_norm < config.gradient_tolerance) {
      local.stop_reason = EmbedStopReason::gradient_tolerance;
      break;
    }
  }
  if (stats) *stats = local;
  return input;
}

DocVector doc_vector(const TokenSequence& sequence, const EmbeddingMatrix& emb, const Vocabulary& vocab) {
  if (sequence.tokens.empty()) {
    throw Error(ErrorKind::validation, "document '" + sequence.source_record_id + "' has no tokens");
  }
  DocVector out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(emb.dimension())), false};
  std::size_t known = 0;
  for (const auto& token : sequence.tokens) {
    const std::size_t idx = vocab.index_of(token);
    if (idx == kOovIndex) continue;
    out.vector += emb.vectors.row(static_cast<Eigen::Index>(idx)).transpose();
    ++known;
  }
  if (known == 0) {
    out.vector = emb.row(kOovIndex);
    out.all_oov = true;
  } else {
    out.vector /= static_cast<double>(known);
  }
  return out;
}

ClassCentroids class_centroids(std::span<const LabeledVector> train) {
  ClassCentroids c;
  for (const auto& item : train) {
    if (item.label == Label::I) continue;
    auto& sum = item.label == Label::R ? c.mean_r : c.mean_nr;
    auto& count = item.label == Label::R ? c.count_r : c.count_nr;
    if (count == 0) {
      sum = item.vector;
    } else {
      if (sum.size() != item.vector.size()) throw Error(ErrorKind::validation, "document vectors differ in dimension");
      sum += item.vector;
    }
    ++count;
  }
  if (c.count_r == 0 || c.count_nr == 0) {
    throw Error(ErrorKind::missing_class, "centroids need at least one R and one NR document");
  }
  c.mean_r /= static_cast<double>(c.count_r);
  c.mean_nr /= static_cast<double>(c.count_nr);
  return c;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double denom = a.norm() * b.norm();
  return denom > 0 ? a.dot(b) / denom : 0.0;
}

void save_embeddings(const EmbeddingMatrix& emb, const Vocabulary& vocab, const std::filesystem::path& path) {
  if (emb.rows() != vocab.size()) throw Error(ErrorKind::validation, "embedding rows != vocabulary size");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << emb.rows() << ' ' << emb.dimension() << '\n';
  char buffer[32];
  for (std::size_t r = 0; r < emb.rows(); ++r) {
    out << vocab.token(r);
    for (std::size_t c = 0; c < emb.dimension(); ++c) {
      std::snprintf(buffer, sizeof buffer, " %.17g", emb.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      out << buffer;
    }
    out << '\n';
  }
}

LoadedEmbeddings load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::size_t rows = 0, dim = 0;
  if (!(in >> rows >> dim) || rows == 0 || dim == 0) {
    throw Error(ErrorKind::parse, path.string() + " line 1: expected 'V d' header");
  }
  std::vector<std::string> tokens;
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < rows; ++r) {
    std::string token;
    if (!(in >> token)) throw Error(ErrorKind::parse, path.string() + " line " + std::to_string(r + 2) + ": missing row");
    for (std::size_t c = 0; c < dim; ++c) {
      std::string value;
      if (!(in >> value)) {
        throw Error(ErrorKind::parse, path.string() + " line " + std::to_string(r + 2) + ": too few values");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = std::strtod(value.c_str(), nullptr);
    }
    tokens.push_back(std::move(token));
  }
  if (!m.allFinite()) throw Error(ErrorKind::numeric, path.string() + ": non-finite embedding value");
  return {Vocabulary::from_tokens(std::move(tokens)), EmbeddingMatrix{std::move(m)}};
}

}  // namespace radtext
