#include <gtest/gtest.h>

#include <cmath>

#include "radtext/embeddings.hpp"
#include "radtext/error.hpp"
#include "radtext/rng.hpp"
#include "test_support.hpp"

using namespace radtext;
using radtext::fixture::TempDir;

namespace {

TokenSequence seq(std::vector<std::string> tokens, std::string id = "d") { return {std::move(tokens), std::move(id)}; }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorKind::state;
}

/// x and y always appear together among context group A; z never meets
/// either and only appears among group B.
std::vector<TokenSequence> planted_corpus(std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<std::string> group_a{"a0", "a1", "a2", "a3", "a4"};
  const std::vector<std::string> group_b{"b0", "b1", "b2", "b3", "b4"};
  std::vector<TokenSequence> out;
  for (int doc = 0; doc < 200; ++doc) {
    const bool pair = doc % 2 == 0;
    const auto& context = pair ? group_a : group_b;
    std::vector<std::string> tokens;
    for (int t = 0; t < 6; ++t) tokens.push_back(context[rng.index(context.size())]);
    const auto at = tokens.begin() + static_cast<long>(rng.index(7));
    if (pair) {
      tokens.insert(at, {"x", "y"});
    } else {
      tokens.insert(at, "z");
    }
    out.push_back(seq(tokens));
  }
  return out;
}

}  // namespace

TEST(Vocab, FrequencyOrder) {
  const std::vector<TokenSequence> s{seq({"a", "a", "b"})};
  const auto v = build_vocab(s, 1);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v.token(kOovIndex), kOovToken);
  EXPECT_EQ(v.token(1), "a");
  EXPECT_EQ(v.token(2), "b");
  EXPECT_EQ(v.count(1), 2u);
}

TEST(Vocab, MinCountMapsRareTokensToSentinel) {
  const std::vector<TokenSequence> s{seq({"a", "a", "b"})};
  const auto v = build_vocab(s, 2);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.index_of("b"), kOovIndex);
  EXPECT_FALSE(v.contains("b"));
  EXPECT_EQ(v.count(kOovIndex), 1u);
}

TEST(Vocab, LexicographicTieBreak) {
  const std::vector<TokenSequence> s{seq({"b", "a", "b", "a"})};
  const auto v = build_vocab(s, 1);
  EXPECT_EQ(v.index_of("a"), 1u);
  EXPECT_EQ(v.index_of("b"), 2u);
}

TEST(Vocab, EmptyInputIsValidationError) {
  EXPECT_EQ(kind_of([] { build_vocab(std::vector<TokenSequence>{}, 1); }), ErrorKind::validation);
  EXPECT_EQ(kind_of([] { build_vocab(std::vector<TokenSequence>{seq({})}, 1); }), ErrorKind::validation);
}

TEST(VocabProperty, BijectiveAndThresholded) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TokenSequence> s;
    for (int d = 0; d < 5; ++d) {
      std::vector<std::string> tokens;
      for (int t = 0; t < 12; ++t) tokens.push_back("w" + std::to_string(rng.index(15)));
      s.push_back(seq(tokens));
    }
    const std::size_t min_count = 1 + rng.index(4);
    const auto v = build_vocab(s, min_count);
    for (std::size_t i = 1; i < v.size(); ++i) {
      ASSERT_EQ(v.index_of(v.token(i)), i);
      ASSERT_GE(v.count(i), min_count);
      if (i > 1) {
        ASSERT_TRUE(v.count(i - 1) > v.count(i) || (v.count(i - 1) == v.count(i) && v.token(i - 1) < v.token(i)));
      }
    }
  }
}

TEST(Affine, DirectEvaluation) {
  Eigen::VectorXd w(1);
  w << 0.5;
  EXPECT_DOUBLE_EQ(affine_update(w, 1.0, 0.1)[0], 0.6);
  Eigen::VectorXd w2(2);
  w2 << 1.0, -2.0;
  const Eigen::VectorXd out = affine_update(w2, 0.5, 1.0);
  EXPECT_EQ(out[0], 1.5);
  EXPECT_EQ(out[1], 0.0);
}

TEST(AffineProperty, IdentityIsExact) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd w(7);
    for (int i = 0; i < 7; ++i) w[i] = rng.uniform(-1e6, 1e6) * std::pow(10.0, static_cast<double>(rng.index(20)) - 10);
    ASSERT_TRUE((affine_update(w, 1.0, 0.0).array() == w.array()).all());
  }
}

TEST(Affine, NonFiniteInputIsNumericError) {
  Eigen::VectorXd w(2);
  w << 1.0, std::nan("");
  EXPECT_EQ(kind_of([&] { affine_update(w, 1.0, 0.0); }), ErrorKind::numeric);
  EXPECT_EQ(kind_of([] { affine_update(Eigen::VectorXd::Ones(2), INFINITY, 0.0); }), ErrorKind::numeric);
}

TEST(Embeddings, InitializationRange) {
  const auto m = initial_embeddings(40, 8, 3);
  EXPECT_EQ(m.rows(), 40u);
  EXPECT_LE(m.vectors.cwiseAbs().maxCoeff(), 0.5 / 8.0);
}

TEST(Embeddings, ZeroEpochsReturnsInitialization) {
  const auto corpus = planted_corpus(1);
  const auto vocab = build_vocab(corpus, 1);
  EmbedTrainConfig config;
  config.dimension = 8;
  config.epochs = 0;
  config.seed = 5;
  const auto trained = train_embeddings(corpus, vocab, config);
  const auto init = initial_embeddings(vocab.size(), 8, 5);
  EXPECT_TRUE((trained.vectors.array() == init.vectors.array()).all());
}

TEST(Embeddings, SameSeedBitIdenticalAndFinite) {
  const auto corpus = planted_corpus(2);
  const auto vocab = build_vocab(corpus, 1);
  EmbedTrainConfig config;
  config.dimension = 10;
  config.epochs = 3;
  const auto a = train_embeddings(corpus, vocab, config);
  const auto b = train_embeddings(corpus, vocab, config);
  EXPECT_TRUE((a.vectors.array() == b.vectors.array()).all());
  EXPECT_TRUE(a.vectors.allFinite());
  config.seed = 2;
  const auto c = train_embeddings(corpus, vocab, config);
  EXPECT_FALSE((a.vectors.array() == c.vectors.array()).all());
}

TEST(EmbeddingsProperty, PlantedCoOccurrenceAcrossSeeds) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto corpus = planted_corpus(seed);
    const auto vocab = build_vocab(corpus, 1);
    EmbedTrainConfig config;
    config.dimension = 16;
    config.window = 2;
    config.epochs = 10;
    config.seed = seed;
    const auto emb = train_embeddings(corpus, vocab, config);
    const auto x = emb.row(vocab.index_of("x")), y = emb.row(vocab.index_of("y")), z = emb.row(vocab.index_of("z"));
    EXPECT_GT(cosine_similarity(x, y), cosine_similarity(x, z)) << "seed " << seed;
  }
}

TEST(Embeddings, PaperLiteralModeRunsAndIdentityAffineMatchesSkipGram) {
  const auto corpus = planted_corpus(3);
  const auto vocab = build_vocab(corpus, 1);
  EmbedTrainConfig config;
  config.dimension = 8;
  config.epochs = 2;
  const auto skip = train_embeddings(corpus, vocab, config);
  config.mode = EmbedTrainMode::paper_literal;
  const auto literal = train_embeddings(corpus, vocab, config);
  // With alpha = 1 and b = 0 the output-weight update is the identity.
  EXPECT_TRUE((skip.vectors.array() == literal.vectors.array()).all());
  config.affine_alpha = 0.9;
  config.affine_bias = 0.01;
  const auto shifted = train_embeddings(corpus, vocab, config);
  EXPECT_TRUE(shifted.vectors.allFinite());
  EXPECT_FALSE((skip.vectors.array() == shifted.vectors.array()).all());
}

TEST(Embeddings, StoppingCriteria) {
  const auto corpus = planted_corpus(4);
  const auto vocab = build_vocab(corpus, 1);
  EmbedTrainConfig config;
  config.dimension = 8;
  config.epochs = 50;
  config.max_iterations = 1000;
  EmbedTrainStats stats;
  train_embeddings(corpus, vocab, config, &stats);
  EXPECT_EQ(stats.stop_reason, EmbedStopReason::max_iterations);
  EXPECT_EQ(stats.iterations, 1000u);

  config.max_iterations = 50'000'000;
  config.gradient_tolerance = 1e9;
  train_embeddings(corpus, vocab, config, &stats);
  EXPECT_EQ(stats.stop_reason, EmbedStopReason::gradient_tolerance);
  EXPECT_EQ(stats.epochs_run, 1u);
}

TEST(Embeddings, AllOovInputIsValidationError) {
  const std::vector<TokenSequence> train{seq({"a", "b"})};
  const auto vocab = build_vocab(train, 1);
  const std::vector<TokenSequence> other{seq({"q", "r"})};
  EmbedTrainConfig config;
  config.dimension = 4;
  EXPECT_EQ(kind_of([&] { train_embeddings(other, vocab, config); }), ErrorKind::validation);
}

TEST(Embeddings, InvalidConfig) {
  EmbedTrainConfig config;
  config.dimension = 1;
  EXPECT_THROW(config.validate(), Error);
  config = {};
  config.negatives = 0;
  EXPECT_THROW(config.validate(), Error);
  config = {};
  config.gradient_tolerance = 0;
  EXPECT_THROW(config.validate(), Error);
}

TEST(DocVector, MeansAndOovHandling) {
  const std::vector<TokenSequence> s{seq({"a", "b"})};
  const auto vocab = build_vocab(s, 1);
  EmbeddingMatrix emb;
  emb.vectors = RowMatrix::Zero(3, 2);
  emb.vectors.row(0) << 9, 9;
  emb.vectors.row(static_cast<Eigen::Index>(vocab.index_of("a"))) << 1, 0;
  emb.vectors.row(static_cast<Eigen::Index>(vocab.index_of("b"))) << 0, 1;

  EXPECT_EQ(doc_vector(seq({"a"}), emb, vocab).vector, emb.row(vocab.index_of("a")));
  const auto both = doc_vector(seq({"a", "b"}), emb, vocab);
  EXPECT_DOUBLE_EQ(both.vector[0], 0.5);
  EXPECT_DOUBLE_EQ(both.vector[1], 0.5);
  const auto mixed = doc_vector(seq({"a", "zzz", "a", "b"}), emb, vocab);
  EXPECT_NEAR(mixed.vector[0], 2.0 / 3.0, 1e-15);
  EXPECT_FALSE(mixed.all_oov);
  const auto oov = doc_vector(seq({"q"}), emb, vocab);
  EXPECT_TRUE(oov.all_oov);
  EXPECT_EQ(oov.vector, emb.row(kOovIndex));
  EXPECT_EQ(kind_of([&] { doc_vector(seq({}), emb, vocab); }), ErrorKind::validation);
}

TEST(DocVectorProperty, NormBoundedByLargestToken) {
  Rng rng(12);
  std::vector<std::string> tokens;
  for (int i = 0; i < 20; ++i) tokens.push_back("t" + std::to_string(i));
  const std::vector<TokenSequence> s{seq(tokens)};
  const auto vocab = build_vocab(s, 1);
  const auto emb = initial_embeddings(vocab.size(), 6, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> doc;
    double max_norm = 0.0;
    const auto n = 1 + rng.index(10);
    for (std::uint64_t i = 0; i < n; ++i) {
      doc.push_back(tokens[rng.index(tokens.size())]);
      max_norm = std::max(max_norm, emb.row(vocab.index_of(doc.back())).norm());
    }
    const auto v = doc_vector(seq(doc), emb, vocab);
    ASSERT_LE(v.vector.norm(), max_norm + 1e-15);
  }
}

TEST(Centroids, MeansAndMissingClass) {
  Eigen::VectorXd z(2), t(2), one(2);
  z << 0, 0;
  t << 2, 2;
  one << 5, -1;
  const std::vector<LabeledVector> train{{Label::R, z}, {Label::R, t}, {Label::NR, one}, {Label::I, t}};
  const auto c = class_centroids(train);
  EXPECT_EQ(c.mean_r, Eigen::Vector2d(1, 1));
  EXPECT_EQ(c.mean_nr, one);
  EXPECT_EQ(c.count_r, 2u);
  EXPECT_EQ(c.count_nr, 1u);
  const std::vector<LabeledVector> only_r{{Label::R, z}};
  EXPECT_EQ(kind_of([&] { class_centroids(only_r); }), ErrorKind::missing_class);
}

TEST(Centroids, MatchBruteForceSummation) {
  Rng rng(7);
  std::vector<LabeledVector> train;
  Eigen::VectorXd sum_r = Eigen::VectorXd::Zero(3), sum_nr = Eigen::VectorXd::Zero(3);
  int nr = 0, nnr = 0;
  for (int i = 0; i < 7; ++i) {
    Eigen::VectorXd v(3);
    for (int k = 0; k < 3; ++k) v[k] = rng.uniform(-1, 1);
    const Label l = i < 2 ? (i == 0 ? Label::R : Label::NR) : (rng.bernoulli(0.5) ? Label::R : Label::NR);
    train.push_back({l, v});
    if (l == Label::R) {
      sum_r += v;
      ++nr;
    } else {
      sum_nr += v;
      ++nnr;
    }
  }
  const auto c = class_centroids(train);
  EXPECT_LT((c.mean_r - sum_r / nr).norm(), 1e-15);
  EXPECT_LT((c.mean_nr - sum_nr / nnr).norm(), 1e-15);
}

TEST(Embeddings, SaveLoadRoundTripIsExact) {
  TempDir dir("radtext-emb");
  const auto corpus = planted_corpus(5);
  const auto vocab = build_vocab(corpus, 1);
  EmbedTrainConfig config;
  config.dimension = 5;
  config.epochs = 1;
  const auto emb = train_embeddings(corpus, vocab, config);
  save_embeddings(emb, vocab, dir / "e.txt");
  const auto header = fixture::read_text(dir / "e.txt").substr(0, 5);
  EXPECT_EQ(header, std::to_string(vocab.size()) + " 5\n");
  const auto loaded = load_embeddings(dir / "e.txt");
  EXPECT_EQ(loaded.vocab.tokens(), vocab.tokens());
  EXPECT_TRUE((loaded.matrix.vectors.array() == emb.vectors.array()).all());
}
