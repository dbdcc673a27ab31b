#include <gtest/gtest.h>

#include <cmath>

#include "radtext/baselines.hpp"
#include "radtext/error.hpp"
#include "radtext/rng.hpp"

using namespace radtext;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorKind::state;
}

TokenSequence seq(std::vector<std::string> tokens) { return {std::move(tokens), "d"}; }

SparseVector dense(std::initializer_list<double> values) {
  SparseVector v;
  std::size_t f = 0;
  for (double x : values) {
    if (x != 0.0) v.entries.emplace_back(f, x);
    ++f;
  }
  return v;
}

SparseVector scaled(const SparseVector& v, double s) {
  SparseVector out = v;
  for (auto& [f, x] : out.entries) x *= s;
  return out;
}

struct Dataset {
  std::vector<SparseVector> x;
  std::vector<Label> y;
};

/// Random sparse points labeled by the sign of a fixed hyperplane, with a margin gap.
Dataset separable(std::size_t n, std::size_t features, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd w(static_cast<Eigen::Index>(features));
  for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = rng.uniform(-1, 1);
  Dataset d;
  while (d.x.size() < n) {
    SparseVector v;
    for (std::size_t f = 0; f < features; ++f)
      if (rng.bernoulli(0.6)) v.entries.emplace_back(f, rng.uniform(-2, 2));
    const double m = v.dot(w);
    if (std::abs(m) < 0.2) continue;
    d.x.push_back(v);
    d.y.push_back(m > 0 ? Label::R : Label::NR);
  }
  return d;
}

}  // namespace

TEST(Tfidf, HandEvaluatedWeights) {
  TfidfVectorizer tfidf;
  const std::vector<TokenSequence> train{seq({"a", "a", "b"}), seq({"b"})};
  tfidf.fit(train);
  const auto& vocab = tfidf.vocabulary();
  const auto fa = vocab.index_of("a") - 1, fb = vocab.index_of("b") - 1;
  const auto v = tfidf.transform(train[0]);
  EXPECT_NEAR(v.get(fa), 2.0 * std::log(2.0), 1e-15);
  EXPECT_EQ(v.get(fb), 0.0);
  EXPECT_EQ(tfidf.idf()[fb], 0.0);
}

TEST(Tfidf, SublinearTermFrequency) {
  TfidfVectorizer tfidf(true);
  const std::vector<TokenSequence> train{seq({"a", "a", "a", "b"}), seq({"b"})};
  tfidf.fit(train);
  const auto fa = tfidf.vocabulary().index_of("a") - 1;
  EXPECT_NEAR(tfidf.transform(train[0]).get(fa), (1.0 + std::log(3.0)) * std::log(2.0), 1e-15);
}

TEST(Tfidf, EmptyAndUnseenInputsGiveZeroVector) {
  TfidfVectorizer tfidf;
  const std::vector<TokenSequence> train{seq({"a"}), seq({"b"})};
  tfidf.fit(train);
  EXPECT_TRUE(tfidf.transform(seq({})).entries.empty());
  EXPECT_TRUE(tfidf.transform(seq({"zzz", "yyy"})).entries.empty());
}

TEST(Tfidf, ErrorsBeforeFitAndOnEmptyTrainingSet) {
  TfidfVectorizer tfidf;
  EXPECT_EQ(kind_of([&] { tfidf.transform(seq({"a"})); }), ErrorKind::state);
  EXPECT_EQ(kind_of([&] { tfidf.fit(std::vector<TokenSequence>{}); }), ErrorKind::validation);
}

TEST(TfidfProperty, MatchesBruteForceCounts) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TokenSequence> docs;
    for (int d = 0; d < 6; ++d) {
      std::vector<std::string> t;
      const auto len = 1 + rng.index(8);
      for (std::uint64_t k = 0; k < len; ++k) t.push_back("w" + std::to_string(rng.index(7)));
      docs.push_back(seq(t));
    }
    TfidfVectorizer tfidf;
    tfidf.fit(docs);
    const auto& probe = docs[rng.index(docs.size())];
    const auto v = tfidf.transform(probe);
    for (std::size_t f = 0; f < tfidf.feature_count(); ++f) {
      const auto& token = tfidf.vocabulary().token(f + 1);
      double tf = 0, df = 0;
      for (const auto& t : probe.tokens) tf += t == token;
      for (const auto& doc : docs) df += std::find(doc.tokens.begin(), doc.tokens.end(), token) != doc.tokens.end();
      ASSERT_NEAR(v.get(f), tf * std::log(static_cast<double>(docs.size()) / df), 1e-12);
    }
  }
}

TEST(MaxEnt, ZeroModelIsUniform) {
  const auto model = MaxEntModel::zeros(4, {Label::R, Label::NR, Label::I});
  const auto p = predict_maxent(model, dense({1, 2, 0, -1}));
  for (Eigen::Index k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(p[k], 1.0 / 3.0);
}

TEST(MaxEnt, OneDimensionalSeparableData) {
  Dataset d;
  for (double x : {-2.0, -1.5, -1.0, -0.5, -0.2}) {
    d.x.push_back(dense({x, 1.0}));
    d.y.push_back(Label::R);
  }
  for (double x : {0.2, 0.5, 1.0, 1.5, 2.0}) {
    d.x.push_back(dense({x, 1.0}));
    d.y.push_back(Label::NR);
  }
  const auto model = train_maxent(d.x, d.y, {Label::R, Label::NR}, MaxEntConfig{});
  for (std::size_t i = 0; i < d.x.size(); ++i) EXPECT_EQ(predict_maxent_label(model, d.x[i]), d.y[i]);
}

TEST(MaxEnt, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  auto model = MaxEntModel::zeros(4, {Label::R, Label::NR, Label::I}, 0.01);
  for (Eigen::Index i = 0; i < model.weight.size(); ++i) model.weight.data()[i] = rng.uniform(-1, 1);
  for (Eigen::Index i = 0; i < model.bias.size(); ++i) model.bias[i] = rng.uniform(-1, 1);
  const std::vector<SparseVector> x{dense({1, 0, -2, 0.5}), dense({0, 3, 1, 0}), dense({-1, 1, 0, 2})};
  const std::vector<Label> y{Label::R, Label::NR, Label::I};
  Eigen::MatrixXd gw;
  Eigen::VectorXd gb;
  maxent_gradient(model, x, y, gw, gb);
  const double eps = 1e-6;
  double worst = 0.0;
  auto check = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + eps;
    const double plus = maxent_objective(model, x, y);
    param = saved - eps;
    const double minus = maxent_objective(model, x, y);
    param = saved;
    const double numeric = (plus - minus) / (2 * eps);
    worst = std::max(worst, std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8}));
  };
  for (Eigen::Index i = 0; i < model.weight.size(); ++i) check(model.weight.data()[i], gw.data()[i]);
  for (Eigen::Index i = 0; i < model.bias.size(); ++i) check(model.bias[i], gb[i]);
  EXPECT_LT(worst, 1e-5);
}

TEST(MaxEnt, MissingClass) {
  const std::vector<SparseVector> x{dense({1}), dense({2})};
  const std::vector<Label> y{Label::R, Label::R};
  EXPECT_EQ(kind_of([&] { train_maxent(x, y, {Label::R, Label::NR}, MaxEntConfig{}); }), ErrorKind::missing_class);
}

TEST(MaxEntProperty, NormalizedAndShiftInvariant) {
  Rng rng(17);
  const auto d = separable(40, 6, 2);
  const auto model = train_maxent(d.x, d.y, {Label::R, Label::NR}, MaxEntConfig{});
  for (int trial = 0; trial < 200; ++trial) {
    MaxEntModel shifted = model;
    Eigen::VectorXd v(6);
    for (Eigen::Index k = 0; k < 6; ++k) v[k] = rng.uniform(-10, 10);
    for (Eigen::Index c = 0; c < shifted.weight.cols(); ++c) shifted.weight.col(c) += v;
    const auto& x = d.x[rng.index(d.x.size())];
    ASSERT_NEAR(predict_maxent(model, x).sum(), 1.0, 1e-9);
    ASSERT_EQ(predict_maxent_label(model, x), predict_maxent_label(shifted, x));
  }
}

TEST(MaxEnt, SeedDeterministic) {
  const auto d = separable(30, 5, 3);
  const auto a = train_maxent(d.x, d.y, {Label::R, Label::NR}, MaxEntConfig{});
  const auto b = train_maxent(d.x, d.y, {Label::R, Label::NR}, MaxEntConfig{});
  EXPECT_TRUE((a.weight.array() == b.weight.array()).all());
}

TEST(Svm, ZeroModelPredictsNonRadical) {
  LinearSvmModel zero{Eigen::VectorXd::Zero(3), 0.0, 1e-3};
  const auto p = predict_svm(zero, dense({1, -2, 3}));
  EXPECT_EQ(p.margin, 0.0);
  EXPECT_EQ(p.label, Label::NR);
}

TEST(Svm, FourPointToy) {
  const std::vector<SparseVector> x{dense({2, 2}), dense({3, 1}), dense({-2, -1}), dense({-1, -3})};
  const std::vector<Label> y{Label::R, Label::R, Label::NR, Label::NR};
  const auto model = train_svm(x, y, 2, SvmConfig{});
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto p = predict_svm(model, x[i]);
    EXPECT_EQ(p.label, y[i]);
    EXPECT_EQ(p.margin > 0, y[i] == Label::R);
  }
}

TEST(SvmProperty, EpochAveragedObjectiveNonIncreasingOnSeparableToy) {
  const std::vector<SparseVector> x{dense({2, 2}), dense({3, 1}), dense({-2, -1}), dense({-1, -3})};
  const std::vector<Label> y{Label::R, Label::R, Label::NR, Label::NR};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SvmConfig config;
    config.seed = seed;
    SvmTrainStats stats;
    train_svm(x, y, 2, config, &stats);
    ASSERT_EQ(stats.epoch_objective.size(), config.epochs);
    std::size_t increases = 0;
    for (std::size_t e = 1; e < stats.epoch_objective.size(); ++e) {
      increases += stats.epoch_objective[e] > stats.epoch_objective[e - 1];
    }
    EXPECT_EQ(increases, 0u) << "seed " << seed;
    EXPECT_LT(stats.epoch_objective.back(), stats.epoch_objective.front()) << "seed " << seed;
  }
}

TEST(Svm, InputScalingWithAdjustedLambdaKeepsLabels) {
  // Doubling the inputs and quadrupling lambda leaves the weight-part of the
  // objective unchanged for w/2.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto d = separable(30, 4, 10 + seed);
    SvmConfig config;
    config.seed = seed;
    const auto base = train_svm(d.x, d.y, 4, config);
    std::vector<SparseVector> x2;
    for (const auto& v : d.x) x2.push_back(scaled(v, 2.0));
    config.lambda *= 4.0;
    const auto doubled = train_svm(x2, d.y, 4, config);
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      ASSERT_EQ(predict_svm(base, d.x[i]).label, predict_svm(doubled, x2[i]).label) << "seed " << seed;
    }
  }
}

TEST(Svm, SingleClassIsMissingClass) {
  const std::vector<SparseVector> x{dense({1}), dense({2})};
  const std::vector<Label> y{Label::NR, Label::NR};
  EXPECT_EQ(kind_of([&] { train_svm(x, y, 1, SvmConfig{}); }), ErrorKind::missing_class);
}

TEST(Forest, SinglePureSplit) {
  std::vector<SparseVector> x;
  std::vector<Label> y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(dense({static_cast<double>(i), 5.0}));
    y.push_back(i < 5 ? Label::R : Label::NR);
  }
  ForestConfig config;
  config.n_trees = 1;
  config.max_depth = 1;
  config.feature_fraction = 1.0;
  const auto model = train_forest(x, y, 2, config);
  ASSERT_EQ(model.trees.size(), 1u);
  EXPECT_LE(model.trees[0].depth(), 1u);
  // A bootstrap sample may miss points near the boundary, so check the points
  // the stump necessarily separates.
  EXPECT_EQ(predict_forest(model, x.front()).label, Label::R);
  EXPECT_EQ(predict_forest(model, x.back()).label, Label::NR);
}

TEST(Forest, IdenticalLabelsPredictThatLabel) {
  const auto d = separable(12, 3, 4);
  const std::vector<Label> all_nr(d.x.size(), Label::NR);
  const auto model = train_forest(d.x, all_nr, 3, ForestConfig{});
  Rng rng(2);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(predict_forest(model, dense({rng.uniform(-5, 5), 1, 2})).label, Label::NR);
}

TEST(ForestProperty, VoteEqualsBruteForceTally) {
  Rng rng(6);
  std::vector<SparseVector> x;
  std::vector<Label> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(dense({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)}));
    y.push_back(static_cast<Label>(rng.index(3)));
  }
  ForestConfig config;
  config.n_trees = 15;
  const auto model = train_forest(x, y, 4, config);
  for (int probe = 0; probe < 200; ++probe) {
    const auto v = probe < 20 ? x[static_cast<std::size_t>(probe)]
                              : dense({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)});
    std::array<std::size_t, 3> tally{};
    for (const auto& tree : model.trees) ++tally[label_index(tree.predict(v))];
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k)
      if (tally[k] > tally[best]) best = k;
    const auto p = predict_forest(model, v);
    ASSERT_EQ(p.votes, tally);
    ASSERT_EQ(p.label, static_cast<Label>(best));
  }
}

TEST(Forest, SeedDeterministicAndValidated) {
  const auto d = separable(20, 5, 7);
  const auto a = train_forest(d.x, d.y, 5, ForestConfig{});
  const auto b = train_forest(d.x, d.y, 5, ForestConfig{});
  for (const auto& v : d.x) ASSERT_EQ(predict_forest(a, v).tree_votes, predict_forest(b, v).tree_votes);
  EXPECT_EQ(kind_of([&] { train_forest(d.x, d.y, 0, ForestConfig{}); }), ErrorKind::validation);
  const std::vector<SparseVector> one{d.x[0]};
  const std::vector<Label> one_label{d.y[0]};
  EXPECT_EQ(kind_of([&] { train_forest(one, one_label, 5, ForestConfig{}); }), ErrorKind::validation);
}
