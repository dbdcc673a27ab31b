#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "radtext/corpus.hpp"
#include "radtext/embeddings.hpp"

namespace radtext {

/// Sorted (feature index, value) pairs.
struct SparseVector {
  std::vector<std::pair<std::size_t, double>> entries;

  double dot(const Eigen::VectorXd& dense) const;
  double get(std::size_t feature) const;
};

class TfidfVectorizer {
 public:
  explicit TfidfVectorizer(bool sublinear_tf = false) : sublinear_tf_(sublinear_tf) {}

  /// idf = ln(N / df) over the training documents; throws Error(validation) on an empty set.
  void fit(std::span<const TokenSequence> train);
  /// Throws Error(state) before fit. Tokens unseen at fit time are ignored.
  SparseVector transform(const TokenSequence& sequence) const;

  bool fitted() const { return fitted_; }
  bool sublinear_tf() const { return sublinear_tf_; }
  std::size_t feature_count() const { return idf_.size(); }
  /// Feature f corresponds to vocabulary index f + 1 (index 0 is the OOV sentinel).
  const Vocabulary& vocabulary() const { return vocab_; }
  const std::vector<double>& idf() const { return idf_; }

 private:
  bool sublinear_tf_ = false;
  bool fitted_ = false;
  Vocabulary vocab_;
  std::vector<double> idf_;
};

// ---------------------------------------------------------------------------

struct MaxEntConfig {
  std::size_t epochs = 100;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
};

struct MaxEntModel {
  std::vector<Label> classes;
  Eigen::MatrixXd weight;  // F x c
  Eigen::VectorXd bias;    // c
  double l2 = 0.0;

  static MaxEntModel zeros(std::size_t features, std::vector<Label> classes, double l2 = 0.0);
};

/// Softmax regression by SGD on cross-entropy + (l2/2)||W||^2. Every class in
/// `classes` needs a sample, else Error(missing_class).
MaxEntModel train_maxent(std::span<const SparseVector> x, std::span<const Label> y, std::vector<Label> classes,
                         const MaxEntConfig& config);
Eigen::VectorXd predict_maxent(const MaxEntModel& model, const SparseVector& x);
/// Argmax, ties to the earlier class in model.classes.
Label predict_maxent_label(const MaxEntModel& model, const SparseVector& x);

/// Mean cross-entropy plus (l2/2)||W||^2, and its exact gradient.
double maxent_objective(const MaxEntModel& model, std::span<const SparseVector> x, std::span<const Label> y);
void maxent_gradient(const MaxEntModel& model, std::span<const SparseVector> x, std::span<const Label> y,
                     Eigen::MatrixXd& grad_weight, Eigen::VectorXd& grad_bias);

// ---------------------------------------------------------------------------

struct SvmConfig {
  double lambda = 1e-3;
  std::size_t epochs = 100;
  std::uint64_t seed = 1;
};

struct LinearSvmModel {
  Eigen::VectorXd weight;
  double bias = 0.0;
  double lambda = 0.0;
};

struct SvmPrediction {
  Label label = Label::NR;
  double margin = 0.0;
};

struct SvmTrainStats {
  /// Objective averaged over the iterates visited in each epoch.
  std::vector<double> epoch_objective;
};

/// Pegasos: step 1/(lambda t), hinge loss, R = +1 and NR = -1. The bias is an
/// extra constant feature and is regularised with the weights.
LinearSvmModel train_svm(std::span<const SparseVector> x, std::span<const Label> y, std::size_t features,
                         const SvmConfig& config, SvmTrainStats* stats = nullptr);
/// margin = w.x + b; margin 0 goes to NR.
SvmPrediction predict_svm(const LinearSvmModel& model, const SparseVector& x);
/// hinge mean + (lambda/2)(||w||^2 + b^2)
double svm_objective(const LinearSvmModel& model, std::span<const SparseVector> x, std::span<const Label> y);

// ---------------------------------------------------------------------------

struct ForestConfig {
  std::size_t n_trees = 50;
  std::size_t max_depth = 10;
  /// Features drawn per split as a fraction of F; 0 means sqrt(F)/F.
  double feature_fraction = 0.0;
  std::size_t min_samples_split = 2;
  std::uint64_t seed = 1;
};

struct TreeNode {
  bool leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;  // value <= threshold goes left
  std::size_t left = 0;
  std::size_t right = 0;
  Label vote = Label::R;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  Label predict(const SparseVector& x) const;
  std::size_t depth() const;
};

struct RandomForestModel {
  std::vector<DecisionTree> trees;
  ForestConfig config;
  std::size_t features = 0;
};

struct ForestPrediction {
  Label label = Label::R;
  std::array<std::size_t, 3> votes{};  // (R, NR, I)
  std::vector<Label> tree_votes;
};

/// Each tree grows on a bootstrap sample with gini splits over a per-split
/// random feature subset. Throws Error(validation) for F = 0 or fewer than 2 samples.
RandomForestModel train_forest(std::span<const SparseVector> x, std::span<const Label> y, std::size_t features,
                               const ForestConfig& config);
/// Majority vote; ties go to the earlier class in (R, NR, I).
ForestPrediction predict_forest(const RandomForestModel& model, const SparseVector& x);

}  // namespace radtext
