#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "radtext/corpus.hpp"
#include "radtext/embeddings.hpp"
#include "radtext/lstm.hpp"
#include "radtext/prediction.hpp"

namespace radtext {

enum class ClassifierMode { two_class_threshold, three_class_softmax };

/// How a two-class model turns a document into a label.
enum class DecisionRule {
  score_threshold,     // midpoint between the class means of training scores
  embedding_centroid,  // nearest of the R / NR document-vector centroids
};

/// Per-epoch learning-rate schedule. linear_decay uses lr * (1 - epoch / epochs)
/// for zero-based epoch, so the last epoch still takes a positive step.
enum class LrSchedule { constant, linear_decay };

const char* to_string(ClassifierMode mode) noexcept;
ClassifierMode parse_classifier_mode(std::string_view text);
const char* to_string(DecisionRule rule) noexcept;
DecisionRule parse_decision_rule(std::string_view text);
const char* to_string(LrSchedule schedule) noexcept;
LrSchedule parse_lr_schedule(std::string_view text);

struct ModelConfig {
  std::size_t hidden = 32;
  std::size_t max_length = 200;
  std::size_t epochs = 30;
  double learning_rate = 0.05;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;
  ClassifierMode mode = ClassifierMode::two_class_threshold;
  DecisionRule decision_rule = DecisionRule::score_threshold;
  LrSchedule lr_schedule = LrSchedule::linear_decay;

  /// Learning rate used throughout zero-based `epoch`.
  double epoch_learning_rate(std::size_t epoch) const;
  void validate() const;
  std::size_t output_size() const { return mode == ClassifierMode::two_class_threshold ? 1 : 3; }
};

struct ThresholdModel {
  double mean_r = 0.0;
  double mean_nr = 0.0;
  double threshold = 0.0;
  bool r_above = true;  // R lies on the side of larger scores

  static ThresholdModel fit(double mean_r, double mean_nr);
  /// R iff the score is strictly on the R side of the threshold.
  Label decide(double score) const;
};

struct ClassifierModel {
  ModelConfig config;
  ParameterSet params;
  std::optional<ThresholdModel> threshold;  // two-class mode
  std::optional<ClassCentroids> centroids;  // two-class mode
  std::vector<double> epoch_losses;         // mean training loss per epoch
};

struct TrainTarget {
  double score = 0.0;          // two-class regression target
  std::size_t class_index = 0; // three-class target in (R, NR, I) order

  static TrainTarget for_label(Label label);
};

/// Seeded initialisation: uniform in +-1/sqrt(h), forget-gate bias 1.
ParameterSet init_parameters(const ModelConfig& config, std::size_t input_dim);

/// Loss of one sequence. Two-class: (sigmoid(score) - target)^2. Three-class:
/// softmax cross-entropy.
double sample_loss(const ParameterSet& params, ClassifierMode mode, std::span<const Eigen::VectorXd> inputs,
                   const TrainTarget& target);

/// Loss and gradient of one sequence, gradients accumulated into `grads`.
double backprop(const ParameterSet& params, ClassifierMode mode, std::span<const Eigen::VectorXd> inputs,
                const TrainTarget& target, ParameterSet& grads, BackwardFault fault = BackwardFault::none);

/// Two-class score in (0, 1), or the three-class probability vector.
double score_of(const ParameterSet& params, std::span<const Eigen::VectorXd> inputs);
Eigen::Vector3d probabilities_of(const ParameterSet& params, std::span<const Eigen::VectorXd> inputs);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Embeds a token sequence, truncated to max_length; OOV tokens use the sentinel vector.
std::vector<Eigen::VectorXd> embed_sequence(const TokenSequence& sequence, const EmbeddingMatrix& emb,
                                            const Vocabulary& vocab, std::size_t max_length);

struct LabeledSequence {
  TokenSequence sequence;
  Label label = Label::NR;
};

/// Plain SGD (batch size 1) with global-norm gradient clipping. Two-class mode
/// ignores I samples and fits the threshold from training-score means.
ClassifierModel train_classifier(std::span<const LabeledSequence> train, const EmbeddingMatrix& emb,
                                 const Vocabulary& vocab, const ModelConfig& config);

/// Throws Error(validation) for an empty sequence.
Prediction predict(const ClassifierModel& model, const EmbeddingMatrix& emb, const Vocabulary& vocab,
                   const TokenSequence& sequence);

/// Three-class argmax; ties go to the earlier class in (R, NR, I).
Label argmax_label(const Eigen::Vector3d& probabilities);

struct GradCheckProbe {
  std::vector<std::vector<Eigen::VectorXd>> inputs;
  std::vector<TrainTarget> targets;
};

/// Random probe with `batch` sequences of length in [1, max_length].
GradCheckProbe make_probe(std::size_t input_dim, std::size_t max_length, std::size_t batch, ClassifierMode mode,
                          std::uint64_t seed);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  double analytic_norm = 0.0;
  std::size_t parameters_checked = 0;
};

/// Compares analytic gradients of the summed probe loss against central
/// differences (epsilon 1e-5) on every parameter. Relative error is
/// |a - n| / max(|a|, |n|, 1e-8).
GradCheckResult gradient_check(const ModelConfig& config, const GradCheckProbe& probe,
                               BackwardFault fault = BackwardFault::none);
GradCheckResult gradient_check(const ParameterSet& params, ClassifierMode mode, const GradCheckProbe& probe,
                               BackwardFault fault = BackwardFault::none);

struct MsePoint {
  std::string record_id;
  double score = 0.0;
  double squared_error = 0.0;
};

/// Per-record (score - target)^2 with R -> 1, NR -> 0, sorted by score. I
/// records are skipped. Throws Error(mode) for a three-class model.
std::vector<MsePoint> mse_curve(const ClassifierModel& model, const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                std::span<const LabeledSequence> test);
std::vector<MsePoint> mse_curve(const ClassifierModel& model, std::span<const Prediction> predictions,
                                std::span<const LabeledRecord> truth);

/// Text container, format version 1, 17 significant digits per value.
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);
std::string serialize_model(const ClassifierModel& model);
ClassifierModel deserialize_model(const std::string& text);

}  // namespace radtext
