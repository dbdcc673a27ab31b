#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radtext/baselines.hpp"
#include "radtext/classifier.hpp"
#include "radtext/corpus.hpp"
#include "radtext/embeddings.hpp"
#include "radtext/metrics.hpp"

namespace radtext {

struct PipelineOptions {
  EmbedTrainConfig embed;
  ModelConfig model;
  StopwordList stopwords;
  std::size_t min_count = 1;
};

struct TrainedPipeline {
  Vocabulary vocab;
  EmbeddingMatrix embeddings;
  ClassifierModel model;
};

/// Seeds for one train/evaluate run, fanned out from a single seed by tag.
struct ExperimentSeeds {
  std::uint64_t split = 0;
  std::uint64_t embed = 0;
  std::uint64_t model = 0;

  static ExperimentSeeds from(std::uint64_t seed);
};

/// Records usable by the given mode: two-class drops I, and every mode drops
/// records whose cleaned token sequence is empty.
std::vector<LabeledRecord> usable_records(std::span<const LabeledRecord> corpus, ClassifierMode mode,
                                          const StopwordList& stopwords, std::size_t* dropped_empty = nullptr);

std::vector<LabeledSequence> to_sequences(std::span<const LabeledRecord> records, const StopwordList& stopwords);

/// Builds the vocabulary and embeddings from the training records, then trains
/// the classifier. Seeds come from options.embed.seed and options.model.seed.
TrainedPipeline train_pipeline(std::span<const LabeledRecord> train, const PipelineOptions& options);

/// Throws Error(validation) naming the record if its cleaned sequence is empty.
std::vector<Prediction> predict_records(const TrainedPipeline& pipeline, std::span<const LabeledRecord> records,
                                        const StopwordList& stopwords);

/// Classes reported for a mode: (R, NR) or (R, NR, I).
std::vector<Label> mode_classes(ClassifierMode mode);

struct ExperimentResult {
  Split split;
  TrainedPipeline pipeline;
  std::vector<Prediction> predictions;
  EvalReport report;
};

/// One stratified split at `train_fraction`, train, predict and evaluate. The
/// option seeds are overridden by ExperimentSeeds::from(seed).
ExperimentResult run_experiment(std::span<const LabeledRecord> corpus, double train_fraction,
                                const PipelineOptions& options, std::uint64_t seed);

struct SweepPoint {
  double ratio = 0.0;
  double accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  std::vector<std::string> warnings;
};

/// Seed used for one sweep ratio: derive_seed(seed, "ratio:<ratio %.6g>").
std::uint64_t sweep_ratio_seed(std::uint64_t seed, double ratio);

/// Runs run_experiment once per ratio with sweep_ratio_seed. A ratio outside
/// (0, 1) is a validation error; a degenerate split is skipped with a warning.
SweepReport sweep_splits(std::span<const LabeledRecord> corpus, std::span<const double> ratios,
                         const PipelineOptions& options, std::uint64_t seed);

struct BaselineOptions {
  bool sublinear_tf = false;
  MaxEntConfig maxent;
  SvmConfig svm;
  ForestConfig forest;
};

struct BaselineRun {
  std::string name;  // "MaxEnt", "SVM" or "RandomForest"
  std::vector<Prediction> predictions;
  EvalReport report;
};

/// Fits TF-IDF on the training split and runs the three baselines on the test
/// split. Baseline seeds are derived from `seed` with the tags "maxent", "svm"
/// and "forest". SVM is binary (R against the rest).
std::vector<BaselineRun> run_baselines(const Split& split, const StopwordList& stopwords,
                                       const BaselineOptions& options, const std::vector<Label>& classes,
                                       std::uint64_t seed);

/// CSV with header ratio,accuracy,train,test.
std::string sweep_csv(const SweepReport& report);

/// CSV with header record_id,score,squared_error.
std::string mse_curve_csv(std::span<const MsePoint> points);

/// CSV with header record_id,label,score,p_r,p_nr,p_i. Probabilities are empty in two-class mode.
std::string predictions_csv(std::span<const Prediction> predictions);

}  // namespace radtext
