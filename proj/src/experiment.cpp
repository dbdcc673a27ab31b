#include "radtext/experiment.hpp"

#include <cstdio>

#include "radtext/csv.hpp"
#include "radtext/error.hpp"
#include "radtext/rng.hpp"

namespace radtext {

namespace {

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

}  // namespace

ExperimentSeeds ExperimentSeeds::from(std::uint64_t seed) {
  return {derive_seed(seed, "split"), derive_seed(seed, "embed"), derive_seed(seed, "model")};
}

std::vector<LabeledRecord> usable_records(std::span<const LabeledRecord> corpus, ClassifierMode mode,
                                          const StopwordList& stopwords, std::size_t* dropped_empty) {
  std::vector<LabeledRecord> out;
  std::size_t empty = 0;
  for (const auto& item : corpus) {
    if (mode == ClassifierMode::two_class_threshold && item.label == Label::I) continue;
    if (clean_and_tokenize(item.record, stopwords).tokens.empty()) {
      ++empty;
      continue;
    }
    out.push_back(item);
  }
  if (dropped_empty) *dropped_empty = empty;
  return out;
}

std::vector<LabeledSequence> to_sequences(std::span<const LabeledRecord> records, const StopwordList& stopwords) {
  std::vector<LabeledSequence> out;
  out.reserve(records.size());
  for (const auto& item : records) out.push_back({clean_and_tokenize(item.record, stopwords), item.label});
  return out;
}

TrainedPipeline train_pipeline(std::span<const LabeledRecord> train, const PipelineOptions& options) {
  const auto labeled = to_sequences(train, options.stopwords);
  std::vector<TokenSequence> sequences;
  sequences.reserve(labeled.size());
  for (const auto& s : labeled) sequences.push_back(s.sequence);
  TrainedPipeline out;
  out.vocab = build_vocab(sequences, options.min_count);
  out.embeddings = train_embeddings(sequences, out.vocab, options.embed);
  out.model = train_classifier(labeled, out.embeddings, out.vocab, options.model);
  return out;
}

std::vector<Prediction> predict_records(const TrainedPipeline& pipeline, std::span<const LabeledRecord> records,
                                        const StopwordList& stopwords) {
  std::vector<Prediction> out;
  out.reserve(records.size());
  for (const auto& item : records) {
    const auto sequence = clean_and_tokenize(item.record, stopwords);
    if (sequence.tokens.empty()) {
      throw Error(ErrorKind::validation, "record " + item.record.id + " has no tokens after cleaning");
    }
    out.push_back(predict(pipeline.model, pipeline.embeddings, pipeline.vocab, sequence));
  }
  return out;
}

std::vector<Label> mode_classes(ClassifierMode mode) {
  if (mode == ClassifierMode::two_class_threshold) return {Label::R, Label::NR};
  return {Label::R, Label::NR, Label::I};
}

ExperimentResult run_experiment(std::span<const LabeledRecord> corpus, double train_fraction,
                                const PipelineOptions& options, std::uint64_t seed) {
  const auto seeds = ExperimentSeeds::from(seed);
  const auto records = usable_records(corpus, options.model.mode, options.stopwords);
  ExperimentResult result;
  result.split = split_corpus(records, {train_fraction, seeds.split, true});
  PipelineOptions seeded = options;
  seeded.embed.seed = seeds.embed;
  seeded.model.seed = seeds.model;
  result.pipeline = train_pipeline(result.split.train, seeded);
  result.predictions = predict_records(result.pipeline, result.split.test, options.stopwords);
  result.report = evaluate(result.predictions, result.split.test, mode_classes(options.model.mode));
  return result;
}

std::uint64_t sweep_ratio_seed(std::uint64_t seed, double ratio) {
  return derive_seed(seed, "ratio:" + fmt("%.6g", ratio));
}

SweepReport sweep_splits(std::span<const LabeledRecord> corpus, std::span<const double> ratios,
                         const PipelineOptions& options, std::uint64_t seed) {
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::validation, "sweep ratio " + fmt("%g", r) + " is outside (0, 1)");
  }
  SweepReport report;
  for (double r : ratios) {
    const std::uint64_t ratio_seed = sweep_ratio_seed(seed, r);
    try {
      const auto result = run_experiment(corpus, r, options, ratio_seed);
      report.points.push_back(
          {r, result.report.accuracy, result.split.train.size(), result.split.test.size(), ratio_seed});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate_split) throw;
      report.warnings.push_back("ratio " + fmt("%g", r) + " skipped: " + e.what());
    }
  }
  return report;
}

std::vector<BaselineRun> run_baselines(const Split& split, const StopwordList& stopwords,
                                       const BaselineOptions& options, const std::vector<Label>& classes,
                                       std::uint64_t seed) {
  std::vector<TokenSequence> train_seq;
  std::vector<Label> train_y;
  for (const auto& item : split.train) {
    train_seq.push_back(clean_and_tokenize(item.record, stopwords));
    train_y.push_back(item.label);
  }
  TfidfVectorizer tfidf(options.sublinear_tf);
  tfidf.fit(train_seq);
  std::vector<SparseVector> train_x;
  train_x.reserve(train_seq.size());
  for (const auto& s : train_seq) train_x.push_back(tfidf.transform(s));
  std::vector<SparseVector> test_x;
  for (const auto& item : split.test) test_x.push_back(tfidf.transform(clean_and_tokenize(item.record, stopwords)));
  const std::size_t features = tfidf.feature_count();

  auto finish = [&](std::string name, auto&& label_of) {
    BaselineRun run;
    run.name = std::move(name);
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      Prediction p;
      p.record_id = split.test[i].record.id;
      p.label = label_of(test_x[i], p.score);
      run.predictions.push_back(std::move(p));
    }
    run.report = evaluate(run.predictions, split.test, classes);
    return run;
  };

  std::vector<BaselineRun> runs;
  MaxEntConfig maxent = options.maxent;
  maxent.seed = derive_seed(seed, "maxent");
  const auto me = train_maxent(train_x, train_y, classes, maxent);
  runs.push_back(finish("MaxEnt", [&](const SparseVector& x, double& score) {
    score = predict_maxent(me, x)[0];
    return predict_maxent_label(me, x);
  }));

  SvmConfig svm = options.svm;
  svm.seed = derive_seed(seed, "svm");
  const auto sv = train_svm(train_x, train_y, features, svm);
  runs.push_back(finish("SVM", [&](const SparseVector& x, double& score) {
    const auto p = predict_svm(sv, x);
    score = p.margin;
    return p.label;
  }));

  ForestConfig forest = options.forest;
  forest.seed = derive_seed(seed, "forest");
  const auto rf = train_forest(train_x, train_y, features, forest);
  runs.push_back(finish("RandomForest", [&](const SparseVector& x, double& score) {
    const auto p = predict_forest(rf, x);
    score = static_cast<double>(p.votes[0]) / static_cast<double>(rf.trees.empty() ? 1 : rf.trees.size());
    return p.label;
  }));
  return runs;
}

std::string sweep_csv(const SweepReport& report) {
  std::string out = "ratio,accuracy,train,test\n";
  char buf[128];
  for (const auto& p : report.points) {
    std::snprintf(buf, sizeof buf, "%.4f,%.6f,%zu,%zu\n", p.ratio, p.accuracy, p.train_size, p.test_size);
    out += buf;
  }
  return out;
}

std::string mse_curve_csv(std::span<const MsePoint> points) {
  std::string out = "record_id,score,squared_error\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, ",%.9f,%.9f\n", p.score, p.squared_error);
    out += csv::escape(p.record_id);
    out += buf;
  }
  return out;
}

std::string predictions_csv(std::span<const Prediction> predictions) {
  std::string out = "record_id,label,score,p_r,p_nr,p_i\n";
  char buf[160];
  for (const auto& p : predictions) {
    out += csv::escape(p.record_id);
    out += ',';
    out += to_string(p.label);
    if (p.has_probabilities) {
      std::snprintf(buf, sizeof buf, ",%.9f,%.9f,%.9f,%.9f\n", p.score, p.probabilities[0], p.probabilities[1],
                    p.probabilities[2]);
    } else {
      std::snprintf(buf, sizeof buf, ",%.9f,,,\n", p.score);
    }
    out += buf;
  }
  return out;
}

}  // namespace radtext
