#include "radtext/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "radtext/error.hpp"
#include "radtext/rng.hpp"

namespace radtext {

const char* to_string(ClassifierMode mode) noexcept {
  return mode == ClassifierMode::two_class_threshold ? "two_class_threshold" : "three_class_softmax";
}

ClassifierMode parse_classifier_mode(std::string_view text) {
  if (text == "two_class_threshold" || text == "two" || text == "2") return ClassifierMode::two_class_threshold;
  if (text == "three_class_softmax" || text == "three" || text == "3") return ClassifierMode::three_class_softmax;
  throw Error(ErrorKind::validation, "unknown classifier mode '" + std::string(text) + "'");
}

const char* to_string(DecisionRule rule) noexcept {
  return rule == DecisionRule::score_threshold ? "score_threshold" : "embedding_centroid";
}

DecisionRule parse_decision_rule(std::string_view text) {
  if (text == "score_threshold" || text == "threshold") return DecisionRule::score_threshold;
  if (text == "embedding_centroid" || text == "centroid") return DecisionRule::embedding_centroid;
  throw Error(ErrorKind::validation, "unknown decision rule '" + std::string(text) + "'");
}

const char* to_string(LrSchedule schedule) noexcept {
  return schedule == LrSchedule::constant ? "constant" : "linear_decay";
}

LrSchedule parse_lr_schedule(std::string_view text) {
  if (text == "constant") return LrSchedule::constant;
  if (text == "linear_decay" || text == "linear") return LrSchedule::linear_decay;
  throw Error(ErrorKind::validation, "unknown learning-rate schedule '" + std::string(text) + "'");
}

double ModelConfig::epoch_learning_rate(std::size_t epoch) const {
  if (lr_schedule == LrSchedule::constant || epochs == 0) return learning_rate;
  return learning_rate * (1.0 - static_cast<double>(epoch) / static_cast<double>(epochs));
}

void ModelConfig::validate() const {
  if (hidden < 1) throw Error(ErrorKind::validation, "hidden size must be >= 1");
  if (max_length < 1) throw Error(ErrorKind::validation, "max sequence length must be >= 1");
  if (!(clip_norm > 0.0)) throw Error(ErrorKind::validation, "clip norm must be > 0");
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::validation, "learning rate must be > 0");
}

ThresholdModel ThresholdModel::fit(double mean_r, double mean_nr) {
  return {mean_r, mean_nr, 0.5 * (mean_r + mean_nr), mean_r >= mean_nr};
}

Label ThresholdModel::decide(double score) const {
  const bool r_side = r_above ? score > threshold : score < threshold;
  return r_side ? Label::R : Label::NR;
}

TrainTarget TrainTarget::for_label(Label label) {
  return {label == Label::R ? 1.0 : 0.0, label_index(label)};
}

ParameterSet init_parameters(const ModelConfig& config, std::size_t input_dim) {
  config.validate();
  Rng rng(derive_seed(config.seed, "classifier.init"));
  ParameterSet p{LstmParams::zeros(input_dim, config.hidden), DenseParams::zeros(config.hidden, config.output_size())};
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.hidden));
  for_each_tensor(p, [&](const std::string& name, double* data, Eigen::Index rows, Eigen::Index cols) {
    if (name.ends_with(".bias")) return;
    for (Eigen::Index k = 0; k < rows * cols; ++k) data[k] = rng.uniform(-scale, scale);
  });
  p.lstm.forget_gate.bias.setOnes();
  return p;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double peak = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - peak).exp().matrix();
  return e / e.sum();
}

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::VectorXd logits_of(const ParameterSet& params, const Eigen::VectorXd& hidden) {
  return params.dense.weight.transpose() * hidden + params.dense.bias;
}

/// Mutable views over every tensor, in for_each_tensor order.
std::vector<std::pair<double*, Eigen::Index>> views(ParameterSet& set) {
  std::vector<std::pair<double*, Eigen::Index>> out;
  for_each_tensor(set, [&](const std::string&, double* data, Eigen::Index rows, Eigen::Index cols) {
    out.emplace_back(data, rows * cols);
  });
  return out;
}

}  // namespace

double score_of(const ParameterSet& params, std::span<const Eigen::VectorXd> inputs) {
  const auto forward = lstm_forward(inputs, params.lstm);
  return sigmoid(logits_of(params, forward.hidden)[0]);
}

Eigen::Vector3d probabilities_of(const ParameterSet& params, std::span<const Eigen::VectorXd> inputs) {
  const auto forward = lstm_forward(inputs, params.lstm);
  const Eigen::VectorXd p = softmax(logits_of(params, forward.hidden));
  if (p.size() != 3) throw Error(ErrorKind::mode, "model does not have a three-class head");
  return p;
}

double sample_loss(const ParameterSet& params, ClassifierMode mode, std::span<const Eigen::VectorXd> inputs,
                   const TrainTarget& target) {
  const auto forward = lstm_forward(inputs, params.lstm);
  const Eigen::VectorXd z = logits_of(params, forward.hidden);
  if (mode == ClassifierMode::two_class_threshold) {
    const double s = sigmoid(z[0]);
    return (s - target.score) * (s - target.score);
  }
  const double peak = z.maxCoeff();
  const double log_sum = peak + std::log((z.array() - peak).exp().sum());
  return log_sum - z[static_cast<Eigen::Index>(target.class_index)];
}

double backprop(const ParameterSet& params, ClassifierMode mode, std::span<const Eigen::VectorXd> inputs,
                const TrainTarget& target, ParameterSet& grads, BackwardFault fault) {
  const auto forward = lstm_forward(inputs, params.lstm);
  const Eigen::VectorXd z = logits_of(params, forward.hidden);
  Eigen::VectorXd dz(z.size());
  double loss = 0.0;
  if (mode == ClassifierMode::two_class_threshold) {
    const double s = sigmoid(z[0]);
    const double diff = s - target.score;
    loss = diff * diff;
    dz[0] = 2.0 * diff * s * (1.0 - s);
  } else {
    const Eigen::VectorXd p = softmax(z);
    const auto k = static_cast<Eigen::Index>(target.class_index);
    loss = -std::log(std::max(p[k], std::numeric_limits<double>::min()));
    dz = p;
    dz[k] -= 1.0;
  }
  grads.dense.weight.noalias() += forward.hidden * dz.transpose();
  grads.dense.bias += dz;
  const Eigen::VectorXd d_hidden = params.dense.weight * dz;
  lstm_backward(forward, params.lstm, d_hidden, grads.lstm, fault);
  return loss;
}

std::vector<Eigen::VectorXd> embed_sequence(const TokenSequence& sequence, const EmbeddingMatrix& emb,
                                            const Vocabulary& vocab, std::size_t max_length) {
  std::vector<Eigen::VectorXd> inputs;
  const std::size_t n = std::min(sequence.tokens.size(), max_length);
  inputs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) inputs.push_back(emb.row(vocab.index_of(sequence.tokens[t])));
  return inputs;
}

Label argmax_label(const Eigen::Vector3d& probabilities) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < 3; ++k) {
    if (probabilities[static_cast<Eigen::Index>(k)] > probabilities[static_cast<Eigen::Index>(best)]) best = k;
  }
  return kLabelOrder[best];
}

ClassifierModel train_classifier(std::span<const LabeledSequence> train, const EmbeddingMatrix& emb,
                                 const Vocabulary& vocab, const ModelConfig& config) {
  config.validate();
  if (train.empty()) throw Error(ErrorKind::validation, "training set is empty");
  const bool two_class = config.mode == ClassifierMode::two_class_threshold;

  std::vector<std::vector<Eigen::VectorXd>> inputs;
  std::vector<TrainTarget> targets;
  std::vector<Label> labels;
  std::array<std::size_t, 3> seen{};
  for (const auto& item : train) {
    if (two_class && item.label == Label::I) continue;
    if (item.sequence.tokens.empty()) {
      throw Error(ErrorKind::validation, "training record '" + item.sequence.source_record_id + "' has no tokens");
    }
    inputs.push_back(embed_sequence(item.sequence, emb, vocab, config.max_length));
    targets.push_back(TrainTarget::for_label(item.label));
    labels.push_back(item.label);
    ++seen[label_index(item.label)];
  }
  if (seen[0] == 0 || seen[1] == 0 || (!two_class && seen[2] == 0)) {
    throw Error(ErrorKind::missing_class, two_class ? "two-class training needs both R and NR records"
                                                    : "three-class training needs R, NR and I records");
  }

  ClassifierModel model;
  model.config = config;
  model.params = init_parameters(config, emb.dimension());
  ParameterSet grads = ParameterSet::zeros_like(model.params);
  auto param_views = views(model.params);
  auto grad_views = views(grads);

  std::vector<std::size_t> order(inputs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(config.seed, "classifier.order"));

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.epoch_learning_rate(epoch);
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      for (auto& [data, size] : grad_views) std::fill(data, data + size, 0.0);
      const double loss = backprop(model.params, config.mode, inputs[idx], targets[idx], grads);
      if (!std::isfinite(loss)) {
        throw Error(ErrorKind::divergence, "training loss became non-finite in epoch " + std::to_string(epoch + 1));
      }
      loss_sum += loss;
      const double norm = std::sqrt(squared_norm(grads));
      const double scale = norm > config.clip_norm ? config.clip_norm / norm : 1.0;
      const double step = lr * scale;
      for (std::size_t t = 0; t < param_views.size(); ++t) {
        double* p = param_views[t].first;
        const double* g = grad_views[t].first;
        for (Eigen::Index k = 0; k < param_views[t].second; ++k) p[k] -= step * g[k];
      }
    }
    const double mean_loss = loss_sum / static_cast<double>(inputs.size());
    if (!std::isfinite(mean_loss)) {
      throw Error(ErrorKind::divergence, "training loss became non-finite in epoch " + std::to_string(epoch + 1));
    }
    model.epoch_losses.push_back(mean_loss);
  }

  if (two_class) {
    double sum_r = 0.0, sum_nr = 0.0;
    std::size_t n_r = 0, n_nr = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const double s = score_of(model.params, inputs[i]);
      if (labels[i] == Label::R) {
        sum_r += s;
        ++n_r;
      } else {
        sum_nr += s;
        ++n_nr;
      }
    }
    model.threshold = ThresholdModel::fit(sum_r / static_cast<double>(n_r), sum_nr / static_cast<double>(n_nr));

    std::vector<LabeledVector> doc_vectors;
    for (const auto& item : train) {
      if (item.label == Label::I) continue;
      doc_vectors.push_back({item.label, doc_vector(item.sequence, emb, vocab).vector});
    }
    model.centroids = class_centroids(doc_vectors);
  }
  return model;
}

Prediction predict(const ClassifierModel& model, const EmbeddingMatrix& emb, const Vocabulary& vocab,
                   const TokenSequence& sequence) {
  if (sequence.tokens.empty()) {
    throw Error(ErrorKind::validation, "cannot predict record '" + sequence.source_record_id + "': no tokens");
  }
  Prediction out;
  out.record_id = sequence.source_record_id;
  const auto inputs = embed_sequence(sequence, emb, vocab, model.config.max_length);
  if (model.config.mode == ClassifierMode::three_class_softmax) {
    const Eigen::Vector3d p = probabilities_of(model.params, inputs);
    out.has_probabilities = true;
    for (std::size_t k = 0; k < 3; ++k) out.probabilities[k] = p[static_cast<Eigen::Index>(k)];
    out.score = p[0];
    out.label = argmax_label(p);
    return out;
  }
  out.score = score_of(model.params, inputs);
  if (model.config.decision_rule == DecisionRule::embedding_centroid) {
    if (!model.centroids) throw Error(ErrorKind::state, "model has no class centroids");
    const Eigen::VectorXd v = doc_vector(sequence, emb, vocab).vector;
    const double dist_r = (v - model.centroids->mean_r).squaredNorm();
    const double dist_nr = (v - model.centroids->mean_nr).squaredNorm();
    out.label = dist_r < dist_nr ? Label::R : Label::NR;
    return out;
  }
  if (!model.threshold) throw Error(ErrorKind::state, "model has no threshold");
  out.label = model.threshold->decide(out.score);
  return out;
}

GradCheckProbe make_probe(std::size_t input_dim, std::size_t max_length, std::size_t batch, ClassifierMode mode,
                          std::uint64_t seed) {
  Rng rng(derive_seed(seed, "gradcheck.probe"));
  GradCheckProbe probe;
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t length = b == 0 ? max_length : 1 + static_cast<std::size_t>(rng.index(max_length));
    std::vector<Eigen::VectorXd> seq;
    for (std::size_t t = 0; t < length; ++t) {
      Eigen::VectorXd x(static_cast<Eigen::Index>(input_dim));
      for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = rng.uniform(-1.0, 1.0);
      seq.push_back(std::move(x));
    }
    probe.inputs.push_back(std::move(seq));
    TrainTarget target;
    if (mode == ClassifierMode::two_class_threshold) {
      target.score = rng.bernoulli(0.5) ? 1.0 : 0.0;
    } else {
      target.class_index = static_cast<std::size_t>(rng.index(3));
    }
    probe.targets.push_back(target);
  }
  return probe;
}

GradCheckResult gradient_check(const ParameterSet& params, ClassifierMode mode, const GradCheckProbe& probe,
                               BackwardFault fault) {
  constexpr double kEpsilon = 1e-5;
  ParameterSet grads = ParameterSet::zeros_like(params);
  for (std::size_t b = 0; b < probe.inputs.size(); ++b) {
    backprop(params, mode, probe.inputs[b], probe.targets[b], grads, fault);
  }
  auto total_loss = [&](const ParameterSet& p) {
    double sum = 0.0;
    for (std::size_t b = 0; b < probe.inputs.size(); ++b) sum += sample_loss(p, mode, probe.inputs[b], probe.targets[b]);
    return sum;
  };

  GradCheckResult result;
  result.analytic_norm = std::sqrt(squared_norm(grads));
  ParameterSet perturbed = params;
  std::vector<std::string> names;
  for_each_tensor(perturbed, [&](const std::string& name, double*, Eigen::Index, Eigen::Index) { names.push_back(name); });
  auto param_views = views(perturbed);
  auto grad_views = views(grads);
  for (std::size_t t = 0; t < param_views.size(); ++t) {
    double* p = param_views[t].first;
    for (Eigen::Index k = 0; k < param_views[t].second; ++k) {
      const double saved = p[k];
      p[k] = saved + kEpsilon;
      const double plus = total_loss(perturbed);
      p[k] = saved - kEpsilon;
      const double minus = total_loss(perturbed);
      p[k] = saved;
      const double numeric = (plus - minus) / (2.0 * kEpsilon);
      const double analytic = grad_views[t].first[k];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic - numeric) / denom;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_tensor = names[t];
      }
      ++result.parameters_checked;
    }
  }
  return result;
}

GradCheckResult gradient_check(const ModelConfig& config, const GradCheckProbe& probe, BackwardFault fault) {
  if (probe.inputs.empty()) throw Error(ErrorKind::validation, "gradient check needs a non-empty probe");
  const std::size_t d = static_cast<std::size_t>(probe.inputs.front().front().size());
  if (config.hidden > 4 || d > 4) {
    throw Error(ErrorKind::validation, "gradient check is limited to h <= 4 and d <= 4");
  }
  for (const auto& seq : probe.inputs) {
    if (seq.size() > 6 || seq.size() > config.max_length) {
      throw Error(ErrorKind::validation, "gradient check sequences must be no longer than min(L, 6)");
    }
  }
  return gradient_check(init_parameters(config, d), config.mode, probe, fault);
}

namespace {

std::vector<MsePoint> sorted_curve(std::vector<MsePoint> points) {
  std::sort(points.begin(), points.end(), [](const MsePoint& a, const MsePoint& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.record_id < b.record_id;
  });
  return points;
}

}  // namespace

std::vector<MsePoint> mse_curve(const ClassifierModel& model, const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                std::span<const LabeledSequence> test) {
  if (model.config.mode != ClassifierMode::two_class_threshold) {
    throw Error(ErrorKind::mode, "mse curve requires a two-class model");
  }
  std::vector<MsePoint> points;
  for (const auto& item : test) {
    if (item.label == Label::I) continue;
    const double s = score_of(model.params, embed_sequence(item.sequence, emb, vocab, model.config.max_length));
    const double target = item.label == Label::R ? 1.0 : 0.0;
    points.push_back({item.sequence.source_record_id, s, (s - target) * (s - target)});
  }
  return sorted_curve(std::move(points));
}

std::vector<MsePoint> mse_curve(const ClassifierModel& model, std::span<const Prediction> predictions,
                                std::span<const LabeledRecord> truth) {
  if (model.config.mode != ClassifierMode::two_class_threshold) {
    throw Error(ErrorKind::mode, "mse curve requires a two-class model");
  }
  std::unordered_map<std::string, Label> labels;
  for (const auto& t : truth) labels.emplace(t.record.id, t.label);
  std::vector<MsePoint> points;
  for (const auto& p : predictions) {
    auto it = labels.find(p.record_id);
    if (it == labels.end()) throw Error(ErrorKind::validation, "no truth label for '" + p.record_id + "'");
    if (it->second == Label::I) continue;
    const double target = it->second == Label::R ? 1.0 : 0.0;
    points.push_back({p.record_id, p.score, (p.score - target) * (p.score - target)});
  }
  return sorted_curve(std::move(points));
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr const char* kModelMagic = "radtext-model";
constexpr int kModelVersion = 1;

std::string fmt17(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

void write_values(std::ostringstream& out, const double* data, Eigen::Index n) {
  for (Eigen::Index k = 0; k < n; ++k) out << (k ? " " : "") << fmt17(data[k]);
  out << '\n';
}

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::string word(const char* what) {
    std::string w;
    if (!(in_ >> w)) fail(std::string("missing ") + what);
    return w;
  }
  void expect(const std::string& keyword) {
    const auto w = word(keyword.c_str());
    if (w != keyword) fail("expected '" + keyword + "', found '" + w + "'");
  }
  double number(const char* what) {
    const auto w = word(what);
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (end == w.c_str() || *end != '\0') fail(std::string("bad number for ") + what);
    return v;
  }
  std::size_t count(const char* what) {
    const double v = number(what);
    if (v < 0 || v != std::floor(v)) fail(std::string("bad count for ") + what);
    return static_cast<std::size_t>(v);
  }
  std::uint64_t u64(const char* what) {
    const auto w = word(what);
    try {
      return std::stoull(w);
    } catch (...) {
      fail(std::string("bad integer for ") + what);
    }
  }
  [[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::parse, "model file: " + what); }

 private:
  std::istringstream in_;
};

}  // namespace

std::string serialize_model(const ClassifierModel& model) {
  std::ostringstream out;
  const auto& c = model.config;
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "mode " << to_string(c.mode) << '\n';
  out << "decision_rule " << to_string(c.decision_rule) << '\n';
  out << "hidden " << c.hidden << '\n';
  out << "max_length " << c.max_length << '\n';
  out << "epochs " << c.epochs << '\n';
  out << "learning_rate " << fmt17(c.learning_rate) << '\n';
  out << "clip_norm " << fmt17(c.clip_norm) << '\n';
  out << "lr_schedule " << to_string(c.lr_schedule) << '\n';
  out << "seed " << c.seed << '\n';
  out << "input_dim " << model.params.lstm.input_dim() << '\n';
  out << "classes " << model.params.dense.classes() << '\n';
  for_each_tensor(model.params, [&](const std::string& name, const double* data, Eigen::Index rows, Eigen::Index cols) {
    out << "tensor " << name << ' ' << rows << ' ' << cols << '\n';
    write_values(out, data, rows * cols);
  });
  if (model.threshold) {
    const auto& t = *model.threshold;
    out << "threshold " << fmt17(t.mean_r) << ' ' << fmt17(t.mean_nr) << ' ' << fmt17(t.threshold) << ' '
        << (t.r_above ? 1 : 0) << '\n';
  } else {
    out << "threshold none\n";
  }
  if (model.centroids) {
    const auto& ce = *model.centroids;
    out << "centroids " << ce.mean_r.size() << ' ' << ce.count_r << ' ' << ce.count_nr << '\n';
    write_values(out, ce.mean_r.data(), ce.mean_r.size());
    write_values(out, ce.mean_nr.data(), ce.mean_nr.size());
  } else {
    out << "centroids none\n";
  }
  out << "epoch_losses " << model.epoch_losses.size() << '\n';
  write_values(out, model.epoch_losses.data(), static_cast<Eigen::Index>(model.epoch_losses.size()));
  out << "end\n";
  return out.str();
}

ClassifierModel deserialize_model(const std::string& text) {
  Reader in(text);
  in.expect(kModelMagic);
  if (in.count("version") != kModelVersion) in.fail("unsupported format version");
  ClassifierModel model;
  auto& c = model.config;
  in.expect("mode");
  c.mode = parse_classifier_mode(in.word("mode"));
  in.expect("decision_rule");
  c.decision_rule = parse_decision_rule(in.word("decision_rule"));
  in.expect("hidden");
  c.hidden = in.count("hidden");
  in.expect("max_length");
  c.max_length = in.count("max_length");
  in.expect("epochs");
  c.epochs = in.count("epochs");
  in.expect("learning_rate");
  c.learning_rate = in.number("learning_rate");
  in.expect("clip_norm");
  c.clip_norm = in.number("clip_norm");
  in.expect("lr_schedule");
  c.lr_schedule = parse_lr_schedule(in.word("lr_schedule"));
  in.expect("seed");
  c.seed = in.u64("seed");
  in.expect("input_dim");
  const std::size_t input_dim = in.count("input_dim");
  in.expect("classes");
  const std::size_t classes = in.count("classes");
  if (classes != c.output_size()) in.fail("class count does not match mode");
  c.validate();

  model.params = {LstmParams::zeros(input_dim, c.hidden), DenseParams::zeros(c.hidden, classes)};
  for_each_tensor(model.params, [&](const std::string& name, double* data, Eigen::Index rows, Eigen::Index cols) {
    in.expect("tensor");
    if (in.word("tensor name") != name) in.fail("expected tensor " + name);
    if (in.count("rows") != static_cast<std::size_t>(rows) || in.count("cols") != static_cast<std::size_t>(cols)) {
      in.fail("shape mismatch for " + name);
    }
    for (Eigen::Index k = 0; k < rows * cols; ++k) data[k] = in.number(name.c_str());
  });
  model.params.lstm.validate();

  in.expect("threshold");
  const auto first = in.word("threshold");
  if (first != "none") {
    ThresholdModel t;
    char* end = nullptr;
    t.mean_r = std::strtod(first.c_str(), &end);
    if (*end != '\0') in.fail("bad threshold mean_r");
    t.mean_nr = in.number("mean_nr");
    t.threshold = in.number("threshold");
    t.r_above = in.count("orientation") != 0;
    model.threshold = t;
  }
  in.expect("centroids");
  const auto dim_word = in.word("centroids");
  if (dim_word != "none") {
    const auto dim = static_cast<Eigen::Index>(std::stoul(dim_word));
    ClassCentroids ce;
    ce.count_r = in.count("count_r");
    ce.count_nr = in.count("count_nr");
    ce.mean_r.resize(dim);
    ce.mean_nr.resize(dim);
    for (Eigen::Index k = 0; k < dim; ++k) ce.mean_r[k] = in.number("mean_r");
    for (Eigen::Index k = 0; k < dim; ++k) ce.mean_nr[k] = in.number("mean_nr");
    model.centroids = std::move(ce);
  }
  in.expect("epoch_losses");
  const std::size_t n_losses = in.count("epoch_losses");
  for (std::size_t k = 0; k < n_losses; ++k) model.epoch_losses.push_back(in.number("loss"));
  in.expect("end");
  return model;
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << serialize_model(model);
}

ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_model(buffer.str());
}

}  // namespace radtext
