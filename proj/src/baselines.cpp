#include "radtext/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "radtext/error.hpp"
#include "radtext/rng.hpp"

namespace radtext {

double SparseVector::dot(const Eigen::VectorXd& dense) const {
  double sum = 0.0;
  for (const auto& [f, v] : entries) sum += v * dense[static_cast<Eigen::Index>(f)];
  return sum;
}

double SparseVector::get(std::size_t feature) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), feature,
                             [](const auto& e, std::size_t f) { return e.first < f; });
  return it != entries.end() && it->first == feature ? it->second : 0.0;
}

// ---------------------------------------------------------------------------
// TF-IDF

void TfidfVectorizer::fit(std::span<const TokenSequence> train) {
  if (train.empty()) throw Error(ErrorKind::validation, "tf-idf needs at least one training document");
  vocab_ = build_vocab(train, 1);
  std::vector<std::size_t> df(vocab_.size() - 1, 0);
  for (const auto& seq : train) {
    std::vector<bool> present(df.size(), false);
    for (const auto& token : seq.tokens) {
      const std::size_t idx = vocab_.index_of(token);
      if (idx != kOovIndex) present[idx - 1] = true;
    }
    for (std::size_t f = 0; f < df.size(); ++f) df[f] += present[f] ? 1 : 0;
  }
  const double n = static_cast<double>(train.size());
  idf_.resize(df.size());
  for (std::size_t f = 0; f < df.size(); ++f) idf_[f] = std::log(n / static_cast<double>(df[f]));
  fitted_ = true;
}

SparseVector TfidfVectorizer::transform(const TokenSequence& sequence) const {
  if (!fitted_) throw Error(ErrorKind::state, "tf-idf vectorizer used before fit");
  std::map<std::size_t, std::size_t> counts;
  for (const auto& token : sequence.tokens) {
    const std::size_t idx = vocab_.index_of(token);
    if (idx != kOovIndex) ++counts[idx - 1];
  }
  SparseVector out;
  out.entries.reserve(counts.size());
  for (const auto& [f, count] : counts) {
    const double tf = sublinear_tf_ ? 1.0 + std::log(static_cast<double>(count)) : static_cast<double>(count);
    out.entries.emplace_back(f, tf * idf_[f]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// MaxEnt

namespace {

std::size_t class_position(const std::vector<Label>& classes, Label label) {
  auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) throw Error(ErrorKind::validation, std::string("label ") + to_string(label) + " not in class list");
  return static_cast<std::size_t>(it - classes.begin());
}

void check_sizes(std::size_t nx, std::size_t ny) {
  if (nx != ny) throw Error(ErrorKind::validation, "feature and label counts differ");
  if (nx == 0) throw Error(ErrorKind::validation, "training set is empty");
}

Eigen::VectorXd class_logits(const MaxEntModel& model, const SparseVector& x) {
  Eigen::VectorXd z = model.bias;
  for (const auto& [f, v] : x.entries) z += v * model.weight.row(static_cast<Eigen::Index>(f)).transpose();
  return z;
}

Eigen::VectorXd stable_softmax(const Eigen::VectorXd& z) {
  const double peak = z.maxCoeff();
  Eigen::VectorXd e = (z.array() - peak).exp().matrix();
  return e / e.sum();
}

}  // namespace

MaxEntModel MaxEntModel::zeros(std::size_t features, std::vector<Label> classes, double l2) {
  const auto c = static_cast<Eigen::Index>(classes.size());
  return {std::move(classes), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(features), c), Eigen::VectorXd::Zero(c),
          l2};
}

Eigen::VectorXd predict_maxent(const MaxEntModel& model, const SparseVector& x) {
  return stable_softmax(class_logits(model, x));
}

Label predict_maxent_label(const MaxEntModel& model, const SparseVector& x) {
  const Eigen::VectorXd p = predict_maxent(model, x);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < p.size(); ++k) {
    if (p[k] > p[best]) best = k;
  }
  return model.classes[static_cast<std::size_t>(best)];
}

double maxent_objective(const MaxEntModel& model, std::span<const SparseVector> x, std::span<const Label> y) {
  check_sizes(x.size(), y.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Eigen::VectorXd z = class_logits(model, x[i]);
    const double peak = z.maxCoeff();
    const double log_sum = peak + std::log((z.array() - peak).exp().sum());
    loss += log_sum - z[static_cast<Eigen::Index>(class_position(model.classes, y[i]))];
  }
  return loss / static_cast<double>(x.size()) + 0.5 * model.l2 * model.weight.squaredNorm();
}

void maxent_gradient(const MaxEntModel& model, std::span<const SparseVector> x, std::span<const Label> y,
                     Eigen::MatrixXd& grad_weight, Eigen::VectorXd& grad_bias) {
  check_sizes(x.size(), y.size());
  grad_weight = model.l2 * model.weight;
  grad_bias = Eigen::VectorXd::Zero(model.bias.size());
  const double scale = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Eigen::VectorXd dz = predict_maxent(model, x[i]);
    dz[static_cast<Eigen::Index>(class_position(model.classes, y[i]))] -= 1.0;
    dz *= scale;
    for (const auto& [f, v] : x[i].entries) grad_weight.row(static_cast<Eigen::Index>(f)) += v * dz.transpose();
    grad_bias += dz;
  }
}

MaxEntModel train_maxent(std::span<const SparseVector> x, std::span<const Label> y, std::vector<Label> classes,
                         const MaxEntConfig& config) {
  check_sizes(x.size(), y.size());
  if (classes.empty()) throw Error(ErrorKind::validation, "class list is empty");
  std::vector<std::size_t> target(y.size());
  std::vector<std::size_t> per_class(classes.size(), 0);
  std::size_t features = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    target[i] = class_position(classes, y[i]);
    ++per_class[target[i]];
    for (const auto& [f, v] : x[i].entries) features = std::max(features, f + 1);
  }
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (per_class[k] == 0) {
      throw Error(ErrorKind::missing_class, std::string("no training sample for class ") + to_string(classes[k]));
    }
  }
  MaxEntModel model = MaxEntModel::zeros(features, std::move(classes), config.l2);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(config.seed, "maxent.order"));
  const double decay = 1.0 - config.learning_rate * config.l2;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      Eigen::VectorXd dz = predict_maxent(model, x[i]);
      dz[static_cast<Eigen::Index>(target[i])] -= 1.0;
      if (config.l2 > 0.0) model.weight *= decay;
      for (const auto& [f, v] : x[i].entries) {
        model.weight.row(static_cast<Eigen::Index>(f)) -= config.learning_rate * v * dz.transpose();
      }
      model.bias -= config.learning_rate * dz;
    }
  }
  if (!model.weight.allFinite() || !model.bias.allFinite()) {
    throw Error(ErrorKind::divergence, "maxent training produced non-finite weights");
  }
  return model;
}

// ---------------------------------------------------------------------------
// Linear SVM

namespace {

double svm_sign(Label label) {
  if (label == Label::R) return 1.0;
  if (label == Label::NR) return -1.0;
  throw Error(ErrorKind::validation, "linear SVM is binary (R/NR) only");
}

}  // namespace

double svm_objective(const LinearSvmModel& model, std::span<const SparseVector> x, std::span<const Label> y) {
  check_sizes(x.size(), y.size());
  double hinge = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    hinge += std::max(0.0, 1.0 - svm_sign(y[i]) * (x[i].dot(model.weight) + model.bias));
  }
  return hinge / static_cast<double>(x.size()) +
         0.5 * model.lambda * (model.weight.squaredNorm() + model.bias * model.bias);
}

LinearSvmModel train_svm(std::span<const SparseVector> x, std::span<const Label> y, std::size_t features,
                         const SvmConfig& config, SvmTrainStats* stats) {
  check_sizes(x.size(), y.size());
  if (!(config.lambda > 0.0)) throw Error(ErrorKind::validation, "svm lambda must be > 0");
  bool has_r = false, has_nr = false;
  for (Label l : y) {
    svm_sign(l);
    has_r = has_r || l == Label::R;
    has_nr = has_nr || l == Label::NR;
  }
  if (!has_r || !has_nr) throw Error(ErrorKind::missing_class, "svm training needs both R and NR samples");
  for (const auto& xi : x) {
    if (!xi.entries.empty() && xi.entries.back().first >= features) {
      throw Error(ErrorKind::validation, "feature index exceeds feature count");
    }
  }

  LinearSvmModel model{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(features)), 0.0, config.lambda};
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(config.seed, "svm.order"));
  const double radius = 1.0 / std::sqrt(config.lambda);
  std::uint64_t t = 0;
  if (stats) stats->epoch_objective.clear();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double objective_sum = 0.0;
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (config.lambda * static_cast<double>(t));
      const double yi = svm_sign(y[i]);
      const double margin = yi * (x[i].dot(model.weight) + model.bias);
      const double shrink = 1.0 - eta * config.lambda;
      model.weight *= shrink;
      model.bias *= shrink;
      if (margin < 1.0) {
        for (const auto& [f, v] : x[i].entries) model.weight[static_cast<Eigen::Index>(f)] += eta * yi * v;
        model.bias += eta * yi;
      }
      const double norm = std::sqrt(model.weight.squaredNorm() + model.bias * model.bias);
      if (norm > radius) {
        model.weight *= radius / norm;
        model.bias *= radius / norm;
      }
      if (stats) objective_sum += svm_objective(model, x, y);
    }
    if (stats) stats->epoch_objective.push_back(objective_sum / static_cast<double>(x.size()));
  }
  return model;
}

SvmPrediction predict_svm(const LinearSvmModel& model, const SparseVector& x) {
  const double margin = x.dot(model.weight) + model.bias;
  return {margin > 0.0 ? Label::R : Label::NR, margin};
}

// ---------------------------------------------------------------------------
// Random forest

Label DecisionTree::predict(const SparseVector& x) const {
  std::size_t at = 0;
  while (!nodes[at].leaf) at = x.get(nodes[at].feature) <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
  return nodes[at].vote;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [at, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes[at].leaf) {
      stack.emplace_back(nodes[at].left, d + 1);
      stack.emplace_back(nodes[at].right, d + 1);
    }
  }
  return deepest;
}

namespace {

using Counts = std::array<std::size_t, 3>;

double gini(const Counts& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

Label majority(const Counts& counts) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < 3; ++k) {
    if (counts[k] > counts[best]) best = k;
  }
  return kLabelOrder[best];
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<double>& columns, std::span<const Label> y, std::size_t n, std::size_t features,
              std::size_t per_split, const ForestConfig& config, Rng& rng)
      : columns_(columns), y_(y), n_(n), features_(features), per_split_(per_split), config_(config), rng_(rng) {
    feature_order_.resize(features);
    std::iota(feature_order_.begin(), feature_order_.end(), 0);
  }

  DecisionTree build(std::vector<std::size_t> samples) {
    tree_.nodes.clear();
    grow(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  double value(std::size_t feature, std::size_t sample) const { return columns_[feature * n_ + sample]; }

  std::size_t grow(std::vector<std::size_t> samples, std::size_t depth) {
    const std::size_t id = tree_.nodes.size();
    tree_.nodes.emplace_back();
    Counts counts{};
    for (auto s : samples) ++counts[label_index(y_[s])];
    tree_.nodes[id].vote = majority(counts);
    const std::size_t total = samples.size();
    const double parent_gini = gini(counts, total);
    if (depth >= config_.max_depth || total < config_.min_samples_split || parent_gini == 0.0) return id;

    double best_score = parent_gini - 1e-12;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    bool found = false;

    std::vector<std::pair<double, Label>> column(total);
    std::size_t evaluated = 0;
    for (std::size_t k = 0; k < features_ && evaluated < per_split_; ++k) {
      // Lazy Fisher-Yates: draw the next feature without replacement.
      const std::size_t j = k + static_cast<std::size_t>(rng_.index(features_ - k));
      std::swap(feature_order_[k], feature_order_[j]);
      const std::size_t f = feature_order_[k];
      for (std::size_t i = 0; i < total; ++i) column[i] = {value(f, samples[i]), y_[samples[i]]};
      auto [lo, hi] = std::minmax_element(column.begin(), column.end(),
                                          [](const auto& a, const auto& b) { return a.first < b.first; });
      if (lo->first == hi->first) continue;
      ++evaluated;
      std::sort(column.begin(), column.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      Counts left{};
      Counts right = counts;
      for (std::size_t i = 0; i + 1 < total; ++i) {
        ++left[label_index(column[i].second)];
        --right[label_index(column[i].second)];
        if (column[i].first == column[i + 1].first) continue;
        const std::size_t nl = i + 1;
        const std::size_t nr = total - nl;
        const double score = (static_cast<double>(nl) * gini(left, nl) + static_cast<double>(nr) * gini(right, nr)) /
                             static_cast<double>(total);
        if (score < best_score) {
          best_score = score;
          best_feature = f;
          best_threshold = 0.5 * (column[i].first + column[i + 1].first);
          found = true;
        }
      }
    }
    if (!found) return id;

    std::vector<std::size_t> left_samples, right_samples;
    for (auto s : samples) (value(best_feature, s) <= best_threshold ? left_samples : right_samples).push_back(s);
    samples.clear();
    samples.shrink_to_fit();
    const std::size_t left_id = grow(std::move(left_samples), depth + 1);
    const std::size_t right_id = grow(std::move(right_samples), depth + 1);
    auto& node = tree_.nodes[id];
    node.leaf = false;
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left_id;
    node.right = right_id;
    return id;
  }

  const std::vector<double>& columns_;
  std::span<const Label> y_;
  std::size_t n_;
  std::size_t features_;
  std::size_t per_split_;
  const ForestConfig& config_;
  Rng& rng_;
  std::vector<std::size_t> feature_order_;
  DecisionTree tree_;
};

}  // namespace

RandomForestModel train_forest(std::span<const SparseVector> x, std::span<const Label> y, std::size_t features,
                               const ForestConfig& config) {
  check_sizes(x.size(), y.size());
  if (features == 0) throw Error(ErrorKind::validation, "random forest needs a non-empty feature space");
  if (x.size() < 2) throw Error(ErrorKind::validation, "random forest needs at least 2 samples");
  if (config.n_trees < 1) throw Error(ErrorKind::validation, "random forest needs at least 1 tree");

  const std::size_t n = x.size();
  std::vector<double> columns(features * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [f, v] : x[i].entries) {
      if (f >= features) throw Error(ErrorKind::validation, "feature index exceeds feature count");
      columns[f * n + i] = v;
    }
  }
  const double fraction =
      config.feature_fraction > 0.0 ? config.feature_fraction : std::sqrt(static_cast<double>(features)) / static_cast<double>(features);
  const std::size_t per_split =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(fraction * static_cast<double>(features))), 1, features);

  RandomForestModel model;
  model.config = config;
  model.features = features;
  model.trees.reserve(config.n_trees);
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    Rng rng(derive_seed(config.seed, "forest.tree." + std::to_string(t)));
    std::vector<std::size_t> bootstrap(n);
    for (auto& s : bootstrap) s = static_cast<std::size_t>(rng.index(n));
    TreeBuilder builder(columns, y, n, features, per_split, config, rng);
    model.trees.push_back(builder.build(std::move(bootstrap)));
  }
  return model;
}

ForestPrediction predict_forest(const RandomForestModel& model, const SparseVector& x) {
  ForestPrediction out;
  out.tree_votes.reserve(model.trees.size());
  for (const auto& tree : model.trees) {
    const Label vote = tree.predict(x);
    out.tree_votes.push_back(vote);
    ++out.votes[label_index(vote)];
  }
  out.label = majority(out.votes);
  return out;
}

}  // namespace radtext
