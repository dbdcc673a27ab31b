#include "radtext/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <thread>
#include <sstream>

#include "radtext/annotation.hpp"
#include "radtext/baselines.hpp"
#include "radtext/classifier.hpp"
#include "radtext/corpus.hpp"
#include "radtext/csv.hpp"
#include "radtext/embeddings.hpp"
#include "radtext/error.hpp"
#include "radtext/experiment.hpp"
#include "radtext/metrics.hpp"
#include "radtext/rng.hpp"
#include "radtext/service.hpp"
#include "radtext/synth.hpp"
#include "radtext/trends.hpp"

namespace radtext {

namespace {

namespace fs = std::filesystem;

constexpr const char* kModelFile = "model.txt";
constexpr const char* kEmbeddingFile = "embeddings.txt";
constexpr const char* kSplitFile = "split.csv";

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

fs::path prepare_out(const std::string& dir) {
  fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

RecordFormat format_for(const std::string& path, const std::string& format) {
  if (!format.empty()) return parse_record_format(format);
  return fs::path(path).extension() == ".csv" ? RecordFormat::csv : RecordFormat::jsonl;
}

std::vector<Record> load_corpus(const std::string& path, const std::string& format = {}) {
  return ingest_records(path, format_for(path, format)).records;
}

std::vector<LabeledRecord> load_labeled(const std::string& corpus, const std::string& labels) {
  const auto records = load_corpus(corpus);
  const auto events = read_label_log(labels);
  return attach_labels(records, annotation_set_from_log(events, kGoldAnnotator));
}

StopwordList load_stopwords(const std::string& path) {
  return StopwordList::load(path.empty() ? default_stopwords_path() : fs::path(path));
}

void write_split(const Split& split, const fs::path& path) {
  std::string out = "record_id,partition\n";
  for (const auto& item : split.train) out += csv::escape(item.record.id) + ",train\n";
  for (const auto& item : split.test) out += csv::escape(item.record.id) + ",test\n";
  write_file(path, out);
}

/// Rebuilds a saved split from the labeled corpus, keeping corpus order.
Split read_split(const fs::path& path, std::span<const LabeledRecord> labeled) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || rows.front().fields != std::vector<std::string>{"record_id", "partition"}) {
    throw Error(ErrorKind::parse, path.string() + " line 1: expected header record_id,partition");
  }
  std::map<std::string, std::string> partition;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != 2 || (f[1] != "train" && f[1] != "test")) {
      throw Error(ErrorKind::parse, path.string() + " line " + std::to_string(rows[r].line) + ": bad split row");
    }
    partition[f[0]] = f[1];
  }
  Split split;
  std::size_t found = 0;
  for (const auto& item : labeled) {
    auto it = partition.find(item.record.id);
    if (it == partition.end()) continue;
    ++found;
    (it->second == "train" ? split.train : split.test).push_back(item);
  }
  if (found != partition.size()) {
    throw Error(ErrorKind::validation, path.string() + " names records missing from the labeled corpus");
  }
  return split;
}

// ---------------------------------------------------------------------------
// Shared flag groups

struct CommonFlags {
  std::uint64_t seed = 1;
  std::string out = "out";
};

struct DataFlags {
  std::string corpus;
  std::string labels;
  std::string stopwords;
};

struct ModelFlags {
  std::string mode = "two_class_threshold";
  std::string decision_rule = "score_threshold";
  double ratio = 0.8;
  PipelineOptions options;
  std::string embed_mode = "skip_gram";
  std::string lr_schedule = "linear_decay";

  PipelineOptions resolve(const DataFlags& data) const {
    PipelineOptions o = options;
    o.model.mode = parse_classifier_mode(mode);
    o.model.decision_rule = parse_decision_rule(decision_rule);
    o.model.lr_schedule = parse_lr_schedule(lr_schedule);
    if (embed_mode == "skip_gram") {
      o.embed.mode = EmbedTrainMode::skip_gram;
    } else if (embed_mode == "paper_literal") {
      o.embed.mode = EmbedTrainMode::paper_literal;
    } else {
      throw Error(ErrorKind::validation, "embed-mode must be skip_gram or paper_literal");
    }
    o.stopwords = load_stopwords(data.stopwords);
    return o;
  }
};

void add_common(CLI::App* app, CommonFlags& c) {
  app->add_option("--seed", c.seed, "Master seed; every random stream is derived from it")->capture_default_str();
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
}

void add_data(CLI::App* app, DataFlags& d, bool labels_required = true) {
  app->add_option("--corpus", d.corpus, "Corpus file (JSONL, or CSV by extension)")->required();
  auto* labels = app->add_option("--labels", d.labels, "Gold label log (CSV)");
  if (labels_required) labels->required();
  app->add_option("--stopwords", d.stopwords, "Stopword list (defaults to the bundled English list)");
}

void add_model(CLI::App* app, ModelFlags& m) {
  auto& o = m.options;
  app->add_option("--mode", m.mode, "two_class_threshold | three_class_softmax")->capture_default_str();
  app->add_option("--decision-rule", m.decision_rule, "score_threshold | embedding_centroid")->capture_default_str();
  app->add_option("--ratio", m.ratio, "Training fraction of the split")->capture_default_str();
  app->add_option("--hidden", o.model.hidden, "LSTM hidden size")->capture_default_str();
  app->add_option("--max-length", o.model.max_length, "Tokens kept per document")->capture_default_str();
  app->add_option("--epochs", o.model.epochs, "Classifier epochs")->capture_default_str();
  app->add_option("--lr", o.model.learning_rate, "Classifier learning rate")->capture_default_str();
  app->add_option("--lr-schedule", m.lr_schedule, "linear_decay | constant")->capture_default_str();
  app->add_option("--clip", o.model.clip_norm, "Gradient-norm clip")->capture_default_str();
  app->add_option("--dim", o.embed.dimension, "Embedding dimension")->capture_default_str();
  app->add_option("--window", o.embed.window, "Skip-gram context window")->capture_default_str();
  app->add_option("--negatives", o.embed.negatives, "Negative samples per pair")->capture_default_str();
  app->add_option("--embed-epochs", o.embed.epochs, "Embedding epochs")->capture_default_str();
  app->add_option("--embed-lr", o.embed.learning_rate, "Embedding learning rate")->capture_default_str();
  app->add_option("--embed-mode", m.embed_mode, "skip_gram | paper_literal")->capture_default_str();
  app->add_option("--affine-alpha", o.embed.affine_alpha, "Affine output update scale")->capture_default_str();
  app->add_option("--affine-bias", o.embed.affine_bias, "Affine output update bias")->capture_default_str();
  app->add_option("--max-iterations", o.embed.max_iterations, "Embedding update budget")->capture_default_str();
  app->add_option("--gradient-tolerance", o.embed.gradient_tolerance, "Embedding early-stop tolerance")
      ->capture_default_str();
  app->add_option("--min-count", o.min_count, "Minimum token frequency for the vocabulary")->capture_default_str();
}

// ---------------------------------------------------------------------------
// Config file: key=value lines (INI sections allowed). Values become leading
// flags of the subcommand so explicit flags, parsed later, win.

std::vector<std::string> config_args(const std::string& path, const std::string& subcommand) {
  std::vector<std::string> args;
  CLI::ConfigINI parser;
  std::vector<CLI::ConfigItem> items;
  try {
    items = parser.from_file(path);
  } catch (const CLI::FileError& e) {
    throw Error(ErrorKind::io, std::string("cannot read config ") + path + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents.front() == subcommand)) continue;
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") continue;
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// ---------------------------------------------------------------------------

struct Loaded {
  TrainedPipeline pipeline;
  Split split;
};

Loaded load_trained(const fs::path& dir, std::span<const LabeledRecord> labeled) {
  Loaded out;
  out.pipeline.model = load_model(dir / kModelFile);
  auto emb = load_embeddings(dir / kEmbeddingFile);
  out.pipeline.vocab = std::move(emb.vocab);
  out.pipeline.embeddings = std::move(emb.matrix);
  out.split = read_split(dir / kSplitFile, labeled);
  return out;
}

struct ReportRow {
  double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
};

ReportRow read_eval_report(const fs::path& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || rows.front().fields !=
                          std::vector<std::string>{"scope", "precision", "recall", "f1", "accuracy", "support"}) {
    throw Error(ErrorKind::parse, path.string() + " line 1: not an evaluation report");
  }
  ReportRow out;
  bool have_r = false, have_overall = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != 6) throw Error(ErrorKind::parse, path.string() + " line " + std::to_string(rows[r].line));
    if (f[0] == "R") {
      out.precision = std::stod(f[1]);
      out.recall = std::stod(f[2]);
      out.f1 = std::stod(f[3]);
      have_r = true;
    } else if (f[0] == "overall") {
      out.accuracy = std::stod(f[4]);
      have_overall = true;
    }
  }
  if (!have_r || !have_overall) throw Error(ErrorKind::parse, path.string() + ": missing R or overall row");
  return out;
}

std::string summary_line(const EvalReport& report) {
  const auto& pos = report.positive();
  char buf[160];
  std::snprintf(buf, sizeof buf, "accuracy=%.4f precision(R)=%.4f recall(R)=%.4f f1(R)=%.4f n=%zu", report.accuracy,
                pos.precision, pos.recall, pos.f1, report.total);
  return buf;
}

volatile std::sig_atomic_t g_interrupted = 0;
AnnotationServer* g_server = nullptr;

extern "C" void on_interrupt(int) {
  g_interrupted = 1;
  if (g_server) g_server->stop();
}

}  // namespace

int run_command(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radical-text detection toolkit", "radtext"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  CommonFlags common;
  DataFlags data;
  ModelFlags model_flags;
  std::string config_path;

  auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file; explicit flags take precedence");
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load records, drop blank or punctuation-only bodies");
  std::string ingest_input, ingest_format;
  ingest->add_option("--input", ingest_input, "Records file")->required();
  ingest->add_option("--format", ingest_format, "jsonl | csv (default: by extension)");
  add_common(ingest, common);

  // clean
  auto* clean = app.add_subcommand("clean", "Tokenize records into cleaned token sequences");
  clean->add_option("--corpus", data.corpus, "Corpus file")->required();
  clean->add_option("--stopwords", data.stopwords, "Stopword list");
  add_common(clean, common);

  // kappa
  auto* kappa = app.add_subcommand("kappa", "Cohen's kappa between two label logs");
  std::string labels_a, labels_b;
  kappa->add_option("--labels-a", labels_a, "First annotator's label log")->required();
  kappa->add_option("--labels-b", labels_b, "Second annotator's label log")->required();
  add_common(kappa, common);

  // adjudicate
  auto* adjudicate_cmd = app.add_subcommand("adjudicate", "Merge two label logs into gold labels");
  std::string policy = "drop", prefer_id;
  adjudicate_cmd->add_option("--corpus", data.corpus, "Corpus file")->required();
  adjudicate_cmd->add_option("--labels-a", labels_a, "First annotator's label log")->required();
  adjudicate_cmd->add_option("--labels-b", labels_b, "Second annotator's label log")->required();
  adjudicate_cmd->add_option("--policy", policy, "drop | prefer")->capture_default_str();
  adjudicate_cmd->add_option("--prefer", prefer_id, "Annotator id that wins disagreements under --policy prefer");
  add_common(adjudicate_cmd, common);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  SynthConfig synth_config;
  synth->add_option("--n", synth_config.n_records, "Number of records")->capture_default_str();
  synth->add_option("--mean-length", synth_config.mean_length, "Mean document length")->capture_default_str();
  synth->add_option("--shared-pool", synth_config.shared_pool, "Shared vocabulary size")->capture_default_str();
  synth->add_option("--r-markers", synth_config.r_marker_pool, "R marker pool size")->capture_default_str();
  synth->add_option("--nr-markers", synth_config.nr_marker_pool, "NR marker pool size")->capture_default_str();
  synth->add_option("--r-rate", synth_config.r_injection_rate, "R marker injection rate")->capture_default_str();
  synth->add_option("--nr-rate", synth_config.nr_injection_rate, "NR marker injection rate")->capture_default_str();
  std::vector<double> proportions{0.4, 0.4, 0.2};
  synth->add_option("--proportions", proportions, "Class proportions R,NR,I")->delimiter(',')->expected(3);
  synth->add_option("--first-year", synth_config.first_year, "First year")->capture_default_str();
  synth->add_option("--last-year", synth_config.last_year, "Last year")->capture_default_str();
  synth->add_option("--disagreement", synth_config.disagreement_rate, "Second annotator disagreement rate")
      ->capture_default_str();
  add_common(synth, common);

  // train / evaluate / baselines / sweep / msecurve
  auto* train = app.add_subcommand("train", "Train embeddings and the LSTM classifier");
  add_data(train, data);
  add_model(train, model_flags);
  add_common(train, common);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a trained model on its held-out split");
  std::string model_dir;
  add_data(evaluate_cmd, data);
  evaluate_cmd->add_option("--model-dir", model_dir, "Directory written by train (default: --out)");
  add_common(evaluate_cmd, common);

  auto* baselines = app.add_subcommand("baselines", "Train and evaluate MaxEnt, SVM and random forest on TF-IDF");
  BaselineOptions baseline_options;
  add_data(baselines, data);
  baselines->add_option("--mode", model_flags.mode, "Decides whether I records are kept")->capture_default_str();
  baselines->add_option("--ratio", model_flags.ratio, "Training fraction")->capture_default_str();
  baselines->add_flag("--sublinear-tf", baseline_options.sublinear_tf, "Use 1 + ln(tf)");
  baselines->add_option("--maxent-epochs", baseline_options.maxent.epochs)->capture_default_str();
  baselines->add_option("--maxent-lr", baseline_options.maxent.learning_rate)->capture_default_str();
  baselines->add_option("--maxent-l2", baseline_options.maxent.l2)->capture_default_str();
  baselines->add_option("--svm-lambda", baseline_options.svm.lambda)->capture_default_str();
  baselines->add_option("--svm-epochs", baseline_options.svm.epochs)->capture_default_str();
  baselines->add_option("--trees", baseline_options.forest.n_trees)->capture_default_str();
  baselines->add_option("--max-depth", baseline_options.forest.max_depth)->capture_default_str();
  baselines->add_option("--feature-fraction", baseline_options.forest.feature_fraction)->capture_default_str();
  add_common(baselines, common);

  auto* compare = app.add_subcommand("compare", "Build the model comparison table from evaluation reports");
  std::vector<std::string> eval_specs;
  compare->add_option("--eval", eval_specs, "NAME=PATH of an evaluation report (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_common(compare, common);

  auto* sweep = app.add_subcommand("sweep", "Accuracy across training-set proportions");
  std::vector<double> ratios{0.5, 0.6, 0.7, 0.8, 0.9};
  add_data(sweep, data);
  add_model(sweep, model_flags);
  sweep->add_option("--ratios", ratios, "Comma-separated training fractions")->delimiter(',');
  add_common(sweep, common);

  auto* msecurve = app.add_subcommand("msecurve", "Per-record squared error against model score");
  add_data(msecurve, data);
  msecurve->add_option("--model-dir", model_dir, "Directory written by train (default: --out)");
  add_common(msecurve, common);

  auto* trends = app.add_subcommand("trends", "Radical records per source and year");
  add_data(trends, data);
  add_common(trends, common);

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the LSTM gradients");
  std::size_t gc_seeds = 5, gc_hidden = 4, gc_length = 5, gc_dim = 3, gc_batch = 3;
  std::string gc_mode = "two_class_threshold";
  bool gc_mutate = false;
  gradcheck->add_option("--seeds", gc_seeds, "Number of derived seeds")->capture_default_str();
  gradcheck->add_option("--hidden", gc_hidden)->capture_default_str();
  gradcheck->add_option("--length", gc_length)->capture_default_str();
  gradcheck->add_option("--dim", gc_dim)->capture_default_str();
  gradcheck->add_option("--batch", gc_batch)->capture_default_str();
  gradcheck->add_option("--mode", gc_mode)->capture_default_str();
  gradcheck->add_flag("--mutate", gc_mutate, "Corrupt the backward pass; success means the check catches it");
  add_common(gradcheck, common);

  auto* serve = app.add_subcommand("serve", "Run the annotation service until interrupted");
  std::string serve_log, serve_host = "127.0.0.1", static_dir;
  std::vector<std::string> annotator_ids{kSynthAnnotatorA, kSynthAnnotatorB};
  int port = kDefaultServicePort;
  serve->add_option("--corpus", data.corpus, "Corpus to annotate")->required();
  serve->add_option("--log", serve_log, "Append-only label log (default: <out>/labels.csv)");
  serve->add_option("--annotators", annotator_ids, "Two annotator ids")->delimiter(',')->expected(2);
  serve->add_option("--host", serve_host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--static-dir", static_dir, "Console assets served at /");
  add_common(serve, common);

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) with_config(sub);

  // Expand --config before parsing. CLI11 wants arguments in reverse order.
  std::vector<std::string> args = raw_args;
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    std::size_t erase = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      erase = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      erase = 1;
    }
    if (erase == 0) continue;
    try {
      const auto extra = config_args(path, args[0]);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + erase));
      args.insert(args.begin() + 1, extra.begin(), extra.end());
    } catch (const Error& e) {
      err << "radtext: " << e.what() << "\n";
      return 1;
    }
    break;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "radtext: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  // Help requested on a subcommand is handled by CLI11 above; everything below runs a command.
  try {
    const fs::path out_dir = prepare_out(common.out);
    const fs::path trained_dir = model_dir.empty() ? out_dir : fs::path(model_dir);

    if (ingest->parsed()) {
      const auto result = ingest_records(ingest_input, format_for(ingest_input, ingest_format));
      write_jsonl(result.records, out_dir / "records.jsonl");
      out << "ingested " << result.report.rows << " rows: kept " << result.report.kept << ", dropped "
          << result.report.dropped << " -> " << (out_dir / "records.jsonl").string() << "\n";
    } else if (clean->parsed()) {
      const auto records = load_corpus(data.corpus);
      const auto stopwords = load_stopwords(data.stopwords);
      std::string text;
      std::size_t tokens = 0, empty = 0;
      for (const auto& r : records) {
        const auto seq = clean_and_tokenize(r, stopwords);
        tokens += seq.tokens.size();
        empty += seq.tokens.empty();
        text += nlohmann::json{{"id", r.id}, {"tokens", seq.tokens}}.dump() + "\n";
      }
      write_file(out_dir / "tokens.jsonl", text);
      out << "cleaned " << records.size() << " records (" << tokens << " tokens, " << empty << " empty) -> "
          << (out_dir / "tokens.jsonl").string() << "\n";
    } else if (kappa->parsed()) {
      const auto a = annotation_set_from_log(read_label_log(labels_a), "a");
      const auto b = annotation_set_from_log(read_label_log(labels_b), "b");
      const auto report = cohens_kappa(confusion_matrix(a, b));
      char buf[160];
      std::snprintf(buf, sizeof buf, "p_o,p_e,kappa,n\n%.17g,%.17g,%.17g,%llu\n", report.p_o, report.p_e,
                    report.kappa, static_cast<unsigned long long>(report.n));
      write_file(out_dir / "kappa.csv", buf);
      std::snprintf(buf, sizeof buf, "\xCE\xBA=%.4f (n=%llu, p_o=%.4f, p_e=%.4f)", report.kappa,
                    static_cast<unsigned long long>(report.n), report.p_o, report.p_e);
      out << buf << "\n";
    } else if (adjudicate_cmd->parsed()) {
      const auto records = load_corpus(data.corpus);
      const auto events_a = read_label_log(labels_a);
      const auto events_b = read_label_log(labels_b);
      const auto sets_a = replay_label_log(events_a);
      const auto sets_b = replay_label_log(events_b);
      if (sets_a.size() != 1 || sets_b.size() != 1) {
        throw Error(ErrorKind::validation, "each label log must hold exactly one annotator");
      }
      AdjudicationPolicy p;
      if (policy == "drop") {
        p = AdjudicationPolicy::drop();
      } else if (policy == "prefer") {
        if (prefer_id.empty()) throw Error(ErrorKind::validation, "--policy prefer needs --prefer ID");
        p = AdjudicationPolicy::prefer(prefer_id);
      } else {
        throw Error(ErrorKind::validation, "policy must be drop or prefer");
      }
      const auto result = adjudicate(records, sets_a.begin()->second, sets_b.begin()->second, p);
      std::vector<LabelEvent> gold;
      for (const auto& item : result.gold) gold.push_back({item.record.id, kGoldAnnotator, item.label, "adjudicated"});
      write_label_log(gold, out_dir / "gold.csv");
      std::string pairs = "label_a,label_b,count\n";
      for (std::size_t i = 0; i < result.report.pairs.size(); ++i) {
        for (std::size_t j = 0; j < result.report.pairs.size(); ++j) {
          pairs += std::string(to_string(result.report.pairs.classes[i])) + "," +
                   to_string(result.report.pairs.classes[j]) + "," +
                   std::to_string(result.report.pairs.counts[i][j]) + "\n";
        }
      }
      write_file(out_dir / "adjudication.csv", pairs);
      out << "adjudicated " << result.report.shared << " shared records: " << result.report.agreements
          << " agree, " << result.report.disagreements << " disagree; " << gold.size() << " gold -> "
          << (out_dir / "gold.csv").string() << "\n";
    } else if (synth->parsed()) {
      synth_config.seed = common.seed;
      if (proportions.size() != 3) throw Error(ErrorKind::validation, "--proportions needs three values");
      synth_config.proportions = {proportions[0], proportions[1], proportions[2]};
      const auto corpus = generate_corpus(synth_config);
      write_synth_corpus(corpus, out_dir);
      const auto quota = class_quota(synth_config.n_records, synth_config.proportions);
      out << "generated " << corpus.records.size() << " records (R=" << quota[0] << ", NR=" << quota[1]
          << ", I=" << quota[2] << ") -> " << (out_dir / "corpus.jsonl").string() << "\n";
    } else if (train->parsed()) {
      const auto options = model_flags.resolve(data);
      const auto labeled = load_labeled(data.corpus, data.labels);
      std::size_t dropped = 0;
      const auto records = usable_records(labeled, options.model.mode, options.stopwords, &dropped);
      const auto seeds = ExperimentSeeds::from(common.seed);
      const Split split = split_corpus(records, {model_flags.ratio, seeds.split, true});
      PipelineOptions seeded = options;
      seeded.embed.seed = seeds.embed;
      seeded.model.seed = seeds.model;
      const auto pipeline = train_pipeline(split.train, seeded);
      save_model(pipeline.model, out_dir / kModelFile);
      save_embeddings(pipeline.embeddings, pipeline.vocab, out_dir / kEmbeddingFile);
      write_split(split, out_dir / kSplitFile);
      std::string losses = "epoch,loss\n";
      for (std::size_t e = 0; e < pipeline.model.epoch_losses.size(); ++e) {
        losses += std::to_string(e + 1) + "," + fmt("%.9f", pipeline.model.epoch_losses[e]) + "\n";
      }
      write_file(out_dir / "train_loss.csv", losses);
      out << "trained " << to_string(options.model.mode) << " model on " << split.train.size() << " records ("
          << split.test.size() << " held out";
      if (dropped) out << ", " << dropped << " empty after cleaning dropped";
      out << ") -> " << (out_dir / kModelFile).string() << "\n";
    } else if (evaluate_cmd->parsed()) {
      const auto labeled = load_labeled(data.corpus, data.labels);
      const auto loaded = load_trained(trained_dir, labeled);
      const auto stopwords = load_stopwords(data.stopwords);
      const auto predictions = predict_records(loaded.pipeline, loaded.split.test, stopwords);
      const auto report = evaluate(predictions, loaded.split.test, mode_classes(loaded.pipeline.model.config.mode));
      write_file(out_dir / "predictions.csv", predictions_csv(predictions));
      write_eval_report(report, out_dir / "eval_report.csv");
      out << summary_line(report) << " -> " << (out_dir / "eval_report.csv").string() << "\n";
    } else if (baselines->parsed()) {
      const auto labeled = load_labeled(data.corpus, data.labels);
      const auto mode = parse_classifier_mode(model_flags.mode);
      const auto stopwords = load_stopwords(data.stopwords);
      const auto records = usable_records(labeled, mode, stopwords);
      const auto seeds = ExperimentSeeds::from(common.seed);
      const Split split = split_corpus(records, {model_flags.ratio, seeds.split, true});
      const auto runs = run_baselines(split, stopwords, baseline_options, mode_classes(mode), common.seed);
      std::vector<ComparisonRow> rows;
      for (const auto& run : runs) {
        std::string file = "eval_" + run.name + ".csv";
        std::transform(file.begin(), file.end(), file.begin(), [](unsigned char c) { return std::tolower(c); });
        write_eval_report(run.report, out_dir / file);
        rows.push_back(ComparisonRow::from_report(run.name, run.report));
        out << run.name << ": " << summary_line(run.report) << "\n";
      }
      write_file(out_dir / "baselines.csv", comparison_table(rows).csv);
      out << "baselines evaluated on " << split.test.size() << " records -> " << (out_dir / "baselines.csv").string()
          << "\n";
    } else if (compare->parsed()) {
      std::vector<std::pair<std::string, fs::path>> inputs;
      for (const auto& spec : eval_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::validation, "--eval expects NAME=PATH");
        inputs.emplace_back(spec.substr(0, eq), spec.substr(eq + 1));
      }
      if (inputs.empty()) {
        const std::pair<const char*, const char*> defaults[] = {{"LSTM", "eval_report.csv"},
                                                                {"MaxEnt", "eval_maxent.csv"},
                                                                {"SVM", "eval_svm.csv"},
                                                                {"RandomForest", "eval_randomforest.csv"}};
        for (const auto& [name, file] : defaults) {
          if (fs::exists(out_dir / file)) inputs.emplace_back(name, out_dir / file);
        }
      }
      if (inputs.empty()) throw Error(ErrorKind::validation, "no evaluation reports found; pass --eval NAME=PATH");
      std::vector<ComparisonRow> rows;
      for (const auto& [name, path] : inputs) {
        const auto r = read_eval_report(path);
        rows.push_back({name, r.precision, r.recall, r.f1, r.accuracy});
      }
      const auto table = comparison_table(rows);
      write_file(out_dir / "comparison.csv", table.csv);
      write_file(out_dir / "comparison.txt", table.text);
      out << table.text;
      out << "compared " << rows.size() << " models -> " << (out_dir / "comparison.csv").string() << "\n";
    } else if (sweep->parsed()) {
      const auto options = model_flags.resolve(data);
      const auto labeled = load_labeled(data.corpus, data.labels);
      const auto report = sweep_splits(labeled, ratios, options, common.seed);
      for (const auto& w : report.warnings) err << "warning: " << w << "\n";
      write_file(out_dir / "sweep.csv", sweep_csv(report));
      out << "swept " << report.points.size() << " ratios -> " << (out_dir / "sweep.csv").string() << "\n";
    } else if (msecurve->parsed()) {
      const auto labeled = load_labeled(data.corpus, data.labels);
      const auto loaded = load_trained(trained_dir, labeled);
      const auto stopwords = load_stopwords(data.stopwords);
      const auto predictions = predict_records(loaded.pipeline, loaded.split.test, stopwords);
      const auto points = mse_curve(loaded.pipeline.model, predictions, loaded.split.test);
      write_file(out_dir / "mse_curve.csv", mse_curve_csv(points));
      double total = 0.0;
      for (const auto& p : points) total += p.squared_error;
      out << "mse=" << fmt("%.6f", points.empty() ? 0.0 : total / static_cast<double>(points.size())) << " over "
          << points.size() << " records -> " << (out_dir / "mse_curve.csv").string() << "\n";
    } else if (trends->parsed()) {
      const auto labeled = load_labeled(data.corpus, data.labels);
      const auto points = radical_timeline(labeled);
      const auto result = render_timeline(points, out_dir);
      if (!result.emitted) {
        err << "warning: " << result.warning.value_or("nothing to render") << "\n";
        out << "no radical records; timeline not written\n";
      } else {
        out << "timeline of " << points.size() << " source-year points -> " << result.csv_path.string() << ", "
            << result.svg_path.string() << "\n";
      }
    } else if (gradcheck->parsed()) {
      ModelConfig config;
      config.hidden = gc_hidden;
      config.max_length = gc_length;
      config.mode = parse_classifier_mode(gc_mode);
      const auto fault = gc_mutate ? BackwardFault::drop_cell_carry : BackwardFault::none;
      std::string csv_text = "seed,max_relative_error,worst_tensor,parameters\n";
      double worst = 0.0;
      for (std::size_t k = 0; k < gc_seeds; ++k) {
        const std::uint64_t seed = derive_seed(common.seed, "gradcheck:" + std::to_string(k));
        config.seed = seed;
        const auto probe = make_probe(gc_dim, gc_length, gc_batch, config.mode, seed);
        const auto result = gradient_check(config, probe, fault);
        worst = std::max(worst, result.max_relative_error);
        csv_text += std::to_string(seed) + "," + fmt("%.6e", result.max_relative_error) + "," + result.worst_tensor +
                    "," + std::to_string(result.parameters_checked) + "\n";
      }
      write_file(out_dir / "gradcheck.csv", csv_text);
      const bool ok = gc_mutate ? worst > 1e-2 : worst < 1e-4;
      out << "gradcheck " << (gc_mutate ? "(mutated) " : "") << "max relative error " << fmt("%.3e", worst) << " over "
          << gc_seeds << " seeds: " << (ok ? "pass" : "FAIL") << "\n";
      return ok ? 0 : 1;
    } else if (serve->parsed()) {
      ServiceConfig config;
      config.records = load_corpus(data.corpus);
      config.annotators = {annotator_ids.at(0), annotator_ids.at(1)};
      config.log_path = serve_log.empty() ? out_dir / "labels.csv" : fs::path(serve_log);
      config.seed = common.seed;
      AnnotationService service(std::move(config));
      AnnotationServer server(service, {serve_host, port, static_dir});
      g_server = &server;
      std::signal(SIGINT, on_interrupt);
      std::signal(SIGTERM, on_interrupt);
      const int bound = server.start();
      out << "serving " << service.queue().size() << " records on http://" << serve_host << ":" << bound
          << " (log " << service.log_path().string() << ")" << std::endl;
      while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(200));
      server.stop();
      g_server = nullptr;
      out << "stopped\n";
    }
  } catch (const Error& e) {
    err << "radtext " << args[0] << ": " << to_string(e.kind()) << " error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "radtext " << args[0] << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace radtext
