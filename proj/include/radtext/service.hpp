#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "radtext/annotation.hpp"
#include "radtext/corpus.hpp"

namespace radtext {

/// Shown alongside every record served to an annotator.
extern const char* const kAnnotationGuideline;

inline constexpr int kDefaultServicePort = 8731;

struct ServiceConfig {
  std::vector<Record> records;
  std::array<std::string, 2> annotators{"annotator_a", "annotator_b"};
  std::filesystem::path log_path;
  std::uint64_t seed = 1;
  /// Timestamp source for new events; defaults to UTC wall-clock time.
  std::function<std::string()> clock;
};

struct AnnotatorProgress {
  std::string annotator_id;
  std::size_t labeled = 0;
  std::size_t total = 0;

  double percent() const { return total == 0 ? 100.0 : 100.0 * static_cast<double>(labeled) / static_cast<double>(total); }
  friend bool operator==(const AnnotatorProgress&, const AnnotatorProgress&) = default;
};

struct ServiceProgress {
  std::vector<AnnotatorProgress> annotators;
  std::size_t co_labeled = 0;  // records labeled by both annotators

  friend bool operator==(const ServiceProgress&, const ServiceProgress&) = default;
};

/// Thread-safe annotation state backed by an append-only label log. Existing
/// log contents are replayed on construction.
class AnnotationService {
 public:
  explicit AnnotationService(ServiceConfig config);

  /// First record in the shared queue this annotator has not labeled; nullopt
  /// when done. Throws Error(not_found) for an unknown annotator.
  std::optional<Record> next(const std::string& annotator) const;

  /// Appends the event to the log, then applies it. Invalid label text is
  /// Error(validation); unknown record or annotator is Error(not_found).
  AnnotatorProgress submit(const std::string& record_id, const std::string& annotator, const std::string& label);

  /// Kappa over co-labeled records; nullopt when there is no overlap or kappa is undefined.
  std::optional<KappaReport> kappa() const;

  AnnotatorProgress progress(const std::string& annotator) const;
  ServiceProgress progress() const;

  const std::array<std::string, 2>& annotators() const { return config_.annotators; }
  const std::vector<std::string>& queue() const { return queue_; }
  const std::filesystem::path& log_path() const { return config_.log_path; }

 private:
  std::size_t annotator_slot(const std::string& annotator) const;
  void apply(const LabelEvent& event);

  ServiceConfig config_;
  std::map<std::string, const Record*> by_id_;
  std::vector<std::string> queue_;
  std::array<std::map<std::string, Label>, 2> labels_;
  mutable std::mutex mutex_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = kDefaultServicePort;  // 0 picks a free port
  std::filesystem::path static_dir;  // console assets served at GET /
};

/// HTTP front end: GET /api/next, POST /api/label, GET /api/kappa,
/// GET /api/progress and GET / for static assets.
class AnnotationServer {
 public:
  AnnotationServer(AnnotationService& service, ServerOptions options);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  /// Binds and serves on a background thread. Returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ServerOptions options_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace radtext
