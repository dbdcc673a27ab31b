#include "radtext/service.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "radtext/error.hpp"
#include "radtext/rng.hpp"

namespace radtext {

const char* const kAnnotationGuideline =
    "Read the whole record before choosing a label. "
    "R: the text promotes or endorses radical views. "
    "NR: the text is not radical, including neutral reporting about radical events. "
    "I: the text is off-topic or does not give enough to decide.";

namespace {

using nlohmann::json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json progress_json(const AnnotatorProgress& p) {
  return {{"annotator", p.annotator_id}, {"labeled", p.labeled}, {"total", p.total}, {"percent", p.percent()}};
}

json record_json(const Record& r) {
  return {{"id", r.id},
          {"title", r.title},
          {"body", r.body},
          {"source_name", r.source_name},
          {"source_type", to_string(r.source_type)},
          {"date", to_string(r.date)}};
}

}  // namespace

AnnotationService::AnnotationService(ServiceConfig config) : config_(std::move(config)) {
  if (config_.annotators[0].empty() || config_.annotators[1].empty() ||
      config_.annotators[0] == config_.annotators[1]) {
    throw Error(ErrorKind::validation, "the service needs two distinct, non-empty annotator ids");
  }
  if (config_.log_path.empty()) throw Error(ErrorKind::validation, "the service needs a label log path");
  if (!config_.clock) config_.clock = utc_now;
  for (const auto& r : config_.records) {
    if (!by_id_.emplace(r.id, &r).second) throw Error(ErrorKind::validation, "duplicate record id " + r.id);
    queue_.push_back(r.id);
  }
  Rng rng(derive_seed(config_.seed, "service.queue"));
  rng.shuffle(queue_);

  std::error_code ec;
  if (std::filesystem::exists(config_.log_path, ec) && std::filesystem::file_size(config_.log_path, ec) > 0) {
    for (const auto& event : read_label_log(config_.log_path)) {
      if (!by_id_.count(event.record_id)) {
        throw Error(ErrorKind::validation, "label log names unknown record " + event.record_id);
      }
      if (event.annotator_id != config_.annotators[0] && event.annotator_id != config_.annotators[1]) {
        throw Error(ErrorKind::validation, "label log names unknown annotator " + event.annotator_id);
      }
      apply(event);
    }
  }
}

std::size_t AnnotationService::annotator_slot(const std::string& annotator) const {
  for (std::size_t i = 0; i < 2; ++i) {
    if (config_.annotators[i] == annotator) return i;
  }
  throw Error(ErrorKind::not_found, "unknown annotator '" + annotator + "'");
}

void AnnotationService::apply(const LabelEvent& event) {
  labels_[annotator_slot(event.annotator_id)][event.record_id] = event.label;
}

std::optional<Record> AnnotationService::next(const std::string& annotator) const {
  const std::size_t slot = annotator_slot(annotator);
  std::lock_guard lock(mutex_);
  for (const auto& id : queue_) {
    if (!labels_[slot].count(id)) return *by_id_.at(id);
  }
  return std::nullopt;
}

AnnotatorProgress AnnotationService::submit(const std::string& record_id, const std::string& annotator,
                                            const std::string& label) {
  const auto parsed = try_parse_label(label);
  if (!parsed) throw Error(ErrorKind::validation, "label must be one of R, NR, I (got '" + label + "')");
  const std::size_t slot = annotator_slot(annotator);
  if (!by_id_.count(record_id)) throw Error(ErrorKind::not_found, "unknown record '" + record_id + "'");
  std::lock_guard lock(mutex_);
  const LabelEvent event{record_id, annotator, *parsed, config_.clock()};
  append_label_event(event, config_.log_path);
  labels_[slot][record_id] = event.label;
  return {annotator, labels_[slot].size(), queue_.size()};
}

std::optional<KappaReport> AnnotationService::kappa() const {
  AnnotationSet a{config_.annotators[0], {}};
  AnnotationSet b{config_.annotators[1], {}};
  {
    std::lock_guard lock(mutex_);
    a.labels = labels_[0];
    b.labels = labels_[1];
  }
  try {
    return cohens_kappa(confusion_matrix(a, b));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::empty_overlap || e.kind() == ErrorKind::undefined_kappa) return std::nullopt;
    throw;
  }
}

AnnotatorProgress AnnotationService::progress(const std::string& annotator) const {
  const std::size_t slot = annotator_slot(annotator);
  std::lock_guard lock(mutex_);
  return {annotator, labels_[slot].size(), queue_.size()};
}

ServiceProgress AnnotationService::progress() const {
  std::lock_guard lock(mutex_);
  ServiceProgress out;
  for (std::size_t i = 0; i < 2; ++i) out.annotators.push_back({config_.annotators[i], labels_[i].size(), queue_.size()});
  for (const auto& [id, label] : labels_[0]) out.co_labeled += labels_[1].count(id);
  return out;
}

// ---------------------------------------------------------------------------

struct AnnotationServer::Impl {
  httplib::Server server;
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>radtext annotation</title></head>"
    "<body><h1>radtext annotation service</h1><p>No console assets configured. "
    "The JSON API is available under /api/.</p></body></html>";

}  // namespace

AnnotationServer::AnnotationServer(AnnotationService& service, ServerOptions options)
    : impl_(std::make_unique<Impl>()), options_(std::move(options)) {
  auto& svr = impl_->server;

  // Same-origin only: no CORS headers are ever sent, and requests carrying a
  // foreign Origin are refused outright.
  svr.set_pre_routing_handler([](const httplib::Request& req, httplib::Response& res) {
    if (req.has_header("Origin")) {
      const std::string origin = req.get_header_value("Origin");
      const std::string host = req.get_header_value("Host");
      if (origin != "http://" + host) {
        send_error(res, 403, "cross-origin requests are not allowed");
        return httplib::Server::HandlerResponse::Handled;
      }
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      const int status = e.kind() == ErrorKind::not_found ? 404 : e.kind() == ErrorKind::validation ? 400 : 500;
      send_error(res, status, e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, std::string("malformed JSON: ") + e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  });

  svr.Get("/api/next", [&service](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("annotator")) return send_error(res, 400, "missing annotator parameter");
    const std::string annotator = req.get_param_value("annotator");
    const auto record = service.next(annotator);
    json body{{"progress", progress_json(service.progress(annotator))}};
    if (record) {
      body["done"] = false;
      body["record"] = record_json(*record);
      body["guideline"] = kAnnotationGuideline;
    } else {
      body["done"] = true;
    }
    send_json(res, 200, body);
  });

  svr.Post("/api/label", [&service](const httplib::Request& req, httplib::Response& res) {
    const json in = json::parse(req.body);
    if (!in.is_object() || !in.contains("record_id") || !in.contains("annotator") || !in.contains("label") ||
        !in["record_id"].is_string() || !in["annotator"].is_string() || !in["label"].is_string()) {
      return send_error(res, 400, "body must be an object with string fields record_id, annotator, label");
    }
    const auto progress = service.submit(in["record_id"].get<std::string>(), in["annotator"].get<std::string>(),
                                         in["label"].get<std::string>());
    send_json(res, 200, {{"ok", true}, {"progress", progress_json(progress)}});
  });

  svr.Get("/api/kappa", [&service](const httplib::Request&, httplib::Response& res) {
    const auto progress = service.progress();
    const auto report = service.kappa();
    if (!report) {
      return send_json(res, 200, {{"status", "insufficient_data"}, {"co_labeled", progress.co_labeled}});
    }
    send_json(res, 200,
              {{"status", "ok"}, {"kappa", report->kappa}, {"p_o", report->p_o}, {"p_e", report->p_e}, {"n", report->n}});
  });

  svr.Get("/api/progress", [&service](const httplib::Request&, httplib::Response& res) {
    const auto progress = service.progress();
    json annotators = json::array();
    for (const auto& p : progress.annotators) annotators.push_back(progress_json(p));
    send_json(res, 200, {{"annotators", annotators}, {"co_labeled", progress.co_labeled}});
  });

  std::error_code ec;
  if (!options_.static_dir.empty() && std::filesystem::is_directory(options_.static_dir, ec)) {
    svr.set_mount_point("/", options_.static_dir.string());
  } else {
    svr.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
    });
  }
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::start() {
  auto& svr = impl_->server;
  if (options_.port == 0) {
    port_ = svr.bind_to_any_port(options_.host);
    if (port_ < 0) throw Error(ErrorKind::io, "cannot bind " + options_.host);
  } else {
    if (!svr.bind_to_port(options_.host, options_.port)) {
      throw Error(ErrorKind::io, "cannot bind " + options_.host + ":" + std::to_string(options_.port));
    }
    port_ = options_.port;
  }
  thread_ = std::thread([&svr] { svr.listen_after_bind(); });
  svr.wait_until_ready();
  return port_;
}

void AnnotationServer::run() {
  auto& svr = impl_->server;
  port_ = options_.port;
  if (!svr.bind_to_port(options_.host, options_.port)) {
    throw Error(ErrorKind::io, "cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  svr.listen_after_bind();
}

void AnnotationServer::stop() {
  if (impl_) impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace radtext
