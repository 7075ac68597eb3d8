#include "wikiner/annotation/server.hpp"

#include <map>

#include "httplib.h"
#include "wikiner/error.hpp"

namespace wikiner::annotation {

namespace {

using nlohmann::ordered_json;

// Malformed request (bad JSON, missing field).
struct BadRequest : Error {
  explicit BadRequest(const std::string& message) : Error("BadRequest", message) {}
};

void send_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status_for(e.code()),
            {{"code", e.code()}, {"message", e.what()}, {"details", e.details()}});
}

ordered_json parse_body(const httplib::Request& req) {
  try {
    auto j = ordered_json::parse(req.body);
    if (!j.is_object()) throw BadRequest("request body must be a JSON object");
    return j;
  } catch (const ordered_json::parse_error& e) {
    throw BadRequest(std::string("malformed JSON body: ") + e.what());
  }
}

std::string string_field(const ordered_json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end() || !it->is_string()) {
    throw BadRequest(std::string("missing string field '") + name + "'");
  }
  return it->get<std::string>();
}

// Body field first, then the X-Annotator header.
std::string annotator_of(const httplib::Request& req, const ordered_json* body) {
  if (body && body->contains("annotator")) return string_field(*body, "annotator");
  if (req.has_param("annotator")) return req.get_param_value("annotator");
  if (req.has_header("X-Annotator")) return req.get_header_value("X-Annotator");
  throw BadRequest("no annotator given (field, query parameter or X-Annotator header)");
}

ordered_json task_json(const EntityRecord& r, const Progress& progress, const std::string& annotator) {
  ordered_json j = r;
  j.erase("annotations");
  j.erase("final_label");
  for (const auto& a : progress.annotators) {
    if (a.annotator == annotator) j["progress"] = {{"labeled", a.labeled}, {"total", progress.total}};
  }
  return j;
}

ordered_json event_ack(const AnnotationEvent& e) {
  ordered_json j = {{"ok", true}};
  j["event"] = event_to_json(e);
  return j;
}

}  // namespace

int http_status_for(const std::string& code) {
  static const std::map<std::string, int> table = {
      {"BadRequest", 400},         {"InvalidLabel", 400},    {"ParseError", 400},
      {"UnknownAnnotator", 404},   {"UnknownEntity", 404},   {"NotEnoughAnnotators", 409},
      {"NotDisagreed", 409},       {"Unresolved", 409},      {"UnlabeledRecord", 409},
  };
  auto it = table.find(code);
  return it == table.end() ? 500 : it->second;
}

struct AnnotationServer::Impl {
  AnnotationService& service;
  ServerOptions options;
  httplib::Server http;

  Impl(AnnotationService& s, ServerOptions o) : service(s), options(std::move(o)) { routes(); }

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_json(res, 500, {{"code", "InternalError"}, {"message", e.what()}, {"details", ordered_json::array()}});
      }
    };
  }

  void routes() {
    http.Get("/api/tasks/next", guarded([this](const auto& req, auto& res) {
      const auto annotator = annotator_of(req, nullptr);
      auto task = service.next_task(annotator);
      if (!task) {
        res.status = 204;
        return;
      }
      send_json(res, 200, task_json(*task, service.progress(), annotator));
    }));
    http.Post("/api/labels", guarded([this](const auto& req, auto& res) {
      auto body = parse_body(req);
      auto e = service.submit_label(annotator_of(req, &body), string_field(body, "entity_id"),
                                    string_field(body, "label"));
      send_json(res, 200, event_ack(e));
    }));
    http.Get("/api/progress", guarded([this](const auto&, auto& res) {
      send_json(res, 200, progress_to_json(service.progress()));
    }));
    http.Get("/api/agreement", guarded([this](const auto&, auto& res) {
      send_json(res, 200, agreement_to_json(service.agreement()));
    }));
    http.Get("/api/disagreements", guarded([this](const auto&, auto& res) {
      send_json(res, 200, disagreements_to_json(service.open_disagreements()));
    }));
    http.Post("/api/adjudications", guarded([this](const auto& req, auto& res) {
      auto body = parse_body(req);
      auto e = service.adjudicate(string_field(body, "entity_id"), string_field(body, "label"));
      send_json(res, 200, event_ack(e));
    }));
    http.Post("/api/finalize", guarded([this](const auto&, auto& res) {
      auto records = service.finalize();
      ordered_json counts = ordered_json::object();
      for (auto label : corpus::kAllLabels) {
        counts[std::string(corpus::to_string(label))] = std::count_if(
            records.begin(), records.end(), [&](const auto& r) { return r.final_label == label; });
      }
      ordered_json j = {{"ok", true}, {"entities", records.size()}, {"class_counts", counts}};
      if (!options.corpus_path.empty()) {
        corpus::write_corpus(options.corpus_path, records, corpus::CorpusFormat::Tsv);
        j["path"] = options.corpus_path.filename().string();
      }
      send_json(res, 200, j);
    }));
    http.Get("/api/export", guarded([this](const auto& req, auto& res) {
      const std::string fmt = req.has_param("format") ? req.get_param_value("format") : "tsv";
      corpus::CorpusFormat format;
      try {
        format = corpus::parse_corpus_format(fmt);
      } catch (const std::exception&) {
        throw BadRequest("format must be tsv or jsonl");
      }
      auto records = service.finalize();
      res.status = 200;
      res.set_content(corpus::export_corpus(records, format),
                      format == corpus::CorpusFormat::Tsv ? "text/tab-separated-values; charset=utf-8"
                                                          : "application/x-ndjson");
    }));
    if (options.static_dir) http.set_mount_point("/", options.static_dir->string());
  }
};

AnnotationServer::AnnotationServer(AnnotationService& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    o.port = impl_->http.bind_to_any_port(o.host);
    if (o.port < 0) throw std::runtime_error("cannot bind " + o.host);
  } else if (!impl_->http.bind_to_port(o.host, o.port)) {
    throw std::runtime_error("cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return o.port;
}

void AnnotationServer::listen() { impl_->http.listen_after_bind(); }

void AnnotationServer::stop() {
  if (impl_) impl_->http.stop();
}

void AnnotationServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace wikiner::annotation
