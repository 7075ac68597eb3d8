#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "wikiner/annotation/service.hpp"

namespace wikiner::annotation {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  // Where /api/finalize writes corpus.tsv; empty skips writing.
  std::filesystem::path corpus_path;
  // Served at / when set (the browser UI bundle).
  std::optional<std::filesystem::path> static_dir;
};

// HTTP status for a domain error code; 500 for unknown codes.
int http_status_for(const std::string& error_code);

class AnnotationServer {
 public:
  AnnotationServer(AnnotationService& service, ServerOptions options);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds the socket and returns the port actually bound.
  int bind();
  // Serves until stop(); call bind() first.
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wikiner::annotation
