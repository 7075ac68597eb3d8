#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wikiner/ingest/page.hpp"

namespace wikiner::ingest {

// Seed list: one title or URL per line, '#' starts a comment line.
// Returns normalized titles in file order, duplicates removed.
std::vector<std::string> parse_seed_list(std::string_view text);

// Title from a seed entry: "https://en.wikipedia.org/wiki/Category:X",
// ".../w/index.php?title=X" or a bare title.
std::string seed_to_title(std::string_view entry);

// On-disk page cache: pages/<sha256(title)>.page, a short header then the body.
class PageCache {
 public:
  explicit PageCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(std::string_view title) const;
  std::optional<RawPage> load(std::string_view title) const;
  void store(const RawPage& page) const;

  static std::string serialize(const RawPage& page);
  static RawPage deserialize(std::string_view text);

 private:
  std::filesystem::path dir_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Throws NetworkError when no HTTP response was obtained.
  virtual HttpResponse get(const std::string& url) = 0;
};

// libcurl-backed transport.
class CurlTransport : public HttpTransport {
 public:
  CurlTransport();
  ~CurlTransport() override;
  HttpResponse get(const std::string& url) override;
};

struct FetchOptions {
  std::chrono::milliseconds politeness_delay{1000};
  int max_attempts = 3;
  ContentKind kind = ContentKind::Wikitext;
  std::string base_url = "https://en.wikipedia.org";
  bool online = false;
};

// Cache-first page fetcher. Requests are serialized and spaced at least
// `politeness_delay` apart; a title is fetched at most once.
class PageFetcher {
 public:
  PageFetcher(PageCache cache, std::shared_ptr<HttpTransport> transport,
              FetchOptions options);

  RawPage fetch(std::string_view title);
  std::string url_for(std::string_view title) const;
  std::size_t network_requests() const { return requests_; }

 private:
  void wait_for_slot();

  PageCache cache_;
  std::shared_ptr<HttpTransport> transport_;
  FetchOptions options_;
  std::mutex mutex_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
  std::size_t requests_ = 0;
};

}  // namespace wikiner::ingest
