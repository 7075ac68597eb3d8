#include "wikiner/ingest/fetch.hpp"

#include <curl/curl.h>

#include <algorithm>
#include <cctype>
#include <thread>

#include "wikiner/error.hpp"
#include "wikiner/util/files.hpp"
#include "wikiner/util/hash.hpp"
#include "wikiner/util/time.hpp"
#include "wikiner/util/utf8.hpp"

namespace wikiner::ingest {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) { return util::collapse_whitespace(s); }

std::string url_encode_title(std::string_view title) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : std::string(title)) {
    if (c == ' ') {
      out.push_back('_');
    } else if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~' ||
               c == ':' || c == '(' || c == ')' || c == ',') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::size_t write_callback(char* data, std::size_t size, std::size_t n, void* user) {
  static_cast<std::string*>(user)->append(data, size * n);
  return size * n;
}

}  // namespace

std::string seed_to_title(std::string_view entry) {
  std::string_view s = entry;
  if (s.starts_with("http://") || s.starts_with("https://")) {
    if (auto q = s.find("title="); q != std::string_view::npos) {
      std::string_view rest = s.substr(q + 6);
      return normalize_title(rest.substr(0, rest.find('&')), TitleSource::Href);
    }
    auto wiki = s.find("/wiki/");
    if (wiki == std::string_view::npos) {
      throw EmptyTitle("cannot find a page title in URL: " + std::string(entry));
    }
    std::string_view rest = s.substr(wiki + 6);
    return normalize_title(rest.substr(0, rest.find('?')), TitleSource::Href);
  }
  return normalize_title(s);
}

std::vector<std::string> parse_seed_list(std::string_view text) {
  std::vector<std::string> titles;
  for (const auto& raw : util::split_lines(text)) {
    std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::string title = seed_to_title(line);
    if (std::find(titles.begin(), titles.end(), title) == titles.end()) {
      titles.push_back(std::move(title));
    }
  }
  return titles;
}

PageCache::PageCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path PageCache::path_for(std::string_view title) const {
  return dir_ / (util::sha256_hex(normalize_title(title)) + ".page");
}

std::optional<RawPage> PageCache::load(std::string_view title) const {
  fs::path path = path_for(title);
  if (!fs::exists(path)) return std::nullopt;
  return deserialize(util::read_file(path));
}

void PageCache::store(const RawPage& page) const {
  fs::create_directories(dir_);
  util::write_file_atomic(path_for(page.title), serialize(page));
}

std::string PageCache::serialize(const RawPage& page) {
  std::string out;
  out += "title: " + page.title + "\n";
  out += "kind: " + std::string(to_string(page.kind)) + "\n";
  out += "url: " + page.source_url.value_or("") + "\n";
  out += "fetched_at: " + page.fetched_at.value_or("") + "\n";
  out += "\n";
  out += page.body;
  return out;
}

RawPage PageCache::deserialize(std::string_view text) {
  std::string title, kind = "wikitext", url, fetched_at;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (true) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) throw ParseError(line_no + 1, "page header not terminated");
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) break;
    auto colon = line.find(": ");
    std::string_view key = line.substr(0, colon);
    std::string value = colon == std::string_view::npos ? "" : std::string(line.substr(colon + 2));
    if (key == "title") title = value;
    else if (key == "kind") kind = value;
    else if (key == "url") url = value;
    else if (key == "fetched_at") fetched_at = value;
    else throw ParseError(line_no, "unknown page header field '" + std::string(key) + "'");
  }
  return RawPage::make(title, parse_content_kind(kind), std::string(text.substr(pos)),
                       url.empty() ? std::nullopt : std::optional(url),
                       fetched_at.empty() ? std::nullopt : std::optional(fetched_at));
}

CurlTransport::CurlTransport() { curl_global_init(CURL_GLOBAL_DEFAULT); }

CurlTransport::~CurlTransport() { curl_global_cleanup(); }

HttpResponse CurlTransport::get(const std::string& url) {
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(),
                                                          &curl_easy_cleanup);
  if (!curl) throw NetworkError("curl_easy_init failed");
  HttpResponse response;
  curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT, 30L);
  curl_easy_setopt(curl.get(), CURLOPT_USERAGENT, "wikiner/0.1 (NER corpus builder)");
  curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, write_callback);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &response.body);
  CURLcode rc = curl_easy_perform(curl.get());
  if (rc != CURLE_OK) throw NetworkError(url + ": " + curl_easy_strerror(rc));
  long status = 0;
  curl_easy_getinfo(curl.get(), CURLINFO_RESPONSE_CODE, &status);
  response.status = static_cast<int>(status);
  return response;
}

PageFetcher::PageFetcher(PageCache cache, std::shared_ptr<HttpTransport> transport,
                         FetchOptions options)
    : cache_(std::move(cache)), transport_(std::move(transport)), options_(std::move(options)) {
  if (options_.politeness_delay < std::chrono::milliseconds(500)) {
    throw std::invalid_argument("politeness delay must be at least 500 ms");
  }
  if (options_.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
}

std::string PageFetcher::url_for(std::string_view title) const {
  std::string encoded = url_encode_title(normalize_title(title));
  if (options_.kind == ContentKind::Html) return options_.base_url + "/wiki/" + encoded;
  return options_.base_url + "/w/index.php?title=" + encoded + "&action=raw";
}

void PageFetcher::wait_for_slot() {
  auto now = std::chrono::steady_clock::now();
  if (last_request_) {
    auto ready = *last_request_ + options_.politeness_delay;
    if (now < ready) std::this_thread::sleep_until(ready);
  }
  last_request_ = std::chrono::steady_clock::now();
}

RawPage PageFetcher::fetch(std::string_view raw_title) {
  std::string title = normalize_title(raw_title);
  std::lock_guard lock(mutex_);
  if (auto cached = cache_.load(title)) return *std::move(cached);
  if (!options_.online || !transport_) {
    throw NetworkError("'" + title + "' is not cached and network access is disabled");
  }

  std::string url = url_for(title);
  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    wait_for_slot();
    ++requests_;
    HttpResponse response;
    try {
      response = transport_->get(url);
    } catch (const NetworkError& e) {
      last_error = e.what();
      continue;
    }
    if (response.status == 404) throw PageMissing("no such page: " + title, {title});
    if (response.status >= 500 || response.status == 429) {
      last_error = url + ": HTTP " + std::to_string(response.status);
      continue;
    }
    if (response.status != 200) {
      throw NetworkError(url + ": HTTP " + std::to_string(response.status));
    }
    if (response.body.empty()) throw PageMissing("empty page: " + title, {title});
    RawPage page = RawPage::make(title, options_.kind, std::move(response.body), url,
                                 util::utc_timestamp_now());
    cache_.store(page);
    return page;
  }
  throw NetworkError("giving up after " + std::to_string(options_.max_attempts) +
                     " attempts: " + last_error);
}

}  // namespace wikiner::ingest
