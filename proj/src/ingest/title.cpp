#include <algorithm>
#include <array>
#include <cctype>

#include "wikiner/error.hpp"
#include "wikiner/ingest/page.hpp"
#include "wikiner/util/utf8.hpp"

namespace wikiner::ingest {

namespace {

constexpr std::array<std::string_view, 22> kNamespaces = {
    "category", "file",      "image",    "media",     "template",  "help",
    "special",  "wikipedia", "wp",       "project",   "portal",    "talk",
    "user",     "module",    "draft",    "mediawiki", "timedtext", "book",
    "gadget",   "topic",     "wikt",     "commons"};

constexpr std::array<std::string_view, 26> kInterwiki = {
    "wiktionary", "meta",       "m",         "s",          "wikisource",
    "q",          "wikiquote",  "b",         "wikibooks",  "n",
    "wikinews",   "v",          "wikiversity", "voy",      "wikivoyage",
    "species",    "d",          "wikidata",  "mw",         "w",
    "f",          "foundation", "incubator", "phab",       "c",
    "simple"};

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// "hi", "fr", "zh-yue", "bat-smg": a lowercase language code.
bool looks_like_language_code(std::string_view prefix) {
  std::size_t head = prefix.find('-');
  std::string_view first = prefix.substr(0, head);
  if (first.size() < 2 || first.size() > 3) return false;
  for (char c : prefix) {
    if (!(std::islower(static_cast<unsigned char>(c)) || c == '-')) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(ContentKind kind) {
  return kind == ContentKind::Html ? "html" : "wikitext";
}

ContentKind parse_content_kind(std::string_view text) {
  if (text == "html") return ContentKind::Html;
  if (text == "wikitext") return ContentKind::Wikitext;
  throw std::invalid_argument("unknown content kind: " + std::string(text));
}

std::string normalize_title(std::string_view raw, TitleSource source) {
  std::string title =
      source == TitleSource::Href ? util::percent_decode(raw) : std::string(raw);
  if (auto hash = title.find('#'); hash != std::string::npos) title.resize(hash);
  std::replace(title.begin(), title.end(), '_', ' ');
  title = util::collapse_whitespace(title);
  if (title.empty()) throw EmptyTitle("empty title: '" + std::string(raw) + "'");
  return title;
}

Namespace title_namespace(std::string_view title) {
  if (!title.empty() && title.front() == ':') title.remove_prefix(1);
  auto colon = title.find(':');
  if (colon == std::string_view::npos || colon == 0) return Namespace::Article;
  std::string_view prefix_raw = title.substr(0, colon);
  while (!prefix_raw.empty() && prefix_raw.back() == ' ') prefix_raw.remove_suffix(1);
  std::string prefix = lowercase(prefix_raw);
  if (prefix == "category") return Namespace::Category;
  if (std::find(kNamespaces.begin(), kNamespaces.end(), prefix) != kNamespaces.end()) {
    return Namespace::Other;
  }
  if (prefix.size() > 5 && prefix.ends_with(" talk")) return Namespace::Other;
  if (std::find(kInterwiki.begin(), kInterwiki.end(), prefix) != kInterwiki.end()) {
    return Namespace::Other;
  }
  if (prefix == std::string(prefix_raw) && looks_like_language_code(prefix)) {
    return Namespace::Other;
  }
  return Namespace::Article;
}

RawPage RawPage::make(std::string_view raw_title, ContentKind kind, std::string body,
                      std::optional<std::string> source_url,
                      std::optional<std::string> fetched_at) {
  RawPage page;
  page.title = normalize_title(raw_title);
  page.ns = title_namespace(page.title);
  page.kind = kind;
  page.body = std::move(body);
  page.source_url = std::move(source_url);
  page.fetched_at = std::move(fetched_at);
  return page;
}

}  // namespace wikiner::ingest
