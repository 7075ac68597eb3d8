#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace wikiner::ingest {

enum class Namespace { Article, Category, Other };
enum class ContentKind { Wikitext, Html };

std::string_view to_string(ContentKind kind);
ContentKind parse_content_kind(std::string_view text);

// Where a raw title came from. Titles taken out of an href are
// percent-decoded, wikitext titles are taken literally.
enum class TitleSource { Text, Href };

// Canonical form: fragment stripped, '_' -> ' ', whitespace trimmed and
// collapsed. Throws EmptyTitle when nothing is left.
std::string normalize_title(std::string_view raw, TitleSource source = TitleSource::Text);

// Namespace of an already-normalized title. Interwiki and interlanguage
// prefixes ("fr:", "wikt:") count as Other.
Namespace title_namespace(std::string_view title);

struct RawPage {
  std::string title;
  Namespace ns = Namespace::Article;
  ContentKind kind = ContentKind::Wikitext;
  std::string body;
  std::optional<std::string> source_url;
  std::optional<std::string> fetched_at;

  // Normalizes `raw_title` and derives the namespace from it.
  static RawPage make(std::string_view raw_title, ContentKind kind, std::string body,
                      std::optional<std::string> source_url = std::nullopt,
                      std::optional<std::string> fetched_at = std::nullopt);
};

struct WikiLink {
  std::string source_title;
  std::string target_title;
  std::string anchor_text;
  std::size_t position_index = 0;

  bool operator==(const WikiLink&) const = default;
};

struct LinkExtraction {
  std::vector<WikiLink> links;
  // Malformed or unparseable regions that were skipped.
  std::size_t warnings = 0;
};

LinkExtraction parse_wikitext_links(const RawPage& page);
LinkExtraction parse_html_links(const RawPage& page);
// Dispatches on page.kind.
LinkExtraction parse_links(const RawPage& page);

void to_json(nlohmann::ordered_json& j, const WikiLink& link);
void from_json(const nlohmann::ordered_json& j, WikiLink& link);

std::string links_to_jsonl(const std::vector<WikiLink>& links);
std::vector<WikiLink> links_from_jsonl(std::string_view text);

}  // namespace wikiner::ingest
