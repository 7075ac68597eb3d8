#include <string>

#include "wikiner/error.hpp"
#include "wikiner/ingest/page.hpp"
#include "wikiner/util/utf8.hpp"

namespace wikiner::ingest {

namespace {

bool starts_with_at(std::string_view s, std::size_t i, std::string_view prefix) {
  return s.substr(i, prefix.size()) == prefix;
}

bool starts_with_ci(std::string_view s, std::size_t i, std::string_view prefix) {
  if (i + prefix.size() > s.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    char a = s[i + k];
    if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
    if (a != prefix[k]) return false;
  }
  return true;
}

// Index one past the end of the `close` marker, or npos.
std::size_t skip_past(std::string_view s, std::size_t from, std::string_view close) {
  auto at = s.find(close, from);
  return at == std::string_view::npos ? at : at + close.size();
}

// End of a balanced {{ ... }} starting at `i`, or npos when unbalanced.
std::size_t template_end(std::string_view s, std::size_t i) {
  int depth = 0;
  while (i < s.size()) {
    if (starts_with_at(s, i, "{{")) {
      ++depth;
      i += 2;
    } else if (starts_with_at(s, i, "}}")) {
      --depth;
      i += 2;
      if (depth == 0) return i;
    } else {
      ++i;
    }
  }
  return std::string_view::npos;
}

// End of a [[ ... ]] starting at `i` (one past the closing brackets).
// Nested links are balanced; a newline at depth 1 makes the link malformed.
std::size_t link_end(std::string_view s, std::size_t i) {
  int depth = 0;
  while (i < s.size()) {
    if (starts_with_at(s, i, "[[")) {
      ++depth;
      i += 2;
    } else if (starts_with_at(s, i, "]]")) {
      --depth;
      i += 2;
      if (depth == 0) return i;
    } else {
      if (s[i] == '\n' && depth == 1) return std::string_view::npos;
      ++i;
    }
  }
  return std::string_view::npos;
}

bool has_invalid_title_chars(std::string_view target) {
  return target.find_first_of("<>[]{}\n") != std::string_view::npos;
}

// Display text of a piped link: bold/italic quote runs and inline tags removed.
std::string clean_anchor(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\'' && i + 1 < raw.size() && raw[i + 1] == '\'') {
      while (i + 1 < raw.size() && raw[i + 1] == '\'') ++i;
      continue;
    }
    if (raw[i] == '<') {
      auto close = raw.find('>', i);
      if (close != std::string_view::npos) {
        i = close;
        continue;
      }
    }
    out.push_back(raw[i]);
  }
  return util::collapse_whitespace(out);
}

// MediaWiki "pipe trick": [[Delhi (city)|]] displays as "Delhi".
std::string pipe_trick(const std::string& target) {
  std::string shown = target;
  if (shown.ends_with(")")) {
    if (auto open = shown.rfind(" ("); open != std::string::npos) shown.resize(open);
  } else if (auto comma = shown.find(", "); comma != std::string::npos) {
    shown.resize(comma);
  }
  return shown;
}

}  // namespace

LinkExtraction parse_wikitext_links(const RawPage& page) {
  LinkExtraction result;
  std::string_view body = page.body;
  std::size_t i = 0;
  while (i < body.size()) {
    if (starts_with_at(body, i, "<!--")) {
      i = skip_past(body, i + 4, "-->");
      if (i == std::string_view::npos) break;
      continue;
    }
    if (starts_with_ci(body, i, "<nowiki>")) {
      std::size_t close = body.find("</nowiki>", i);
      if (close == std::string_view::npos) {
        ++result.warnings;
        i += 8;
      } else {
        i = close + 9;
      }
      continue;
    }
    if (starts_with_at(body, i, "{{")) {
      std::size_t end = template_end(body, i);
      if (end == std::string_view::npos) {
        ++result.warnings;
        i += 2;
      } else {
        i = end;
      }
      continue;
    }
    if (!starts_with_at(body, i, "[[")) {
      ++i;
      continue;
    }

    std::size_t end = link_end(body, i);
    if (end == std::string_view::npos) {
      ++result.warnings;
      i += 2;
      continue;
    }
    std::string_view inner = body.substr(i + 2, end - i - 4);
    std::size_t pipe = inner.find('|');
    std::string_view raw_target = inner.substr(0, pipe);
    bool nested = inner.find("[[") != std::string_view::npos;

    std::string_view target_view = raw_target;
    while (!target_view.empty() && target_view.front() == ' ') target_view.remove_prefix(1);
    // [[:Delhi]] and [[:Category:X]] link without the colon's side effects.
    if (!target_view.empty() && target_view.front() == ':') target_view.remove_prefix(1);

    std::string target;
    try {
      target = normalize_title(target_view);
    } catch (const EmptyTitle&) {
      // [[#Section]] is a self-link; anything else empty is malformed.
      if (target_view.find('#') == std::string_view::npos) ++result.warnings;
      i = end;
      continue;
    }
    if (title_namespace(target) != Namespace::Article) {
      // File/category syntax, including any captions, is not descended into.
      i = end;
      continue;
    }
    if (nested || has_invalid_title_chars(raw_target)) {
      ++result.warnings;
      i += 2;
      continue;
    }

    std::string anchor;
    if (pipe == std::string_view::npos) {
      anchor = target;
    } else {
      anchor = clean_anchor(inner.substr(pipe + 1));
      if (anchor.empty()) anchor = pipe_trick(target);
    }
    result.links.push_back(WikiLink{page.title, std::move(target), std::move(anchor),
                                    result.links.size()});
    i = end;
  }
  return result;
}

LinkExtraction parse_links(const RawPage& page) {
  return page.kind == ContentKind::Html ? parse_html_links(page)
                                        : parse_wikitext_links(page);
}

}  // namespace wikiner::ingest
