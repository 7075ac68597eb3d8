#include <cctype>
#include <map>
#include <string>

#include "wikiner/error.hpp"
#include "wikiner/ingest/page.hpp"
#include "wikiner/util/utf8.hpp"

namespace wikiner::ingest {

namespace {

char lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool starts_with_ci(std::string_view s, std::size_t i, std::string_view prefix) {
  if (i + prefix.size() > s.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (lower(s[i + k]) != prefix[k]) return false;
  }
  return true;
}

std::size_t find_ci(std::string_view s, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= s.size(); ++i) {
    if (starts_with_ci(s, i, needle)) return i;
  }
  return std::string_view::npos;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

// "<tag" followed by whitespace, '>' or '/'.
bool opens_tag(std::string_view s, std::size_t i, std::string_view name) {
  if (s[i] != '<' || !starts_with_ci(s, i + 1, name)) return false;
  std::size_t after = i + 1 + name.size();
  return after < s.size() && (is_space(s[after]) || s[after] == '>' || s[after] == '/');
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  static const std::map<std::string, std::string, std::less<>> kNamed = {
      {"amp", "&"},       {"lt", "<"},        {"gt", ">"},
      {"quot", "\""},     {"apos", "'"},      {"nbsp", " "},
      {"ndash", "–"}, {"mdash", "—"}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    std::string_view name = s.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
      unsigned long cp = 0;
      bool ok = name.size() > 1;
      bool hex = ok && (name[1] == 'x' || name[1] == 'X');
      for (std::size_t k = hex ? 2 : 1; ok && k < name.size(); ++k) {
        char c = name[k];
        if (hex && std::isxdigit(static_cast<unsigned char>(c))) {
          cp = cp * 16 + static_cast<unsigned long>(std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : lower(c) - 'a' + 10);
        } else if (!hex && std::isdigit(static_cast<unsigned char>(c))) {
          cp = cp * 10 + static_cast<unsigned long>(c - '0');
        } else {
          ok = false;
        }
      }
      if (ok && name.size() > (hex ? 2u : 1u)) {
        append_utf8(out, cp);
        i = semi;
        continue;
      }
    } else if (auto it = kNamed.find(name); it != kNamed.end()) {
      out += it->second;
      i = semi;
      continue;
    }
    out.push_back('&');
  }
  return out;
}

std::map<std::string, std::string> parse_attributes(std::string_view s) {
  std::map<std::string, std::string> attrs;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (is_space(s[i]) || s[i] == '/')) ++i;
    std::size_t name_start = i;
    while (i < s.size() && !is_space(s[i]) && s[i] != '=' && s[i] != '/') ++i;
    std::string name;
    for (char c : s.substr(name_start, i - name_start)) name.push_back(lower(c));
    while (i < s.size() && is_space(s[i])) ++i;
    std::string value;
    if (i < s.size() && s[i] == '=') {
      ++i;
      while (i < s.size() && is_space(s[i])) ++i;
      if (i < s.size() && (s[i] == '"' || s[i] == '\'')) {
        char quote = s[i++];
        std::size_t close = s.find(quote, i);
        if (close == std::string_view::npos) close = s.size();
        value = s.substr(i, close - i);
        i = close + 1;
      } else {
        std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        value = s.substr(start, i - start);
      }
    }
    if (!name.empty()) attrs.emplace(std::move(name), decode_entities(value));
  }
  return attrs;
}

std::string text_content(std::string_view inner) {
  std::string text;
  text.reserve(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner[i] == '<') {
      auto close = inner.find('>', i);
      if (close == std::string_view::npos) break;
      i = close;
      continue;
    }
    text.push_back(inner[i]);
  }
  return util::collapse_whitespace(decode_entities(text));
}

}  // namespace

LinkExtraction parse_html_links(const RawPage& page) {
  LinkExtraction result;
  std::string_view body = page.body;
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] != '<') {
      ++i;
      continue;
    }
    if (body.substr(i, 4) == "<!--") {
      auto close = body.find("-->", i + 4);
      if (close == std::string_view::npos) {
        ++result.warnings;
        break;
      }
      i = close + 3;
      continue;
    }
    bool skipped_block = false;
    for (std::string_view raw : {std::string_view("script"), std::string_view("style")}) {
      if (!opens_tag(body, i, raw)) continue;
      std::string closing = "</" + std::string(raw);
      auto close = find_ci(body, closing, i);
      if (close == std::string_view::npos) {
        ++result.warnings;
        i = body.size();
      } else {
        auto gt = body.find('>', close);
        i = gt == std::string_view::npos ? body.size() : gt + 1;
      }
      skipped_block = true;
      break;
    }
    if (skipped_block) continue;
    if (!opens_tag(body, i, "a")) {
      ++i;
      continue;
    }

    std::size_t tag_end = body.find('>', i);
    if (tag_end == std::string_view::npos) {
      ++result.warnings;
      break;
    }
    std::size_t close = find_ci(body, "</a", tag_end + 1);
    bool nested = false;
    for (std::size_t k = tag_end + 1; close != std::string_view::npos && k < close; ++k) {
      if (body[k] == '<' && opens_tag(body, k, "a")) {
        nested = true;
        break;
      }
    }
    if (close == std::string_view::npos || nested) {
      // Unterminated or nested anchor.
      ++result.warnings;
      i = tag_end + 1;
      continue;
    }
    std::size_t close_gt = body.find('>', close);
    std::size_t after = close_gt == std::string_view::npos ? body.size() : close_gt + 1;

    auto attrs = parse_attributes(body.substr(i + 2, tag_end - i - 2));
    std::string_view inner = body.substr(tag_end + 1, close - tag_end - 1);
    i = after;

    auto href = attrs.find("href");
    if (href == attrs.end()) continue;
    std::string_view path = href->second;
    if (!path.starts_with("/wiki/")) continue;
    path.remove_prefix(6);
    if (path.find('?') != std::string_view::npos) continue;

    std::string target;
    try {
      target = normalize_title(path, TitleSource::Href);
    } catch (const EmptyTitle&) {
      continue;
    }
    if (title_namespace(target) != Namespace::Article) continue;

    std::string anchor = text_content(inner);
    if (anchor.empty()) anchor = target;
    result.links.push_back(WikiLink{page.title, std::move(target), std::move(anchor),
                                    result.links.size()});
  }
  return result;
}

}  // namespace wikiner::ingest
