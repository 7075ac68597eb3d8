#include "wikiner/ingest/page.hpp"
#include "wikiner/error.hpp"
#include "wikiner/util/files.hpp"

namespace wikiner::ingest {

void to_json(nlohmann::ordered_json& j, const WikiLink& link) {
  j = nlohmann::ordered_json{{"source_title", link.source_title},
                             {"target_title", link.target_title},
                             {"anchor_text", link.anchor_text},
                             {"position_index", link.position_index}};
}

void from_json(const nlohmann::ordered_json& j, WikiLink& link) {
  j.at("source_title").get_to(link.source_title);
  j.at("target_title").get_to(link.target_title);
  j.at("anchor_text").get_to(link.anchor_text);
  j.at("position_index").get_to(link.position_index);
}

std::string links_to_jsonl(const std::vector<WikiLink>& links) {
  std::string out;
  for (const auto& link : links) {
    out += nlohmann::ordered_json(link).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<WikiLink> links_from_jsonl(std::string_view text) {
  std::vector<WikiLink> links;
  auto lines = util::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    try {
      links.push_back(nlohmann::ordered_json::parse(lines[n]).get<WikiLink>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(n + 1, e.what());
    }
  }
  return links;
}

}  // namespace wikiner::ingest
