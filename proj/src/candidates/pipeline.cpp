#include "wikiner/candidates/pipeline.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "wikiner/error.hpp"
#include "wikiner/util/files.hpp"

namespace wikiner::candidates {

namespace {

bool is_ascii_punct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
         (c >= '{' && c <= '~');
}

// Multi-byte punctuation seen in Wikipedia anchors: dashes, curly quotes,
// guillemets, ellipsis.
constexpr std::array<std::string_view, 9> kUnicodePunct = {
    "–", "—", "‘", "’", "“", "”", "«", "»", "…"};

std::size_t leading_punct(std::string_view s) {
  if (s.empty()) return 0;
  if (is_ascii_punct(s.front())) return 1;
  for (auto p : kUnicodePunct) {
    if (s.starts_with(p)) return p.size();
  }
  return 0;
}

std::size_t trailing_punct(std::string_view s) {
  if (s.empty()) return 0;
  // Trailing periods mark abbreviations ("U.P.", "Jr.").
  if (s.back() != '.' && is_ascii_punct(s.back())) return 1;
  for (auto p : kUnicodePunct) {
    if (s.ends_with(p)) return p.size();
  }
  return 0;
}

bool only_periods(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == '.'; });
}

bool aggregate(const std::vector<bool>& flags, Aggregation agg) {
  switch (agg) {
    case Aggregation::Any:
      return std::any_of(flags.begin(), flags.end(), [](bool b) { return b; });
    case Aggregation::All:
      return std::all_of(flags.begin(), flags.end(), [](bool b) { return b; });
    case Aggregation::First:
      return flags.front();
  }
  return false;
}

}  // namespace

Aggregation parse_aggregation(std::string_view text) {
  if (text == "any") return Aggregation::Any;
  if (text == "all") return Aggregation::All;
  if (text == "first") return Aggregation::First;
  throw std::invalid_argument("unknown aggregation '" + std::string(text) +
                              "' (expected any, all or first)");
}

std::string_view to_string(Aggregation agg) {
  switch (agg) {
    case Aggregation::Any: return "any";
    case Aggregation::All: return "all";
    case Aggregation::First: return "first";
  }
  return "any";
}

std::vector<std::string> tokenize(std::string_view surface) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < surface.size()) {
    while (i < surface.size() && std::isspace(static_cast<unsigned char>(surface[i]))) ++i;
    std::size_t start = i;
    while (i < surface.size() && !std::isspace(static_cast<unsigned char>(surface[i]))) ++i;
    std::string_view token = surface.substr(start, i - start);
    while (std::size_t n = leading_punct(token)) token.remove_prefix(n);
    while (std::size_t n = trailing_punct(token)) token.remove_suffix(n);
    if (token.empty() || only_periods(token)) continue;
    tokens.emplace_back(token);
  }
  if (tokens.empty()) {
    throw EmptySurface("no tokens in '" + std::string(surface) + "'", {std::string(surface)});
  }
  return tokens;
}

std::vector<SurfaceCount> dedup(const std::vector<std::string>& anchors) {
  std::map<std::string, std::size_t> counts;
  for (const auto& a : anchors) ++counts[a];
  std::vector<SurfaceCount> out;
  out.reserve(counts.size());
  for (auto& [surface, n] : counts) out.push_back({surface, n});
  return out;
}

std::string wordtype(std::string_view token) {
  std::string out(token);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = 'A';
    else if (c >= 'a' && c <= 'z') c = 'a';
    else if (c >= '0' && c <= '9') c = '0';
  }
  return out;
}

bool wordtype_qualifies(std::string_view wt) {
  if (wt.empty()) return false;
  bool all_a = std::all_of(wt.begin(), wt.end(), [](char c) { return c == 'A'; });
  return wt.front() == 'A' || all_a;
}

bool is_nominal_tag(const PosTag& tag) {
  const auto& s = tag.str();
  return s == "NNP" || s == "NNS" || s == "NN";
}

int wordtype_score(const std::vector<std::string>& wordtypes, Aggregation agg) {
  if (wordtypes.empty()) throw std::invalid_argument("wordtype_score of empty expression");
  std::vector<bool> flags;
  for (const auto& wt : wordtypes) flags.push_back(wordtype_qualifies(wt));
  return aggregate(flags, agg) ? 1 : 0;
}

int pos_score(const std::vector<PosTag>& tags, Aggregation agg) {
  if (tags.empty()) throw std::invalid_argument("pos_score of empty expression");
  std::vector<bool> flags;
  for (const auto& t : tags) flags.push_back(is_nominal_tag(t));
  return aggregate(flags, agg) ? 1 : 0;
}

std::vector<PosTag> pos_tag_tokens(const std::vector<std::string>& tokens,
                                   const Tagger& tagger) {
  if (tokens.empty()) throw std::invalid_argument("pos_tag_tokens of empty token list");
  auto tags = tagger.tag(tokens);
  if (tags.size() != tokens.size()) throw TaggerError("tagger returned wrong tag count");
  return tags;
}

std::vector<Candidate> score_candidates(const std::vector<SurfaceCount>& surfaces,
                                        const Tagger& tagger, const ScoringConfig& config) {
  std::vector<std::vector<std::string>> token_lists;
  token_lists.reserve(surfaces.size());
  for (const auto& s : surfaces) token_lists.push_back(tokenize(s.surface));
  auto tag_lists = tagger.tag_many(token_lists);

  std::vector<Candidate> out;
  out.reserve(surfaces.size());
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const auto& tokens = token_lists[i];
    const auto& tags = tag_lists.at(i);
    if (tags.size() != tokens.size()) throw TaggerError("tagger returned wrong tag count");
    Candidate c;
    c.surface = surfaces[i].surface;
    c.occurrence_count = surfaces[i].occurrence_count;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      c.tokens.push_back({tokens[k], tags[k]});
      c.wordtypes.push_back(wordtype(tokens[k]));
    }
    c.pos_score = pos_score(tags, config.pos_agg);
    c.wordtype_score = wordtype_score(c.wordtypes, config.wordtype_agg);
    c.confidence = c.pos_score + c.wordtype_score;
    c.selected = c.confidence >= 1;
    out.push_back(std::move(c));
  }
  return out;
}

void to_json(nlohmann::ordered_json& j, const Candidate& c) {
  std::vector<std::string> tokens, tags;
  for (const auto& t : c.tokens) {
    tokens.push_back(t.text);
    tags.push_back(t.pos_tag.str());
  }
  j = nlohmann::ordered_json{{"surface", c.surface},
                             {"tokens", tokens},
                             {"tags", tags},
                             {"wordtypes", c.wordtypes},
                             {"pos_score", c.pos_score},
                             {"wordtype_score", c.wordtype_score},
                             {"confidence", c.confidence},
                             {"selected", c.selected},
                             {"occurrence_count", c.occurrence_count}};
}

void from_json(const nlohmann::ordered_json& j, Candidate& c) {
  j.at("surface").get_to(c.surface);
  auto tokens = j.at("tokens").get<std::vector<std::string>>();
  auto tags = j.at("tags").get<std::vector<std::string>>();
  j.at("wordtypes").get_to(c.wordtypes);
  if (tokens.size() != tags.size() || tokens.size() != c.wordtypes.size()) {
    throw std::invalid_argument("tokens, tags and wordtypes must be parallel");
  }
  c.tokens.clear();
  for (std::size_t i = 0; i < tokens.size(); ++i) c.tokens.push_back({tokens[i], PosTag(tags[i])});
  j.at("pos_score").get_to(c.pos_score);
  j.at("wordtype_score").get_to(c.wordtype_score);
  j.at("confidence").get_to(c.confidence);
  j.at("selected").get_to(c.selected);
  j.at("occurrence_count").get_to(c.occurrence_count);
}

std::string candidates_to_jsonl(const std::vector<Candidate>& candidates) {
  std::string out;
  for (const auto& c : candidates) {
    out += nlohmann::ordered_json(c).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<Candidate> candidates_from_jsonl(std::string_view text) {
  std::vector<Candidate> out;
  auto lines = util::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    try {
      out.push_back(nlohmann::ordered_json::parse(lines[n]).get<Candidate>());
    } catch (const std::exception& e) {
      throw ParseError(n + 1, e.what());
    }
  }
  return out;
}

}  // namespace wikiner::candidates
