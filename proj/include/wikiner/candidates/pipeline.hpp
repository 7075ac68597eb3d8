#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wikiner/candidates/tagger.hpp"

namespace wikiner::candidates {

struct Token {
  std::string text;
  PosTag pos_tag{"OTHER"};

  bool operator==(const Token&) const = default;
};

struct Candidate {
  std::string surface;
  std::vector<Token> tokens;
  std::vector<std::string> wordtypes;  // parallel to tokens
  int pos_score = 0;
  int wordtype_score = 0;
  int confidence = 0;
  bool selected = false;
  std::size_t occurrence_count = 1;

  bool operator==(const Candidate&) const = default;
};

// How per-token judgements combine into one expression score.
enum class Aggregation { Any, All, First };

Aggregation parse_aggregation(std::string_view text);
std::string_view to_string(Aggregation agg);

struct ScoringConfig {
  Aggregation pos_agg = Aggregation::Any;
  Aggregation wordtype_agg = Aggregation::All;
};

// Whitespace split, surrounding punctuation stripped (trailing periods are
// kept as abbreviation marks), empty fragments dropped. Throws EmptySurface.
std::vector<std::string> tokenize(std::string_view surface);

struct SurfaceCount {
  std::string surface;
  std::size_t occurrence_count = 0;

  bool operator==(const SurfaceCount&) const = default;
};

// Exact, case-sensitive merge; output sorted by surface (byte order).
std::vector<SurfaceCount> dedup(const std::vector<std::string>& anchors);

// Uppercase -> 'A', lowercase -> 'a', digit -> '0', everything else as is.
std::string wordtype(std::string_view token);

// A wordtype qualifies when it starts with 'A' or is all 'A'.
bool wordtype_qualifies(std::string_view wordtype);
bool is_nominal_tag(const PosTag& tag);  // NNP, NNS, NN

int wordtype_score(const std::vector<std::string>& wordtypes,
                   Aggregation agg = Aggregation::All);
int pos_score(const std::vector<PosTag>& tags, Aggregation agg = Aggregation::Any);

std::vector<PosTag> pos_tag_tokens(const std::vector<std::string>& tokens,
                                   const Tagger& tagger);

// Tokenize, tag, wordtype and score every surface; preserves input order.
std::vector<Candidate> score_candidates(const std::vector<SurfaceCount>& surfaces,
                                        const Tagger& tagger,
                                        const ScoringConfig& config = {});

void to_json(nlohmann::ordered_json& j, const Candidate& c);
void from_json(const nlohmann::ordered_json& j, Candidate& c);

std::string candidates_to_jsonl(const std::vector<Candidate>& candidates);
std::vector<Candidate> candidates_from_jsonl(std::string_view text);

}  // namespace wikiner::candidates
