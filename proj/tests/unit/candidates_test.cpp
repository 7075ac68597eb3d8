#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "wikiner/candidates/pipeline.hpp"
#include "wikiner/error.hpp"

using namespace wikiner;
using namespace wikiner::candidates;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kTags = {"NNP", "NNS", "NN", "DT", "IN", "CD", "OTHER"};

// Every tuple over `alphabet` of length 1..max_len.
template <typename T>
std::vector<std::vector<T>> all_tuples(const std::vector<T>& alphabet, std::size_t max_len) {
  std::vector<std::vector<T>> out;
  std::vector<std::vector<T>> frontier = {{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::vector<T>> next;
    for (const auto& prefix : frontier) {
      for (const auto& a : alphabet) {
        auto t = prefix;
        t.push_back(a);
        next.push_back(t);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

// Reference aggregation written as explicit counting.
int brute_aggregate(const std::vector<bool>& flags, Aggregation agg) {
  std::size_t hits = 0;
  for (bool f : flags) hits += f ? 1 : 0;
  if (agg == Aggregation::Any) return hits > 0 ? 1 : 0;
  if (agg == Aggregation::All) return hits == flags.size() ? 1 : 0;
  return flags[0] ? 1 : 0;
}

}  // namespace

TEST_CASE("tokenize examples") {
  CHECK(tokenize("New Delhi") == std::vector<std::string>{"New", "Delhi"});
  CHECK(tokenize("U.P.") == std::vector<std::string>{"U.P."});
  CHECK(tokenize("(Bihar)") == std::vector<std::string>{"Bihar"});
  CHECK(tokenize("Ramdhari Singh 'Dinkar'") ==
        std::vector<std::string>{"Ramdhari", "Singh", "Dinkar"});
  CHECK(tokenize("Procter & Gamble") == std::vector<std::string>{"Procter", "Gamble"});
  CHECK(tokenize("Sama-Chakeva, O'Brien") == std::vector<std::string>{"Sama-Chakeva", "O'Brien"});
  CHECK(tokenize("“Renu” — writer") == std::vector<std::string>{"Renu", "writer"});
  CHECK_THROWS_AS(tokenize("  "), EmptySurface);
  CHECK_THROWS_AS(tokenize("( ) ... -"), EmptySurface);
}

TEST_CASE("dedup examples and properties") {
  CHECK(dedup({"Delhi", "Delhi", "Agra"}) ==
        std::vector<SurfaceCount>{{"Agra", 1}, {"Delhi", 2}});
  CHECK(dedup({"delhi", "Delhi"}).size() == 2);
  CHECK(dedup({}).empty());

  std::mt19937_64 rng(5);
  const std::vector<std::string> pool = {"Agra", "agra", "Agra ", "Kanpur", "BJP", "Lok Sabha"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> anchors;
    for (std::size_t i = 0, n = rng() % 30; i < n; ++i) anchors.push_back(pool[rng() % pool.size()]);
    auto out = dedup(anchors);
    std::size_t total = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      total += out[i].occurrence_count;
      if (i > 0) CHECK(out[i - 1].surface < out[i].surface);
    }
    CHECK(total == anchors.size());
    CHECK(out.size() <= anchors.size());
  }
}

TEST_CASE("wordtype mapping") {
  CHECK(wordtype("Delhi") == "Aaaaa");
  CHECK(wordtype("BJP") == "AAA");
  CHECK(wordtype("2014") == "0000");
  CHECK(wordtype("U.P.") == "A.A.");
  CHECK(wordtype("Sama-Chakeva") == "Aaaa-Aaaaaaa");
  CHECK(wordtype("पटना") == "पटना");
}

TEST_CASE("wordtype properties") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    std::string token;
    for (std::size_t i = 0, n = 1 + rng() % 12; i < n; ++i) {
      token.push_back(static_cast<char>(rng() % 256));
    }
    std::string wt = wordtype(token);
    CHECK(wt.size() == token.size());
    CHECK(wordtype(wt) == wt);
  }
}

TEST_CASE("wordtype_score examples") {
  CHECK(wordtype_score({"Aaaaa"}) == 1);
  CHECK(wordtype_score({"AAA"}) == 1);
  CHECK(wordtype_score({"Aaa", "aaaa"}) == 0);
  CHECK(wordtype_score({"Aaa", "aaaa"}, Aggregation::Any) == 1);
  CHECK(wordtype_score({"aaa", "Aaaa"}, Aggregation::First) == 0);
  CHECK(wordtype_score({"0000"}) == 0);
}

TEST_CASE("pos_score examples") {
  CHECK(pos_score({PosTag("NNP")}) == 1);
  CHECK(pos_score({PosTag("DT"), PosTag("IN")}) == 0);
  CHECK(pos_score({PosTag("NNP"), PosTag("IN"), PosTag("NNP")}) == 1);
  CHECK(pos_score({PosTag("NNP"), PosTag("IN"), PosTag("NNP")}, Aggregation::All) == 0);
}

TEST_CASE("exhaustive pos_score oracle") {
  for (auto agg : {Aggregation::Any, Aggregation::All, Aggregation::First}) {
    for (const auto& tuple : all_tuples(kTags, 3)) {
      std::vector<PosTag> tags;
      std::vector<bool> nominal;
      for (const auto& t : tuple) {
        tags.emplace_back(t);
        nominal.push_back(t == "NNP" || t == "NNS" || t == "NN");
      }
      CHECK(pos_score(tags, agg) == brute_aggregate(nominal, agg));
    }
  }
}

TEST_CASE("exhaustive wordtype_score oracle") {
  // Qualifying and failing witnesses for each slot.
  const std::vector<std::string> qualifying = {"Aaaaa", "AAA", "A.A.", "A"};
  const std::vector<std::string> failing = {"aaaa", "0000", "aA", ".A", "a-Aaa"};
  for (auto agg : {Aggregation::Any, Aggregation::All, Aggregation::First}) {
    for (const auto& pattern : all_tuples(std::vector<bool>{true, false}, 3)) {
      for (std::size_t witness = 0; witness < 4; ++witness) {
        std::vector<std::string> wts;
        for (std::size_t k = 0; k < pattern.size(); ++k) {
          const auto& pool = pattern[k] ? qualifying : failing;
          wts.push_back(pool[(witness + k) % pool.size()]);
        }
        CHECK(wordtype_score(wts, agg) == brute_aggregate(pattern, agg));
      }
    }
  }
}

TEST_CASE("heuristic tagger") {
  HeuristicTagger tagger;
  auto tags = [&](std::vector<std::string> tokens) {
    std::vector<std::string> out;
    for (const auto& t : pos_tag_tokens(tokens, tagger)) out.push_back(t.str());
    return out;
  };
  CHECK(tags({"New", "Delhi"}) == std::vector<std::string>{"NNP", "NNP"});
  CHECK(tags({"of"}) == std::vector<std::string>{"IN"});
  CHECK(tags({"2014"}) == std::vector<std::string>{"CD"});
  CHECK(tags({"Bank", "of", "India"}) == std::vector<std::string>{"NNP", "IN", "NNP"});
  CHECK(tags({"The", "Hindu"}) == std::vector<std::string>{"DT", "NNP"});
  CHECK(tags({"US", "IT", "U.P."}) == std::vector<std::string>{"NNP", "NNP", "NNP"});
  CHECK(tags({"elections", "election", "x2", "2nd"}) ==
        std::vector<std::string>{"NNS", "NN", "OTHER", "OTHER"});
  CHECK(default_lexicon().size() >= 200);
  CHECK_THROWS_AS(PosTag("GPE"), TaggerError);
}

TEST_CASE("score_candidates") {
  HeuristicTagger tagger;
  auto out = score_candidates({{"New Delhi", 1}, {"and the", 1}, {"elections", 3}}, tagger);
  REQUIRE(out.size() == 3);
  CHECK(out[0].pos_score == 1);
  CHECK(out[0].wordtype_score == 1);
  CHECK(out[0].confidence == 2);
  CHECK(out[0].selected);
  CHECK(out[1].pos_score == 0);
  CHECK(out[1].wordtype_score == 0);
  CHECK(out[1].confidence == 0);
  CHECK_FALSE(out[1].selected);
  // Common nouns still score on POS.
  CHECK(out[2].confidence == 1);
  CHECK(out[2].selected);
  CHECK(out[2].occurrence_count == 3);
  for (const auto& c : out) {
    CHECK(c.wordtypes.size() == c.tokens.size());
    CHECK(c.confidence == c.pos_score + c.wordtype_score);
    CHECK(c.selected == (c.confidence > 0));
  }
  CHECK(score_candidates({{"New Delhi", 1}, {"and the", 1}}, tagger) ==
        score_candidates({{"New Delhi", 1}, {"and the", 1}}, tagger));
  CHECK_THROWS_AS(score_candidates({{"...", 1}}, tagger), EmptySurface);
}

TEST_CASE("external command tagger") {
  fs::path script = fs::temp_directory_path() / ("wikiner-tagger-" + std::to_string(::getpid()) + ".sh");
  {
    std::ofstream out(script);
    out << "#!/bin/sh\nwhile read t; do case \"$t\" in of) echo IN;; *) echo NNP;; esac; done\n";
  }
  fs::permissions(script, fs::perms::owner_all);
  auto tagger = make_tagger("cmd:" + script.string());
  auto out = score_candidates({{"Bank of India", 1}, {"of", 1}}, *tagger);
  REQUIRE(out.size() == 2);
  CHECK(out[0].tokens[1].pos_tag.str() == "IN");
  CHECK(out[0].tokens[2].pos_tag.str() == "NNP");
  CHECK(out[1].pos_score == 0);

  {
    std::ofstream out(script);
    out << "#!/bin/sh\nwhile read t; do echo GPE; done\n";
  }
  CHECK_THROWS_AS(score_candidates({{"Agra", 1}}, *make_tagger("cmd:" + script.string())), TaggerError);
  fs::remove(script);
  CHECK_THROWS_AS(make_tagger("cmd:/nonexistent/tagger"), TaggerError);
  CHECK_THROWS_AS(make_tagger("spacy"), std::invalid_argument);
}

TEST_CASE("candidates.jsonl round trip") {
  HeuristicTagger tagger;
  auto out = score_candidates({{"Bank of India", 2}, {"U.P.", 1}}, tagger);
  CHECK(candidates_from_jsonl(candidates_to_jsonl(out)) == out);
}
