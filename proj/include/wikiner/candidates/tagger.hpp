#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wikiner::candidates {

// Penn Treebank tag plus OTHER; validated against tagset() on construction.
class PosTag {
 public:
  // Throws TaggerError for symbols outside the tagset.
  explicit PosTag(std::string_view symbol);

  const std::string& str() const { return symbol_; }
  bool operator==(const PosTag&) const = default;
  auto operator<=>(const PosTag&) const = default;

 private:
  std::string symbol_;
};

const std::vector<std::string>& tagset();

// Lowercase function word -> tag.
using Lexicon = std::map<std::string, std::string, std::less<>>;

// The bundled ~200-word closed-class lexicon.
const Lexicon& default_lexicon();
// "word TAG" per line, '#' comments.
Lexicon load_lexicon(const std::filesystem::path& path);

class Tagger {
 public:
  virtual ~Tagger() = default;
  // One tag per token.
  virtual std::vector<PosTag> tag(std::span<const std::string> tokens) const = 0;
  // Tags several expressions; the default calls tag() for each.
  virtual std::vector<std::vector<PosTag>> tag_many(
      std::span<const std::vector<std::string>> expressions) const;
  virtual std::string name() const = 0;
};

// Deterministic rules: lexicon, all digits -> CD, capitalized or all-caps ->
// NNP, lowercase ending in "s" -> NNS, other lowercase alphabetic -> NN,
// anything else OTHER.
class HeuristicTagger : public Tagger {
 public:
  HeuristicTagger();
  explicit HeuristicTagger(Lexicon lexicon);

  PosTag tag_token(std::string_view token) const;
  std::vector<PosTag> tag(std::span<const std::string> tokens) const override;
  std::string name() const override { return "heuristic"; }

 private:
  Lexicon lexicon_;
};

// External tagger process: reads one token per line on stdin, writes one
// tag per line on stdout. All expressions of a batch go through one run.
class CommandTagger : public Tagger {
 public:
  explicit CommandTagger(std::filesystem::path executable);

  std::vector<PosTag> tag(std::span<const std::string> tokens) const override;
  std::vector<std::vector<PosTag>> tag_many(
      std::span<const std::vector<std::string>> expressions) const override;
  std::string name() const override { return "cmd:" + executable_.string(); }

 private:
  std::vector<std::string> run(const std::vector<std::string>& tokens) const;

  std::filesystem::path executable_;
};

// "heuristic" or "cmd:<path>".
std::unique_ptr<Tagger> make_tagger(std::string_view selector);

}  // namespace wikiner::candidates
