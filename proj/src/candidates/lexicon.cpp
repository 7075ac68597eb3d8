#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wikiner/candidates/tagger.hpp"

namespace wikiner::candidates {

namespace {

struct Entry {
  const char* tag;
  const char* words;
};

// Closed-class words only; open-class adjectives would mis-tag names like
// "New Delhi" when capitalized tokens fall back to the lowercase lookup.
constexpr Entry kEntries[] = {
    {"DT", "a an the this that these those each every some any no all both either "
           "neither another such half"},
    {"IN", "of in on at by for from with without within into onto upon about above "
           "below under over between among amongst through throughout during before "
           "after since until till against toward towards across along alongside "
           "around behind beyond beside besides despite except inside outside near "
           "off per via amid amidst unlike like than whether although though because "
           "while whilst unless if beneath underneath versus"},
    {"CC", "and or but nor yet plus"},
    {"TO", "to"},
    {"PRP", "i you he she it we they me him us them myself yourself himself herself "
            "itself ourselves themselves one's"},
    {"PRP$", "my your his her its our their"},
    {"WDT", "which whichever whatever"},
    {"WP", "who whom what whoever whomever"},
    {"WP$", "whose"},
    {"WRB", "when where why how whenever wherever"},
    {"MD", "can could may might must shall should will would cannot"},
    {"VBZ", "is has does"},
    {"VBP", "are am have do"},
    {"VBD", "was were had did"},
    {"VB", "be"},
    {"VBN", "been done"},
    {"VBG", "being having doing"},
    {"RB", "not never also very too only just so then here now again ever still even "
           "already always often sometimes quite rather almost however thus therefore "
           "hence else perhaps"},
    {"EX", "there"},
    {"RP", "up down out"},
    {"JJ", "other many much more most few several own same various"},
    {"CD", "one two three four five six seven eight nine ten eleven twelve twenty "
           "thirty forty fifty hundred thousand million billion lakh crore"},
    {"UH", "oh yes ok"},
    {"POS", "'s"},
};

}  // namespace

const Lexicon& default_lexicon() {
  static const Lexicon lexicon = [] {
    Lexicon lex;
    for (const auto& entry : kEntries) {
      std::istringstream words(entry.words);
      std::string word;
      while (words >> word) lex.emplace(word, entry.tag);
    }
    return lex;
  }();
  return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon " + path.string());
  Lexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string word, tag;
    if (!(fields >> word) || word.front() == '#') continue;
    if (!(fields >> tag)) throw std::runtime_error("lexicon line without tag: " + line);
    PosTag checked(tag);
    lex.insert_or_assign(word, checked.str());
  }
  return lex;
}

}  // namespace wikiner::candidates
