#include "wikiner/candidates/tagger.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "wikiner/error.hpp"
#include "wikiner/util/files.hpp"

extern char** environ;

namespace wikiner::candidates {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool all_caps(std::string_view token) {
  bool letter = false;
  for (char c : token) {
    if (is_lower(c)) return false;
    letter = letter || is_upper(c);
  }
  return letter;
}

// "Delhi", "Bank", "A": initial capital, no further capitals.
bool titlecase(std::string_view token) {
  if (token.empty() || !is_upper(token.front())) return false;
  return std::none_of(token.begin() + 1, token.end(), is_upper);
}

bool lowercase_word(std::string_view token) {
  bool letter = false;
  for (char c : token) {
    if (is_lower(c)) {
      letter = true;
    } else if (c != '-' && c != '\'' && c != '.') {
      return false;
    }
  }
  return letter;
}

}  // namespace

const std::vector<std::string>& tagset() {
  static const std::vector<std::string> tags = {
      "CC",  "CD",  "DT",   "EX",  "FW",  "IN",  "JJ",  "JJR", "JJS", "LS",
      "MD",  "NN",  "NNS",  "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB",
      "RBR", "RBS", "RP",   "SYM", "TO",  "UH",  "VB",  "VBD", "VBG", "VBN",
      "VBP", "VBZ", "WDT",  "WP",  "WP$", "WRB", "OTHER"};
  return tags;
}

PosTag::PosTag(std::string_view symbol) : symbol_(symbol) {
  const auto& tags = tagset();
  if (std::find(tags.begin(), tags.end(), symbol_) == tags.end()) {
    throw TaggerError("tag '" + symbol_ + "' is not in the tagset", {symbol_});
  }
}

std::vector<std::vector<PosTag>> Tagger::tag_many(
    std::span<const std::vector<std::string>> expressions) const {
  std::vector<std::vector<PosTag>> out;
  out.reserve(expressions.size());
  for (const auto& tokens : expressions) out.push_back(tag(tokens));
  return out;
}

HeuristicTagger::HeuristicTagger() : HeuristicTagger(default_lexicon()) {}

HeuristicTagger::HeuristicTagger(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

PosTag HeuristicTagger::tag_token(std::string_view token) const {
  // Acronyms ("US", "IT") are never looked up as function words.
  if (lowercase_word(token) || titlecase(token)) {
    if (auto it = lexicon_.find(lowercase(token)); it != lexicon_.end()) {
      return PosTag(it->second);
    }
  }
  if (!token.empty() && std::all_of(token.begin(), token.end(), is_digit)) return PosTag("CD");
  if (all_caps(token) || (!token.empty() && is_upper(token.front()))) {
    return PosTag("NNP");
  }
  if (lowercase_word(token)) return PosTag(token.back() == 's' ? "NNS" : "NN");
  return PosTag("OTHER");
}

std::vector<PosTag> HeuristicTagger::tag(std::span<const std::string> tokens) const {
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  for (const auto& token : tokens) tags.push_back(tag_token(token));
  return tags;
}

CommandTagger::CommandTagger(std::filesystem::path executable)
    : executable_(std::move(executable)) {
  if (!std::filesystem::exists(executable_)) {
    throw TaggerError("tagger executable not found: " + executable_.string());
  }
}

std::vector<std::string> CommandTagger::run(const std::vector<std::string>& tokens) const {
  char input_path[] = "/tmp/wikiner-tagger-XXXXXX";
  int input_fd = ::mkstemp(input_path);
  if (input_fd < 0) throw TaggerError("cannot create tagger input file");
  ::close(input_fd);
  std::string input;
  for (const auto& t : tokens) input += t + "\n";
  util::write_file_atomic(input_path, input);

  int out_pipe[2];
  if (::pipe(out_pipe) != 0) {
    std::remove(input_path);
    throw TaggerError("pipe() failed");
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, input_path, O_RDONLY, 0);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[1]);

  std::string exe = executable_.string();
  char* argv[] = {exe.data(), nullptr};
  pid_t pid = 0;
  int rc = ::posix_spawn(&pid, exe.c_str(), &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(out_pipe[0]);
    std::remove(input_path);
    throw TaggerError("cannot start tagger " + exe);
  }

  std::string output;
  char buf[4096];
  ssize_t n;
  while ((n = ::read(out_pipe[0], buf, sizeof buf)) > 0) output.append(buf, static_cast<std::size_t>(n));
  ::close(out_pipe[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  std::remove(input_path);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw TaggerError("tagger " + exe + " exited abnormally");
  }

  std::vector<std::string> tags;
  for (auto& line : util::split_lines(output)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    tags.push_back(std::move(line));
  }
  if (tags.size() != tokens.size()) {
    throw TaggerError("tagger returned " + std::to_string(tags.size()) + " tags for " +
                      std::to_string(tokens.size()) + " tokens");
  }
  return tags;
}

std::vector<PosTag> CommandTagger::tag(std::span<const std::string> tokens) const {
  std::vector<std::string> copy(tokens.begin(), tokens.end());
  std::vector<PosTag> tags;
  for (const auto& t : run(copy)) tags.emplace_back(t);
  return tags;
}

std::vector<std::vector<PosTag>> CommandTagger::tag_many(
    std::span<const std::vector<std::string>> expressions) const {
  std::vector<std::string> flat;
  for (const auto& e : expressions) flat.insert(flat.end(), e.begin(), e.end());
  std::vector<std::string> raw = flat.empty() ? std::vector<std::string>{} : run(flat);
  std::vector<std::vector<PosTag>> out;
  out.reserve(expressions.size());
  std::size_t k = 0;
  for (const auto& e : expressions) {
    std::vector<PosTag> tags;
    for (std::size_t i = 0; i < e.size(); ++i) tags.emplace_back(raw[k++]);
    out.push_back(std::move(tags));
  }
  return out;
}

std::unique_ptr<Tagger> make_tagger(std::string_view selector) {
  if (selector == "heuristic") return std::make_unique<HeuristicTagger>();
  if (selector.starts_with("cmd:")) {
    return std::make_unique<CommandTagger>(std::string(selector.substr(4)));
  }
  throw std::invalid_argument("unknown tagger '" + std::string(selector) +
                              "' (expected heuristic or cmd:<path>)");
}

}  // namespace wikiner::candidates
