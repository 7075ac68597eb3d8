#include "wikiner/cli/config.hpp"

#include <charconv>
#include <cstdlib>
#include <map>
#include <variant>

#include "wikiner/candidates/pipeline.hpp"
#include "wikiner/error.hpp"
#include "wikiner/ingest/page.hpp"
#include "wikiner/ml/models.hpp"
#include "wikiner/ml/validation.hpp"
#include "wikiner/util/files.hpp"

namespace wikiner::cli {

namespace {

using Value = std::variant<std::string, std::int64_t, double, bool, std::vector<std::string>,
                           std::vector<double>>;

enum class Kind { String, Int, StringList, DoubleList };

struct Field {
  const char* section;
  const char* key;
  Kind kind;
  void* (*member)(ProjectConfig&);
};

#define FIELD(sec, name, kind) \
  Field { sec, #name, kind, [](ProjectConfig& c) -> void* { return &c.name; } }

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      FIELD("project", seed_list, Kind::String),
      FIELD("fetch", content_kind, Kind::String),
      FIELD("fetch", base_url, Kind::String),
      FIELD("fetch", politeness_delay_ms, Kind::Int),
      FIELD("candidates", tagger, Kind::String),
      FIELD("candidates", lexicon, Kind::String),
      FIELD("candidates", pos_aggregation, Kind::String),
      FIELD("candidates", wordtype_aggregation, Kind::String),
      FIELD("eval", model, Kind::String),
      FIELD("eval", folds, Kind::Int),
      FIELD("eval", seed, Kind::Int),
      FIELD("eval", fractions, Kind::DoubleList),
      FIELD("eval", threads, Kind::Int),
      FIELD("service", host, Kind::String),
      FIELD("service", port, Kind::Int),
      FIELD("service", annotators, Kind::StringList),
  };
  return all;
}

#undef FIELD

const Field* find_field(std::string_view section, std::string_view key) {
  for (const auto& f : fields()) {
    if (section == f.section && key == f.key) return &f;
  }
  return nullptr;
}

std::string where(std::size_t line) { return line ? "wikiner.toml line " + std::to_string(line) + ": " : ""; }

void assign(ProjectConfig& config, const Field& f, Value v, std::size_t line) {
  void* slot = f.member(config);
  const std::string name = std::string(f.section) + "." + f.key;
  switch (f.kind) {
    case Kind::String:
      if (!std::holds_alternative<std::string>(v)) throw ConfigError(where(line) + name + " must be a string");
      *static_cast<std::string*>(slot) = std::get<std::string>(v);
      break;
    case Kind::Int:
      if (!std::holds_alternative<std::int64_t>(v)) throw ConfigError(where(line) + name + " must be an integer");
      *static_cast<std::int64_t*>(slot) = std::get<std::int64_t>(v);
      break;
    case Kind::StringList:
      if (auto* empty = std::get_if<std::vector<double>>(&v); empty && empty->empty()) v = std::vector<std::string>{};
      if (!std::holds_alternative<std::vector<std::string>>(v)) {
        throw ConfigError(where(line) + name + " must be an array of strings");
      }
      *static_cast<std::vector<std::string>*>(slot) = std::get<std::vector<std::string>>(v);
      break;
    case Kind::DoubleList:
      if (!std::holds_alternative<std::vector<double>>(v)) {
        throw ConfigError(where(line) + name + " must be an array of numbers");
      }
      *static_cast<std::vector<double>*>(slot) = std::get<std::vector<double>>(v);
      break;
  }
}

void validate(const ProjectConfig& c) {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  try {
    ingest::parse_content_kind(c.content_kind);
    candidates::parse_aggregation(c.pos_aggregation);
    candidates::parse_aggregation(c.wordtype_aggregation);
    ml::parse_model_kind(c.model);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  check(c.tagger == "heuristic" || c.tagger.starts_with("cmd:"), "candidates.tagger must be heuristic or cmd:<path>");
  check(c.folds >= 2, "eval.folds must be at least 2");
  check(c.threads >= 1, "eval.threads must be at least 1");
  check(c.seed >= 0, "eval.seed must be non-negative");
  check(c.politeness_delay_ms >= 500, "fetch.politeness_delay_ms must be at least 500");
  check(c.port >= 0 && c.port <= 65535, "service.port must be within 0..65535");
  check(!c.fractions.empty(), "eval.fractions must not be empty");
  for (std::size_t i = 0; i < c.fractions.size(); ++i) {
    check(c.fractions[i] > 0 && c.fractions[i] <= 1, "eval.fractions must lie in (0, 1]");
    check(i == 0 || c.fractions[i] > c.fractions[i - 1], "eval.fractions must be ascending");
  }
}

// ---- TOML subset reader ----

class Reader {
 public:
  Reader(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  Value value() {
    skip_ws();
    if (at_end()) fail("missing value");
    char c = s_[i_];
    if (c == '"') return string();
    if (c == '[') return array();
    if (s_.substr(i_).starts_with("true")) {
      i_ += 4;
      return true;
    }
    if (s_.substr(i_).starts_with("false")) {
      i_ += 5;
      return false;
    }
    return number();
  }

  void finish() {
    skip_ws();
    if (!at_end() && s_[i_] != '#') fail("unexpected text after value");
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ConfigError(where(line_) + msg); }
  bool at_end() const { return i_ >= s_.size(); }
  void skip_ws() {
    while (!at_end() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }

  std::string string() {
    ++i_;
    std::string out;
    while (!at_end() && s_[i_] != '"') {
      char c = s_[i_++];
      if (c == '\\') {
        if (at_end()) break;
        char e = s_[i_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    if (at_end()) fail("unterminated string");
    ++i_;
    return out;
  }

  Value number() {
    std::size_t start = i_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '-' ||
                         s_[i_] == '+' || s_[i_] == '.')) {
      ++i_;
    }
    auto tok = s_.substr(start, i_ - start);
    if (tok.empty()) fail("expected a value");
    if (tok.find_first_of(".eE") == std::string_view::npos) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec == std::errc{} && p == tok.data() + tok.size()) return v;
    } else {
      double v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec == std::errc{} && p == tok.data() + tok.size()) return v;
    }
    fail("bad value '" + std::string(tok) + "'");
  }

  Value array() {
    ++i_;
    std::vector<std::string> strings;
    std::vector<double> numbers;
    for (;;) {
      skip_ws();
      if (at_end()) fail("unterminated array");
      if (s_[i_] == ']') {
        ++i_;
        break;
      }
      Value v = value();
      if (auto* s = std::get_if<std::string>(&v)) {
        if (!numbers.empty()) fail("mixed array");
        strings.push_back(*s);
      } else if (auto* n = std::get_if<std::int64_t>(&v)) {
        if (!strings.empty()) fail("mixed array");
        numbers.push_back(static_cast<double>(*n));
      } else if (auto* d = std::get_if<double>(&v)) {
        if (!strings.empty()) fail("mixed array");
        numbers.push_back(*d);
      } else {
        fail("arrays hold strings or numbers");
      }
      skip_ws();
      if (!at_end() && s_[i_] == ',') ++i_;
    }
    if (!strings.empty()) return strings;
    return numbers;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t i_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string number(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    auto comma = s.find(',', start);
    out.emplace_back(trim(std::string_view(s).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

ProjectConfig parse_config(std::string_view text) {
  ProjectConfig config;
  std::string section;
  auto lines = util::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    auto line = trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      auto close = line.find(']');
      if (close == std::string_view::npos) throw ConfigError(where(line_no) + "unterminated section header");
      section = std::string(trim(line.substr(1, close - 1)));
      bool known = false;
      for (const auto& f : fields()) known = known || section == f.section;
      if (!known) throw ConfigError(where(line_no) + "unknown section [" + section + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where(line_no) + "expected key = value");
    auto key = trim(line.substr(0, eq));
    const Field* f = find_field(section, key);
    if (!f) {
      throw ConfigError(where(line_no) + "unknown key '" + std::string(key) + "'" +
                        (section.empty() ? "" : " in [" + section + "]"));
    }
    Reader r(line.substr(eq + 1), line_no);
    Value v = r.value();
    r.finish();
    assign(config, *f, std::move(v), line_no);
  }
  validate(config);
  return config;
}

std::string config_to_toml(const ProjectConfig& config) {
  std::string out;
  std::string section;
  ProjectConfig c = config;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += std::string(f.key) + " = ";
    void* slot = f.member(c);
    switch (f.kind) {
      case Kind::String: out += quote(*static_cast<std::string*>(slot)); break;
      case Kind::Int: out += std::to_string(*static_cast<std::int64_t*>(slot)); break;
      case Kind::StringList: {
        const auto& v = *static_cast<std::vector<std::string>*>(slot);
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + quote(v[i]);
        out += "]";
        break;
      }
      case Kind::DoubleList: {
        const auto& v = *static_cast<std::vector<double>*>(slot);
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + number(v[i]);
        out += "]";
        break;
      }
    }
    out += "\n";
  }
  return out;
}

void apply_env_overrides(ProjectConfig& config, const EnvLookup& env) {
  for (const auto& f : fields()) {
    std::string name = std::string("WIKINER_") + f.section + "_" + f.key;
    for (char& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    auto raw = env(name);
    if (!raw) continue;
    Value v;
    try {
      switch (f.kind) {
        case Kind::String: v = *raw; break;
        case Kind::Int: {
          std::int64_t n = 0;
          auto [p, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), n);
          if (ec != std::errc{} || p != raw->data() + raw->size()) throw std::invalid_argument("integer");
          v = n;
          break;
        }
        case Kind::StringList: v = split_commas(*raw); break;
        case Kind::DoubleList: v = ml::parse_fractions(*raw); break;
      }
    } catch (const std::exception&) {
      throw ConfigError(name + "='" + *raw + "' is not a valid value");
    }
    assign(config, f, std::move(v), 0);
  }
  validate(config);
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

ProjectConfig load_config(const std::filesystem::path& project_dir, const EnvLookup& env) {
  auto path = project_dir / kConfigFile;
  ProjectConfig config = std::filesystem::exists(path) ? parse_config(util::read_file(path)) : ProjectConfig{};
  apply_env_overrides(config, env);
  return config;
}

}  // namespace wikiner::cli
