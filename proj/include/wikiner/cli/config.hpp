#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wikiner::cli {

inline constexpr const char* kConfigFile = "wikiner.toml";

// Project settings stored in <project>/wikiner.toml. The file is a TOML
// subset: [section] headers, key = value with strings, integers, floats,
// booleans and single-line arrays.
struct ProjectConfig {
  // [project]
  std::string seed_list = "seeds.txt";
  // [fetch]
  std::string content_kind = "wikitext";
  std::string base_url = "https://en.wikipedia.org";
  std::int64_t politeness_delay_ms = 1000;
  // [candidates]
  std::string tagger = "heuristic";
  std::string lexicon;  // empty: built-in lexicon
  std::string pos_aggregation = "any";
  std::string wordtype_aggregation = "all";
  // [eval]
  std::string model = "lr";
  std::int64_t folds = 5;
  std::int64_t seed = 42;
  std::vector<double> fractions = {0.2, 0.4, 0.6, 0.8, 1.0};
  std::int64_t threads = 1;
  // [service]
  std::string host = "127.0.0.1";
  std::int64_t port = 8080;
  std::vector<std::string> annotators = {"annotator1", "annotator2"};

  bool operator==(const ProjectConfig&) const = default;
};

// Throws ConfigError (unknown section or key, wrong type, bad value).
ProjectConfig parse_config(std::string_view text);
std::string config_to_toml(const ProjectConfig& config);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// WIKINER_<SECTION>_<KEY> overrides, e.g. WIKINER_EVAL_SEED=7 or
// WIKINER_SERVICE_ANNOTATORS=a,b. Lists are comma-separated.
void apply_env_overrides(ProjectConfig& config, const EnvLookup& env);
EnvLookup process_env();

// Defaults when the file is absent; environment applied last.
ProjectConfig load_config(const std::filesystem::path& project_dir, const EnvLookup& env);

}  // namespace wikiner::cli
