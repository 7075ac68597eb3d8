#pragma once

#include <filesystem>
#include <string>
#include <unistd.h>

#include "wikiner/cli/config.hpp"
#include "wikiner/ingest/fetch.hpp"
#include "wikiner/util/files.hpp"

#ifndef WIKINER_TEST_DATA_DIR
#error "WIKINER_TEST_DATA_DIR must point at the tests directory"
#endif

namespace wikiner::testing {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(WIKINER_TEST_DATA_DIR) / rel;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("wikiner_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// A project whose page cache already holds the two bundled category pages,
// so every stage runs offline.
inline void write_fixture_project(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "pages");
  util::write_file_atomic(dir / cli::kConfigFile, cli::config_to_toml(cli::ProjectConfig{}));
  util::write_file_atomic(dir / "seeds.txt",
                          "# fixture seeds\n"
                          "https://en.wikipedia.org/wiki/Category:Uttar_Pradesh\n"
                          "Category:People from Bihar\n");
  ingest::PageCache cache(dir / "pages");
  cache.store(ingest::RawPage::make("Category:Uttar Pradesh", ingest::ContentKind::Wikitext,
                                    util::read_file(data_path("fixtures/pages/uttar_pradesh.wikitext")),
                                    "https://en.wikipedia.org/w/index.php?title=Category:Uttar_Pradesh&action=raw",
                                    "2018-06-01T00:00:00Z"));
  cache.store(ingest::RawPage::make("Category:People from Bihar", ingest::ContentKind::Html,
                                    util::read_file(data_path("fixtures/pages/bihar_category.html")),
                                    "https://en.wikipedia.org/wiki/Category:People_from_Bihar",
                                    "2018-06-01T00:00:00Z"));
}

}  // namespace wikiner::testing
