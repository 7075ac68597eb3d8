#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "wikiner/cli/config.hpp"
#include "wikiner/ingest/fetch.hpp"

namespace wikiner::cli {

// Stage files inside a project directory.
namespace stage {
inline constexpr const char* kPages = "pages";
inline constexpr const char* kLinks = "links.jsonl";
inline constexpr const char* kCandidates = "candidates.jsonl";
inline constexpr const char* kScored = "scored.jsonl";
inline constexpr const char* kAnnotations = "annotations.jsonl";
inline constexpr const char* kCorpus = "corpus.tsv";
inline constexpr const char* kStats = "stats.json";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kReportWithoutMisc = "report_without_misc.json";
inline constexpr const char* kCurve = "learning_curve.csv";
}  // namespace stage

enum ExitCode { kOk = 0, kDomainError = 1, kUsageError = 2 };

struct RunContext {
  std::ostream& out;
  std::ostream& err;
  EnvLookup env = process_env();
  // Used by `fetch --online`; defaults to libcurl.
  std::function<std::shared_ptr<ingest::HttpTransport>()> transport;
};

// args excludes the program name.
int run(const std::vector<std::string>& args, RunContext& ctx);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wikiner::cli
