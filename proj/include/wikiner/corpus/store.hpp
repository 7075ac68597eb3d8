#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wikiner/candidates/pipeline.hpp"
#include "wikiner/corpus/label.hpp"

namespace wikiner::corpus {

struct Provenance {
  std::string source_title;
  std::string target_title;

  bool operator==(const Provenance&) const = default;
  auto operator<=>(const Provenance&) const = default;
};

struct EntityRecord {
  std::string id;
  std::string surface;
  candidates::Candidate candidate;
  std::map<std::string, NELabel> annotations;  // annotator id -> label
  std::optional<NELabel> final_label;
  std::vector<Provenance> provenance;

  bool operator==(const EntityRecord&) const = default;
};

// 16 hex chars of SHA-256(surface); stable across pipeline re-runs.
std::string entity_id(std::string_view surface);

EntityRecord make_record(candidates::Candidate candidate, std::vector<Provenance> provenance = {});

struct PipelineCounts {
  std::size_t pages = 0;
  std::size_t links = 0;
  std::size_t probable = 0;
  std::size_t selected = 0;
};

struct CorpusStats {
  std::size_t pages_accessed = 0;
  std::size_t links_extracted = 0;
  std::size_t probable_after_dedup = 0;
  std::size_t selected = 0;
  double ne_density = 0.0;  // percent, 2 decimals
  std::map<NELabel, std::size_t> class_counts;
  std::map<NELabel, double> class_percentages;  // full precision
};

// NE density = 100 * selected / links. Class counts come from records that
// carry a final label. Throws InconsistentCounts unless
// links >= probable >= selected >= labeled records.
CorpusStats compute_stats(std::span<const EntityRecord> records, const PipelineCounts& counts);

// Class percentages rounded to integers, as printed in reports.
std::map<NELabel, long> display_percentages(const CorpusStats& stats);

// Two tables in the layout of the corpus statistics report.
std::string format_stats_table(const CorpusStats& stats);

enum class CorpusFormat { Tsv, Jsonl };
CorpusFormat parse_corpus_format(std::string_view text);

// tsv: "surface<TAB>LABEL" per line sorted by surface; jsonl: full records.
// Throws UnlabeledRecord listing ids without a final label.
std::string export_corpus(std::span<const EntityRecord> records, CorpusFormat format);
void write_corpus(const std::filesystem::path& path, std::span<const EntityRecord> records,
                  CorpusFormat format);

// Throws ParseError(line) or DuplicateSurface.
std::vector<EntityRecord> import_corpus(std::string_view text, CorpusFormat format);
std::vector<EntityRecord> read_corpus(const std::filesystem::path& path, CorpusFormat format);

// Entity records (labeled or not) one JSON object per line.
std::string records_to_jsonl(std::span<const EntityRecord> records);
std::vector<EntityRecord> records_from_jsonl(std::string_view text);

void to_json(nlohmann::ordered_json& j, const EntityRecord& r);
void from_json(const nlohmann::ordered_json& j, EntityRecord& r);
nlohmann::ordered_json stats_to_json(const CorpusStats& stats);

}  // namespace wikiner::corpus
