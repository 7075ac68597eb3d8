#include "wikiner/corpus/store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "wikiner/error.hpp"
#include "wikiner/util/files.hpp"
#include "wikiner/util/hash.hpp"

namespace wikiner::corpus {

std::string entity_id(std::string_view surface) {
  return util::sha256_hex(surface).substr(0, 16);
}

EntityRecord make_record(candidates::Candidate candidate, std::vector<Provenance> provenance) {
  EntityRecord r;
  r.id = entity_id(candidate.surface);
  r.surface = candidate.surface;
  r.candidate = std::move(candidate);
  std::sort(provenance.begin(), provenance.end());
  provenance.erase(std::unique(provenance.begin(), provenance.end()), provenance.end());
  r.provenance = std::move(provenance);
  return r;
}

CorpusStats compute_stats(std::span<const EntityRecord> records, const PipelineCounts& counts) {
  std::size_t labeled = 0;
  for (const auto& r : records) labeled += r.final_label ? 1 : 0;
  if (counts.links < counts.probable || counts.probable < counts.selected ||
      counts.selected < labeled) {
    throw InconsistentCounts(
        "expected links >= probable >= selected >= labeled, got " +
        std::to_string(counts.links) + ", " + std::to_string(counts.probable) + ", " +
        std::to_string(counts.selected) + ", " + std::to_string(labeled));
  }

  CorpusStats stats;
  stats.pages_accessed = counts.pages;
  stats.links_extracted = counts.links;
  stats.probable_after_dedup = counts.probable;
  stats.selected = counts.selected;
  if (counts.links > 0) {
    double density = 100.0 * static_cast<double>(counts.selected) / static_cast<double>(counts.links);
    stats.ne_density = std::round(density * 100.0) / 100.0;
  }
  if (labeled == 0) return stats;
  for (NELabel label : kAllLabels) stats.class_counts[label] = 0;
  for (const auto& r : records) {
    if (r.final_label) ++stats.class_counts[*r.final_label];
  }
  for (auto [label, n] : stats.class_counts) {
    stats.class_percentages[label] = 100.0 * static_cast<double>(n) / static_cast<double>(labeled);
  }
  return stats;
}

std::map<NELabel, long> display_percentages(const CorpusStats& stats) {
  std::map<NELabel, long> out;
  for (auto [label, pct] : stats.class_percentages) out[label] = std::lround(pct);
  return out;
}

std::string format_stats_table(const CorpusStats& stats) {
  char buf[128];
  std::string out;
  auto row = [&](const char* name, std::size_t value) {
    std::snprintf(buf, sizeof buf, "%-50s %zu\n", name, value);
    out += buf;
  };
  row("Wikipedia category pages accessed", stats.pages_accessed);
  row("Hyperlink based tokens, multi-tokens generated", stats.links_extracted);
  row("Probable NEs after duplicate removal", stats.probable_after_dedup);
  row("Total selected NEs", stats.selected);
  std::snprintf(buf, sizeof buf, "%-50s %.2f %%\n", "NE density", stats.ne_density);
  out += buf;
  if (stats.class_counts.empty()) return out;

  out += "\nNER tagset      %   Number of entities\n";
  auto pct = display_percentages(stats);
  std::size_t total = 0;
  long total_pct = 0;
  for (auto [label, n] : stats.class_counts) {
    std::snprintf(buf, sizeof buf, "%-10s %6ld   %zu\n", std::string(to_string(label)).c_str(),
                  pct[label], n);
    out += buf;
    total += n;
    total_pct += pct[label];
  }
  std::snprintf(buf, sizeof buf, "%-10s %6ld   %zu\n", "Overall", total_pct, total);
  out += buf;
  return out;
}

CorpusFormat parse_corpus_format(std::string_view text) {
  if (text == "tsv") return CorpusFormat::Tsv;
  if (text == "jsonl") return CorpusFormat::Jsonl;
  throw std::invalid_argument("unknown corpus format '" + std::string(text) + "'");
}

void to_json(nlohmann::ordered_json& j, const EntityRecord& r) {
  nlohmann::ordered_json annotations = nlohmann::ordered_json::object();
  for (const auto& [who, label] : r.annotations) annotations[who] = to_string(label);
  nlohmann::ordered_json provenance = nlohmann::ordered_json::array();
  for (const auto& p : r.provenance) {
    provenance.push_back({{"source_title", p.source_title}, {"target_title", p.target_title}});
  }
  j = nlohmann::ordered_json{
      {"id", r.id},
      {"surface", r.surface},
      {"candidate", r.candidate},
      {"annotations", annotations},
      {"final_label", r.final_label ? nlohmann::ordered_json(to_string(*r.final_label))
                                    : nlohmann::ordered_json(nullptr)},
      {"provenance", provenance}};
}

void from_json(const nlohmann::ordered_json& j, EntityRecord& r) {
  j.at("surface").get_to(r.surface);
  r.id = j.value("id", entity_id(r.surface));
  if (r.id != entity_id(r.surface)) {
    throw std::invalid_argument("id does not match surface '" + r.surface + "'");
  }
  r.candidate = j.at("candidate").get<candidates::Candidate>();
  r.annotations.clear();
  for (const auto& [who, label] : j.at("annotations").items()) {
    r.annotations[who] = parse_label(label.get<std::string>());
  }
  const auto& fl = j.at("final_label");
  r.final_label = fl.is_null() ? std::nullopt : std::optional(parse_label(fl.get<std::string>()));
  r.provenance.clear();
  for (const auto& p : j.at("provenance")) {
    r.provenance.push_back({p.at("source_title").get<std::string>(),
                            p.at("target_title").get<std::string>()});
  }
}

std::string records_to_jsonl(std::span<const EntityRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += nlohmann::ordered_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<EntityRecord> records_from_jsonl(std::string_view text) {
  std::vector<EntityRecord> out;
  auto lines = util::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    try {
      out.push_back(nlohmann::ordered_json::parse(lines[n]).get<EntityRecord>());
    } catch (const std::exception& e) {
      throw ParseError(n + 1, e.what());
    }
  }
  return out;
}

std::string export_corpus(std::span<const EntityRecord> records, CorpusFormat format) {
  std::vector<std::string> unlabeled;
  for (const auto& r : records) {
    if (!r.final_label) unlabeled.push_back(r.id);
  }
  if (!unlabeled.empty()) {
    throw UnlabeledRecord(std::to_string(unlabeled.size()) + " record(s) have no final label",
                          unlabeled);
  }
  std::vector<const EntityRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const EntityRecord* a, const EntityRecord* b) { return a->surface < b->surface; });

  std::string out;
  for (const EntityRecord* r : sorted) {
    if (format == CorpusFormat::Tsv) {
      out += r->surface + "\t" + std::string(to_string(*r->final_label)) + "\n";
    } else {
      out += nlohmann::ordered_json(*r).dump() + "\n";
    }
  }
  return out;
}

void write_corpus(const std::filesystem::path& path, std::span<const EntityRecord> records,
                  CorpusFormat format) {
  util::write_file_atomic(path, export_corpus(records, format));
}

std::vector<EntityRecord> import_corpus(std::string_view text, CorpusFormat format) {
  std::vector<EntityRecord> records;
  if (format == CorpusFormat::Jsonl) {
    records = records_from_jsonl(text);
  } else {
    auto lines = util::split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
      std::string line = lines[n];
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError(n + 1, "expected surface<TAB>LABEL");
      std::string surface = line.substr(0, tab);
      std::string label_text = line.substr(tab + 1);
      if (surface.empty()) throw ParseError(n + 1, "empty surface");
      auto label = try_parse_label(label_text);
      if (!label) throw ParseError(n + 1, "invalid label '" + label_text + "'");
      candidates::Candidate c;
      c.surface = surface;
      c.selected = true;
      EntityRecord r = make_record(std::move(c));
      r.final_label = label;
      records.push_back(std::move(r));
    }
  }
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.surface).second) {
      throw DuplicateSurface("duplicate surface '" + r.surface + "'", {r.surface});
    }
  }
  return records;
}

std::vector<EntityRecord> read_corpus(const std::filesystem::path& path, CorpusFormat format) {
  return import_corpus(util::read_file(path), format);
}

nlohmann::ordered_json stats_to_json(const CorpusStats& stats) {
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  nlohmann::ordered_json pcts = nlohmann::ordered_json::object();
  for (auto [label, n] : stats.class_counts) counts[std::string(to_string(label))] = n;
  for (auto [label, p] : stats.class_percentages) pcts[std::string(to_string(label))] = p;
  return {{"pages_accessed", stats.pages_accessed},
          {"links_extracted", stats.links_extracted},
          {"probable_after_dedup", stats.probable_after_dedup},
          {"selected", stats.selected},
          {"ne_density", stats.ne_density},
          {"class_counts", counts},
          {"class_percentages", pcts}};
}

}  // namespace wikiner::corpus
