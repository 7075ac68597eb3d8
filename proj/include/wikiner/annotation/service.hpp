#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "wikiner/corpus/store.hpp"

namespace wikiner::annotation {

using corpus::EntityRecord;
using corpus::NELabel;

// The first two annotators are the primaries whose labels count toward
// agreement; any further ones are observers.
struct Roster {
  std::vector<std::string> annotators;

  bool contains(std::string_view id) const;
  bool is_primary(std::string_view id) const;
};

enum class EventType { Label, Adjudication };

struct AnnotationEvent {
  EventType type = EventType::Label;
  std::string entity_id;
  std::string annotator;  // empty for adjudications
  NELabel label = NELabel::PER;
  std::string submitted_at;

  bool operator==(const AnnotationEvent&) const = default;
};

nlohmann::ordered_json event_to_json(const AnnotationEvent& e);
AnnotationEvent event_from_json(const nlohmann::ordered_json& j);

struct Disagreement {
  std::string entity_id;
  std::string surface;
  std::map<std::string, NELabel> labels;  // primary annotator -> label
  std::optional<NELabel> adjudicated;
};

struct AgreementReport {
  std::string annotator_a;
  std::string annotator_b;
  std::size_t n_labeled_by_both = 0;
  std::size_t n_agree = 0;
  bool empty = true;  // nothing labeled by both; percent and kappa are unset
  std::optional<double> percent_agreement;
  std::optional<double> kappa;
  std::vector<Disagreement> disagreements;
};

// Cohen's kappa from a square table of rater-A x rater-B counts.
// When chance agreement is 1 the raters used one identical label; kappa is 1.
double cohen_kappa(const std::vector<std::vector<std::size_t>>& table);

struct AnnotatorProgress {
  std::string annotator;
  bool primary = false;
  std::size_t labeled = 0;
  std::size_t remaining = 0;
};

struct Progress {
  std::size_t total = 0;
  std::vector<AnnotatorProgress> annotators;
  std::size_t labeled_by_both = 0;
  std::size_t agreed = 0;
  std::size_t open_disagreements = 0;
  std::size_t adjudicated = 0;
};

using Clock = std::function<std::string()>;

// Two-annotator labeling workflow over the selected entities. State is an
// event-sourced view of an append-only journal; an empty journal path keeps
// events in memory only. Safe for concurrent callers.
class AnnotationService {
 public:
  // Replays `journal` when it exists. Unselected records are ignored.
  AnnotationService(std::vector<EntityRecord> records, Roster roster,
                    std::filesystem::path journal = {}, Clock clock = {});

  const Roster& roster() const { return roster_; }

  // Lowest surface not yet labeled by the annotator. Throws UnknownAnnotator.
  std::optional<EntityRecord> next_task(std::string_view annotator) const;

  // Throws UnknownAnnotator, UnknownEntity, InvalidLabel.
  AnnotationEvent submit_label(std::string_view annotator, std::string_view entity_id,
                               std::string_view label);

  Progress progress() const;

  // Throws NotEnoughAnnotators with fewer than two annotators on the roster.
  AgreementReport agreement() const;

  // Disagreements still waiting for adjudication, ordered by surface.
  std::vector<Disagreement> open_disagreements() const;

  // Throws UnknownEntity, InvalidLabel, NotDisagreed.
  AnnotationEvent adjudicate(std::string_view entity_id, std::string_view label);

  // Records with final labels, ordered by surface. Throws Unresolved listing
  // entity ids that are neither agreed nor adjudicated.
  std::vector<EntityRecord> finalize() const;

  std::vector<EntityRecord> records() const;
  std::vector<AnnotationEvent> events() const;

 private:
  struct Entry {
    EntityRecord record;
    std::optional<NELabel> adjudicated;
  };

  void apply(const AnnotationEvent& e);
  void append(const AnnotationEvent& e);
  Entry& entry(std::string_view entity_id);
  const Entry& entry(std::string_view entity_id) const;
  std::optional<Disagreement> disagreement_of(const Entry& e) const;
  std::optional<NELabel> agreed_label(const Entry& e) const;
  void check_annotator(std::string_view annotator) const;

  Roster roster_;
  std::filesystem::path journal_;
  Clock clock_;
  std::vector<Entry> entries_;  // sorted by surface
  std::unordered_map<std::string, std::size_t> by_id_;
  std::vector<AnnotationEvent> events_;
  mutable std::shared_mutex mutex_;
};

nlohmann::ordered_json agreement_to_json(const AgreementReport& report);
nlohmann::ordered_json disagreements_to_json(const std::vector<Disagreement>& items);
nlohmann::ordered_json progress_to_json(const Progress& progress);

}  // namespace wikiner::annotation
