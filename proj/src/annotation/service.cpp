#include "wikiner/annotation/service.hpp"

#include <algorithm>
#include <mutex>

#include "wikiner/error.hpp"
#include "wikiner/util/time.hpp"
#include "wikiner/util/files.hpp"

namespace wikiner::annotation {

namespace {

std::string label_name(NELabel label) { return std::string(corpus::to_string(label)); }

}  // namespace

bool Roster::contains(std::string_view id) const {
  return std::find(annotators.begin(), annotators.end(), id) != annotators.end();
}

bool Roster::is_primary(std::string_view id) const {
  for (std::size_t i = 0; i < annotators.size() && i < 2; ++i) {
    if (annotators[i] == id) return true;
  }
  return false;
}

nlohmann::ordered_json event_to_json(const AnnotationEvent& e) {
  nlohmann::ordered_json j;
  j["type"] = e.type == EventType::Label ? "label" : "adjudication";
  j["entity_id"] = e.entity_id;
  if (e.type == EventType::Label) j["annotator"] = e.annotator;
  j["label"] = label_name(e.label);
  j["submitted_at"] = e.submitted_at;
  return j;
}

AnnotationEvent event_from_json(const nlohmann::ordered_json& j) {
  AnnotationEvent e;
  const auto type = j.at("type").get<std::string>();
  if (type == "label") {
    e.type = EventType::Label;
    e.annotator = j.at("annotator").get<std::string>();
  } else if (type == "adjudication") {
    e.type = EventType::Adjudication;
  } else {
    throw std::invalid_argument("unknown event type '" + type + "'");
  }
  e.entity_id = j.at("entity_id").get<std::string>();
  e.label = corpus::parse_label(j.at("label").get<std::string>());
  e.submitted_at = j.at("submitted_at").get<std::string>();
  return e;
}

double cohen_kappa(const std::vector<std::vector<std::size_t>>& table) {
  const std::size_t k = table.size();
  double n = 0, diag = 0;
  std::vector<double> rows(k, 0), cols(k, 0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const auto v = static_cast<double>(table[a][b]);
      n += v;
      rows[a] += v;
      cols[b] += v;
      if (a == b) diag += v;
    }
  }
  if (n == 0) throw std::invalid_argument("kappa of an empty table");
  const double po = diag / n;
  double pe = 0;
  for (std::size_t c = 0; c < k; ++c) pe += (rows[c] / n) * (cols[c] / n);
  if (pe == 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

AnnotationService::AnnotationService(std::vector<EntityRecord> records, Roster roster,
                                     std::filesystem::path journal, Clock clock)
    : roster_(std::move(roster)), journal_(std::move(journal)), clock_(std::move(clock)) {
  if (!clock_) clock_ = util::utc_timestamp_now;
  for (auto& r : records) {
    if (!r.candidate.selected) continue;
    r.annotations.clear();
    r.final_label.reset();
    entries_.push_back({std::move(r), std::nullopt});
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.record.surface < b.record.surface; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!by_id_.emplace(entries_[i].record.id, i).second) {
      throw DuplicateSurface("entity " + entries_[i].record.id + " appears twice",
                             {entries_[i].record.id});
    }
  }
  if (!journal_.empty() && std::filesystem::exists(journal_)) {
    auto lines = util::split_lines(util::read_file(journal_));
    for (std::size_t n = 0; n < lines.size(); ++n) {
      if (lines[n].empty()) continue;
      AnnotationEvent e;
      try {
        e = event_from_json(nlohmann::ordered_json::parse(lines[n]));
      } catch (const std::exception& ex) {
        throw ParseError(n + 1, std::string("journal: ") + ex.what());
      }
      if (!by_id_.count(e.entity_id)) throw ParseError(n + 1, "journal: unknown entity " + e.entity_id);
      if (e.type == EventType::Label && !roster_.contains(e.annotator)) {
        throw ParseError(n + 1, "journal: annotator '" + e.annotator + "' is not on the roster");
      }
      apply(e);
      events_.push_back(std::move(e));
    }
  }
}

void AnnotationService::check_annotator(std::string_view annotator) const {
  if (!roster_.contains(annotator)) {
    throw UnknownAnnotator("annotator '" + std::string(annotator) + "' is not on the roster",
                           {std::string(annotator)});
  }
}

AnnotationService::Entry& AnnotationService::entry(std::string_view entity_id) {
  auto it = by_id_.find(std::string(entity_id));
  if (it == by_id_.end()) {
    throw UnknownEntity("no selected entity with id '" + std::string(entity_id) + "'",
                        {std::string(entity_id)});
  }
  return entries_[it->second];
}

const AnnotationService::Entry& AnnotationService::entry(std::string_view entity_id) const {
  return const_cast<AnnotationService*>(this)->entry(entity_id);
}

void AnnotationService::apply(const AnnotationEvent& e) {
  Entry& en = entry(e.entity_id);
  if (e.type == EventType::Label) {
    en.record.annotations[e.annotator] = e.label;
  } else {
    en.adjudicated = e.label;
  }
}

void AnnotationService::append(const AnnotationEvent& e) {
  if (!journal_.empty()) util::append_line_durable(journal_, event_to_json(e).dump());
  apply(e);
  events_.push_back(e);
}

std::optional<EntityRecord> AnnotationService::next_task(std::string_view annotator) const {
  std::shared_lock lock(mutex_);
  check_annotator(annotator);
  for (const auto& en : entries_) {
    if (!en.record.annotations.count(std::string(annotator))) return en.record;
  }
  return std::nullopt;
}

AnnotationEvent AnnotationService::submit_label(std::string_view annotator, std::string_view entity_id,
                                                std::string_view label) {
  std::unique_lock lock(mutex_);
  check_annotator(annotator);
  entry(entity_id);
  AnnotationEvent e{EventType::Label, std::string(entity_id), std::string(annotator),
                    corpus::parse_label(label), clock_()};
  append(e);
  return e;
}

std::optional<NELabel> AnnotationService::agreed_label(const Entry& en) const {
  if (roster_.annotators.size() < 2) return std::nullopt;
  auto a = en.record.annotations.find(roster_.annotators[0]);
  auto b = en.record.annotations.find(roster_.annotators[1]);
  if (a == en.record.annotations.end() || b == en.record.annotations.end()) return std::nullopt;
  if (a->second != b->second) return std::nullopt;
  return a->second;
}

std::optional<Disagreement> AnnotationService::disagreement_of(const Entry& en) const {
  if (roster_.annotators.size() < 2) return std::nullopt;
  auto a = en.record.annotations.find(roster_.annotators[0]);
  auto b = en.record.annotations.find(roster_.annotators[1]);
  if (a == en.record.annotations.end() || b == en.record.annotations.end()) return std::nullopt;
  if (a->second == b->second) return std::nullopt;
  return Disagreement{en.record.id, en.record.surface, {*a, *b}, en.adjudicated};
}

Progress AnnotationService::progress() const {
  std::shared_lock lock(mutex_);
  Progress p;
  p.total = entries_.size();
  for (const auto& id : roster_.annotators) {
    AnnotatorProgress ap{id, roster_.is_primary(id), 0, 0};
    for (const auto& en : entries_) ap.labeled += en.record.annotations.count(id);
    ap.remaining = p.total - ap.labeled;
    p.annotators.push_back(ap);
  }
  for (const auto& en : entries_) {
    if (agreed_label(en)) {
      ++p.labeled_by_both;
      ++p.agreed;
    } else if (auto d = disagreement_of(en)) {
      ++p.labeled_by_both;
      if (d->adjudicated) {
        ++p.adjudicated;
      } else {
        ++p.open_disagreements;
      }
    }
  }
  return p;
}

AgreementReport AnnotationService::agreement() const {
  std::shared_lock lock(mutex_);
  if (roster_.annotators.size() < 2) {
    throw NotEnoughAnnotators("agreement needs two annotators, the roster has " +
                              std::to_string(roster_.annotators.size()));
  }
  AgreementReport r;
  r.annotator_a = roster_.annotators[0];
  r.annotator_b = roster_.annotators[1];
  std::vector<std::vector<std::size_t>> table(4, std::vector<std::size_t>(4, 0));
  for (const auto& en : entries_) {
    auto a = en.record.annotations.find(r.annotator_a);
    auto b = en.record.annotations.find(r.annotator_b);
    if (a == en.record.annotations.end() || b == en.record.annotations.end()) continue;
    ++r.n_labeled_by_both;
    ++table[static_cast<std::size_t>(a->second)][static_cast<std::size_t>(b->second)];
    if (a->second == b->second) {
      ++r.n_agree;
    } else {
      r.disagreements.push_back(*disagreement_of(en));
    }
  }
  r.empty = r.n_labeled_by_both == 0;
  if (!r.empty) {
    r.percent_agreement =
        100.0 * static_cast<double>(r.n_agree) / static_cast<double>(r.n_labeled_by_both);
    r.kappa = cohen_kappa(table);
  }
  return r;
}

std::vector<Disagreement> AnnotationService::open_disagreements() const {
  std::shared_lock lock(mutex_);
  std::vector<Disagreement> out;
  for (const auto& en : entries_) {
    auto d = disagreement_of(en);
    if (d && !d->adjudicated) out.push_back(std::move(*d));
  }
  return out;
}

AnnotationEvent AnnotationService::adjudicate(std::string_view entity_id, std::string_view label) {
  std::unique_lock lock(mutex_);
  const Entry& en = entry(entity_id);
  const NELabel parsed = corpus::parse_label(label);
  if (!disagreement_of(en)) {
    throw NotDisagreed("entity '" + std::string(entity_id) +
                           "' is not a disagreement between the primary annotators",
                       {std::string(entity_id)});
  }
  AnnotationEvent e{EventType::Adjudication, std::string(entity_id), "", parsed, clock_()};
  append(e);
  return e;
}

std::vector<EntityRecord> AnnotationService::finalize() const {
  std::shared_lock lock(mutex_);
  std::vector<EntityRecord> out;
  std::vector<std::string> unresolved;
  for (const auto& en : entries_) {
    EntityRecord r = en.record;
    if (auto agreed = agreed_label(en)) {
      r.final_label = agreed;
    } else if (disagreement_of(en) && en.adjudicated) {
      r.final_label = en.adjudicated;
    } else {
      unresolved.push_back(r.id);
      continue;
    }
    out.push_back(std::move(r));
  }
  if (!unresolved.empty()) {
    throw Unresolved(std::to_string(unresolved.size()) + " entit" +
                         (unresolved.size() == 1 ? "y is" : "ies are") +
                         " neither agreed nor adjudicated",
                     unresolved);
  }
  return out;
}

std::vector<EntityRecord> AnnotationService::records() const {
  std::shared_lock lock(mutex_);
  std::vector<EntityRecord> out;
  for (const auto& en : entries_) out.push_back(en.record);
  return out;
}

std::vector<AnnotationEvent> AnnotationService::events() const {
  std::shared_lock lock(mutex_);
  return events_;
}

namespace {

nlohmann::ordered_json disagreement_json(const Disagreement& d) {
  nlohmann::ordered_json labels = nlohmann::ordered_json::object();
  for (const auto& [who, label] : d.labels) labels[who] = label_name(label);
  nlohmann::ordered_json j = {{"entity_id", d.entity_id}, {"surface", d.surface}, {"labels", labels}};
  j["adjudicated"] = d.adjudicated ? nlohmann::ordered_json(label_name(*d.adjudicated)) : nullptr;
  return j;
}

}  // namespace

nlohmann::ordered_json disagreements_to_json(const std::vector<Disagreement>& items) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& d : items) arr.push_back(disagreement_json(d));
  return arr;
}

nlohmann::ordered_json agreement_to_json(const AgreementReport& r) {
  nlohmann::ordered_json j = {{"annotators", {r.annotator_a, r.annotator_b}},
                              {"n_labeled_by_both", r.n_labeled_by_both},
                              {"n_agree", r.n_agree},
                              {"empty", r.empty}};
  j["percent_agreement"] = r.percent_agreement ? nlohmann::ordered_json(*r.percent_agreement) : nullptr;
  j["kappa"] = r.kappa ? nlohmann::ordered_json(*r.kappa) : nullptr;
  j["disagreements"] = disagreements_to_json(r.disagreements);
  return j;
}

nlohmann::ordered_json progress_to_json(const Progress& p) {
  auto annotators = nlohmann::ordered_json::array();
  for (const auto& a : p.annotators) {
    annotators.push_back({{"annotator", a.annotator},
                          {"role", a.primary ? "primary" : "observer"},
                          {"labeled", a.labeled},
                          {"remaining", a.remaining}});
  }
  return {{"total", p.total},
          {"annotators", annotators},
          {"labeled_by_both", p.labeled_by_both},
          {"agreed", p.agreed},
          {"open_disagreements", p.open_disagreements},
          {"adjudicated", p.adjudicated}};
}

}  // namespace wikiner::annotation
