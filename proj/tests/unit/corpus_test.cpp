#include <random>

#include "doctest.h"
#include "wikiner/corpus/store.hpp"
#include "wikiner/error.hpp"

using namespace wikiner;
using namespace wikiner::corpus;

namespace {

EntityRecord labeled(const std::string& surface, NELabel label) {
  candidates::Candidate c;
  c.surface = surface;
  c.selected = true;
  EntityRecord r = make_record(std::move(c));
  r.final_label = label;
  return r;
}

std::vector<EntityRecord> table2_records() {
  std::vector<EntityRecord> records;
  const std::pair<NELabel, int> mix[] = {
      {NELabel::PER, 1883}, {NELabel::LOC, 492}, {NELabel::ORG, 388}, {NELabel::MISC, 153}};
  for (auto [label, n] : mix) {
    for (int i = 0; i < n; ++i) {
      records.push_back(labeled(std::string(to_string(label)) + " " + std::to_string(i), label));
    }
  }
  return records;
}

}  // namespace

TEST_CASE("labels") {
  CHECK(parse_label("LOC") == NELabel::LOC);
  CHECK_THROWS_AS(parse_label("GPE"), InvalidLabel);
  CHECK_THROWS_AS(parse_label("O"), InvalidLabel);
  CHECK_THROWS_AS(parse_label("per"), InvalidLabel);
}

TEST_CASE("entity ids are a pure function of the surface") {
  CHECK(entity_id("New Delhi") == entity_id("New Delhi"));
  CHECK(entity_id("New Delhi") != entity_id("new Delhi"));
  CHECK(entity_id("New Delhi").size() == 16);
}

TEST_CASE("compute_stats reproduces the corpus statistics tables") {
  auto stats = compute_stats({}, {13, 7285, 5401, 2916});
  CHECK(stats.ne_density == doctest::Approx(40.03).epsilon(1e-12));
  CHECK(std::abs(stats.ne_density - 40.02) <= 0.02 + 1e-9);
  CHECK(stats.class_counts.empty());

  auto records = table2_records();
  auto full = compute_stats(records, {13, 7285, 5401, 2916});
  auto pct = display_percentages(full);
  CHECK(pct[NELabel::PER] == 65);
  CHECK(pct[NELabel::LOC] == 17);
  CHECK(pct[NELabel::ORG] == 13);
  CHECK(pct[NELabel::MISC] == 5);
  std::size_t total = 0;
  for (auto [label, n] : full.class_counts) total += n;
  CHECK(total == 2916);
  CHECK(full.class_percentages[NELabel::PER] == doctest::Approx(100.0 * 1883 / 2916));
  CHECK(format_stats_table(full).find("NE density") != std::string::npos);
}

TEST_CASE("compute_stats zero and error cases") {
  auto zero = compute_stats({}, {0, 0, 0, 0});
  CHECK(zero.ne_density == 0.0);
  CHECK(zero.class_counts.empty());
  auto no_selection = compute_stats({}, {2, 10, 5, 0});
  CHECK(no_selection.ne_density == 0.0);
  CHECK_THROWS_AS(compute_stats({}, {1, 10, 11, 3}), InconsistentCounts);
  CHECK_THROWS_AS(compute_stats({}, {1, 10, 5, 6}), InconsistentCounts);
  std::vector<EntityRecord> two = {labeled("a", NELabel::PER), labeled("b", NELabel::LOC)};
  CHECK_THROWS_AS(compute_stats(two, {1, 10, 5, 1}), InconsistentCounts);
}

TEST_CASE("ne_density is scale invariant") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t links = 1 + rng() % 10000;
    std::size_t selected = rng() % (links + 1);
    std::size_t k = 1 + rng() % 50;
    auto base = compute_stats({}, {1, links, selected, selected});
    auto scaled = compute_stats({}, {1, links * k, selected * k, selected * k});
    CHECK(base.ne_density == scaled.ne_density);
  }
}

TEST_CASE("tsv export format") {
  std::vector<EntityRecord> one = {labeled("New Delhi", NELabel::LOC)};
  CHECK(export_corpus(one, CorpusFormat::Tsv) == "New Delhi\tLOC\n");
  std::vector<EntityRecord> two = {labeled("Patna", NELabel::LOC), labeled("Agra", NELabel::LOC)};
  CHECK(export_corpus(two, CorpusFormat::Tsv) == "Agra\tLOC\nPatna\tLOC\n");

  candidates::Candidate c;
  c.surface = "Kanpur";
  std::vector<EntityRecord> unlabeled = {make_record(c), labeled("Agra", NELabel::LOC)};
  try {
    export_corpus(unlabeled, CorpusFormat::Tsv);
    FAIL("expected UnlabeledRecord");
  } catch (const UnlabeledRecord& e) {
    CHECK(e.details() == std::vector<std::string>{entity_id("Kanpur")});
  }
}

TEST_CASE("tsv import") {
  auto records = import_corpus("New Delhi\tLOC\n", CorpusFormat::Tsv);
  REQUIRE(records.size() == 1);
  CHECK(records[0].final_label == NELabel::LOC);
  CHECK(records[0].id == entity_id("New Delhi"));

  try {
    import_corpus("Agra\tLOC\nX\tBADLABEL\n", CorpusFormat::Tsv);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(import_corpus("no tab here\n", CorpusFormat::Tsv), ParseError);
  CHECK_THROWS_AS(import_corpus("Agra\tLOC\nAgra\tPER\n", CorpusFormat::Tsv), DuplicateSurface);
}

TEST_CASE("export and import are inverse") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EntityRecord> records;
    for (std::size_t i = 0, n = rng() % 20; i < n; ++i) {
      auto label = kAllLabels[rng() % 4];
      auto r = labeled("Entity " + std::to_string(rng() % 1000) + "-" + std::to_string(i), label);
      r.annotations["a1"] = label;
      r.annotations["a2"] = kAllLabels[rng() % 4];
      r.provenance.push_back({"Category:Bihar", r.surface});
      records.push_back(r);
    }
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.surface < b.surface; });

    std::string jsonl = export_corpus(records, CorpusFormat::Jsonl);
    CHECK(import_corpus(jsonl, CorpusFormat::Jsonl) == records);
    CHECK(export_corpus(import_corpus(jsonl, CorpusFormat::Jsonl), CorpusFormat::Jsonl) == jsonl);

    std::string tsv = export_corpus(records, CorpusFormat::Tsv);
    auto back = import_corpus(tsv, CorpusFormat::Tsv);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].surface == records[i].surface);
      CHECK(back[i].final_label == records[i].final_label);
      CHECK(back[i].id == records[i].id);
    }
    CHECK(export_corpus(back, CorpusFormat::Tsv) == tsv);
  }
}
