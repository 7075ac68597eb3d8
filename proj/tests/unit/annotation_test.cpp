#include <atomic>
#include <filesystem>
#include <random>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "wikiner/annotation/server.hpp"
#include "wikiner/error.hpp"
#include "wikiner/util/files.hpp"

using namespace wikiner;
using namespace wikiner::annotation;
using corpus::NELabel;

namespace {

std::vector<EntityRecord> entities(std::size_t n, std::size_t unselected = 0) {
  std::vector<EntityRecord> out;
  for (std::size_t i = 0; i < n + unselected; ++i) {
    candidates::Candidate c;
    char buf[32];
    std::snprintf(buf, sizeof buf, "Entity %03zu", i);
    c.surface = buf;
    c.selected = i < n;
    out.push_back(corpus::make_record(std::move(c), {{"Category:Test", buf}}));
  }
  // Scramble input order; the service must sort by surface itself.
  std::reverse(out.begin(), out.end());
  return out;
}

Clock fixed_clock() {
  auto tick = std::make_shared<int>(0);
  return [tick] { return "2026-01-01T00:00:" + std::to_string(10 + (*tick)++ % 50) + "Z"; };
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wikiner_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

const char* name_of(NELabel l) { return corpus::to_string(l).data(); }

}  // namespace

TEST_CASE("next_task walks surfaces in order") {
  AnnotationService svc(entities(3, 2), Roster{{"asha", "bilal"}}, {}, fixed_clock());
  auto first = svc.next_task("asha");
  REQUIRE(first);
  CHECK(first->surface == "Entity 000");
  svc.submit_label("asha", first->id, "PER");
  CHECK(svc.next_task("asha")->surface == "Entity 001");
  CHECK(svc.next_task("bilal")->surface == "Entity 000");
  for (auto& r : svc.records()) svc.submit_label("asha", r.id, "LOC");
  CHECK_FALSE(svc.next_task("asha"));
  CHECK_THROWS_AS(svc.next_task("nobody"), UnknownAnnotator);
  CHECK(svc.progress().total == 3);
}

TEST_CASE("submit_label contracts") {
  AnnotationService svc(entities(4), Roster{{"asha", "bilal", "chen"}}, {}, fixed_clock());
  auto id = svc.records()[0].id;
  svc.submit_label("asha", id, "PER");
  CHECK(svc.progress().annotators[0].labeled == 1);
  CHECK(svc.progress().annotators[2].primary == false);
  svc.submit_label("asha", id, "ORG");
  CHECK(svc.records()[0].annotations.at("asha") == NELabel::ORG);
  CHECK(svc.events().size() == 2);
  CHECK(svc.progress().annotators[0].labeled == 1);
  CHECK_THROWS_AS(svc.submit_label("asha", id, "GPE"), InvalidLabel);
  CHECK_THROWS_AS(svc.submit_label("asha", "feedfacefeedface", "PER"), UnknownEntity);
  CHECK_THROWS_AS(svc.submit_label("zoe", id, "PER"), UnknownAnnotator);
  CHECK(svc.events().size() == 2);
}

TEST_CASE("agreement examples") {
  auto recs = entities(10);
  AnnotationService svc(recs, Roster{{"a", "b"}}, {}, fixed_clock());
  auto empty = svc.agreement();
  CHECK(empty.empty);
  CHECK_FALSE(empty.percent_agreement);
  CHECK_FALSE(empty.kappa);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const char* label = i % 2 ? "PER" : "LOC";
    svc.submit_label("a", recs[i].id, label);
    svc.submit_label("b", recs[i].id, label);
  }
  auto full = svc.agreement();
  CHECK(*full.percent_agreement == 100.0);
  CHECK(*full.kappa == 1.0);

  AnnotationService lonely(recs, Roster{{"a"}}, {}, fixed_clock());
  CHECK_THROWS_AS(lonely.agreement(), NotEnoughAnnotators);
}

TEST_CASE("cohen kappa by hand") {
  // Rows: rater A, columns: rater B. po = 0.7; marginals A (25, 25), B (30, 20)
  // pe = 0.5*0.6 + 0.5*0.4 = 0.5 -> kappa = 0.2 / 0.5 = 0.4.
  std::vector<std::vector<std::size_t>> t = {{20, 5, 0, 0}, {10, 15, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
  CHECK(cohen_kappa(t) == doctest::Approx(0.4).epsilon(1e-12));
  std::vector<std::vector<std::size_t>> same = {{7, 0}, {0, 0}};
  CHECK(cohen_kappa(same) == 1.0);
}

TEST_CASE("agreement properties over random labelings") {
  std::mt19937_64 rng(31);
  for (int iter = 0; iter < 60; ++iter) {
    auto recs = entities(5 + rng() % 40);
    AnnotationService ab(recs, Roster{{"a", "b"}}, {}, fixed_clock());
    AnnotationService ba(recs, Roster{{"b", "a"}}, {}, fixed_clock());
    AnnotationService clone(recs, Roster{{"a", "c"}}, {}, fixed_clock());
    std::size_t both = 0, agree = 0;
    std::set<NELabel> used;
    for (auto& r : recs) {
      auto la = corpus::kAllLabels[rng() % 4];
      auto lb = rng() % 3 ? la : corpus::kAllLabels[rng() % 4];
      used.insert(la);
      for (auto* s : {&ab, &ba}) {
        s->submit_label("a", r.id, name_of(la));
        if (rng() % 5) s->submit_label("b", r.id, name_of(lb));
      }
      clone.submit_label("a", r.id, name_of(la));
      clone.submit_label("c", r.id, name_of(la));
    }
    for (auto& r : ab.records()) {
      if (r.annotations.count("b")) {
        ++both;
        agree += r.annotations.at("a") == r.annotations.at("b");
      }
    }
    // The two services diverge in which items b skipped, so compare each to its own oracle.
    auto rep = ab.agreement();
    CHECK(rep.n_labeled_by_both == both);
    CHECK(rep.n_agree == agree);
    if (both) CHECK(*rep.percent_agreement == 100.0 * agree / both);
    auto sym = ba.agreement();
    std::size_t both2 = 0, agree2 = 0;
    for (auto& r : ba.records()) {
      if (r.annotations.count("b")) {
        ++both2;
        agree2 += r.annotations.at("a") == r.annotations.at("b");
      }
    }
    CHECK(sym.n_agree == agree2);
    CHECK(sym.n_labeled_by_both == both2);
    if (used.size() >= 2) {
      auto c = clone.agreement();
      CHECK(*c.percent_agreement == 100.0);
      CHECK(*c.kappa == 1.0);
    }
  }
}

TEST_CASE("agreement is symmetric in the primary annotators") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 40; ++iter) {
    auto recs = entities(3 + rng() % 30);
    std::vector<std::tuple<std::string, std::string, NELabel>> script;
    for (auto& r : recs) {
      for (const char* who : {"a", "b"}) {
        if (rng() % 6) script.emplace_back(who, r.id, corpus::kAllLabels[rng() % 4]);
      }
    }
    AnnotationService ab(recs, Roster{{"a", "b"}}, {}, fixed_clock());
    AnnotationService ba(recs, Roster{{"b", "a"}}, {}, fixed_clock());
    for (auto& [who, id, label] : script) {
      ab.submit_label(who, id, name_of(label));
      ba.submit_label(who, id, name_of(label));
    }
    auto x = ab.agreement(), y = ba.agreement();
    CHECK(x.n_agree == y.n_agree);
    CHECK(x.percent_agreement == y.percent_agreement);
    if (x.kappa) CHECK(*x.kappa == doctest::Approx(*y.kappa).epsilon(1e-12));
  }
}

TEST_CASE("adjudication and finalize") {
  auto recs = entities(3);
  AnnotationService svc(recs, Roster{{"a", "b"}}, {}, fixed_clock());
  auto sorted = svc.records();
  svc.submit_label("a", sorted[0].id, "PER");
  svc.submit_label("b", sorted[0].id, "PER");
  svc.submit_label("a", sorted[1].id, "ORG");
  svc.submit_label("b", sorted[1].id, "LOC");
  svc.submit_label("a", sorted[2].id, "LOC");

  CHECK_THROWS_AS(svc.adjudicate(sorted[0].id, "LOC"), NotDisagreed);
  CHECK_THROWS_AS(svc.adjudicate(sorted[2].id, "LOC"), NotDisagreed);
  CHECK_THROWS_AS(svc.adjudicate("nope", "LOC"), UnknownEntity);
  CHECK(svc.open_disagreements().size() == 1);
  try {
    svc.finalize();
    FAIL("expected Unresolved");
  } catch (const Unresolved& e) {
    CHECK(e.details() == std::vector<std::string>{sorted[1].id, sorted[2].id});
  }
  svc.adjudicate(sorted[1].id, "MISC");
  CHECK(svc.open_disagreements().empty());
  CHECK(svc.agreement().disagreements.size() == 1);
  svc.submit_label("b", sorted[2].id, "LOC");
  auto final_records = svc.finalize();
  REQUIRE(final_records.size() == 3);
  CHECK(final_records[0].final_label == NELabel::PER);
  CHECK(final_records[1].final_label == NELabel::MISC);
  CHECK(final_records[2].final_label == NELabel::LOC);
  auto p = svc.progress();
  CHECK(p.agreed == 2);
  CHECK(p.adjudicated == 1);
  CHECK(p.open_disagreements == 0);
}

TEST_CASE("finalize never invents labels") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 40; ++iter) {
    auto recs = entities(2 + rng() % 20);
    AnnotationService svc(recs, Roster{{"a", "b", "obs"}}, {}, fixed_clock());
    std::map<std::string, std::set<NELabel>> offered;
    for (auto& r : recs) {
      for (const char* who : {"a", "b", "obs"}) {
        auto l = corpus::kAllLabels[rng() % 4];
        svc.submit_label(who, r.id, name_of(l));
        offered[r.id].insert(l);
      }
    }
    for (auto& d : svc.open_disagreements()) {
      auto l = corpus::kAllLabels[rng() % 4];
      svc.adjudicate(d.entity_id, name_of(l));
      offered[d.entity_id].insert(l);
    }
    auto final_records = svc.finalize();
    CHECK(final_records.size() == recs.size());
    for (auto& r : final_records) CHECK(offered[r.id].count(*r.final_label) == 1);
  }
}

TEST_CASE("journal replay reconstructs state") {
  auto dir = temp_dir("journal");
  auto journal = dir / "annotations.jsonl";
  auto recs = entities(15);
  std::mt19937_64 rng(12);
  {
    AnnotationService svc(recs, Roster{{"a", "b", "c"}}, journal, fixed_clock());
    for (int step = 0; step < 80; ++step) {
      const char* who = std::array{"a", "b", "c"}[rng() % 3];
      svc.submit_label(who, recs[rng() % recs.size()].id, name_of(corpus::kAllLabels[rng() % 4]));
      if (step % 10 == 9) {
        auto open = svc.open_disagreements();
        if (!open.empty()) svc.adjudicate(open.front().entity_id, "MISC");
      }
    }
    AnnotationService replayed(recs, Roster{{"a", "b", "c"}}, journal, fixed_clock());
    CHECK(replayed.records() == svc.records());
    CHECK(replayed.events() == svc.events());
    CHECK(agreement_to_json(replayed.agreement()) == agreement_to_json(svc.agreement()));
    CHECK(progress_to_json(replayed.progress()) == progress_to_json(svc.progress()));
    CHECK(util::split_lines(util::read_file(journal)).size() == svc.events().size());
  }
  util::append_line_durable(journal, "{not json");
  CHECK_THROWS_AS(AnnotationService(recs, Roster{{"a", "b", "c"}}, journal), ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("concurrent submissions are all kept") {
  auto dir = temp_dir("concurrent");
  auto recs = entities(40);
  AnnotationService svc(recs, Roster{{"a", "b", "c", "d"}}, dir / "annotations.jsonl");
  std::vector<std::jthread> workers;
  for (const char* who : {"a", "b", "c", "d"}) {
    workers.emplace_back([&svc, who] {
      while (auto task = svc.next_task(who)) svc.submit_label(who, task->id, "PER");
    });
  }
  workers.clear();
  CHECK(svc.events().size() == 160);
  for (auto& p : svc.progress().annotators) CHECK(p.labeled == 40);
  AnnotationService replayed(recs, Roster{{"a", "b", "c", "d"}}, dir / "annotations.jsonl");
  CHECK(replayed.records() == svc.records());
  std::filesystem::remove_all(dir);
}

TEST_CASE("error codes map to HTTP statuses") {
  CHECK(http_status_for("UnknownAnnotator") == 404);
  CHECK(http_status_for("UnknownEntity") == 404);
  CHECK(http_status_for("InvalidLabel") == 400);
  CHECK(http_status_for("NotDisagreed") == 409);
  CHECK(http_status_for("Unresolved") == 409);
  CHECK(http_status_for("NotEnoughAnnotators") == 409);
  CHECK(http_status_for("Whatever") == 500);
}

TEST_CASE("HTTP API end to end") {
  auto dir = temp_dir("http");
  auto recs = entities(5);
  AnnotationService svc(recs, Roster{{"a", "b"}}, dir / "annotations.jsonl", fixed_clock());
  ServerOptions opts;
  opts.port = 0;
  opts.corpus_path = dir / "corpus.tsv";
  AnnotationServer server(svc, opts);
  const int port = server.bind();
  std::thread loop([&] { server.listen(); });
  server.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);

  auto next = cli.Get("/api/tasks/next?annotator=a");
  REQUIRE(next);
  CHECK(next->status == 200);
  auto task = nlohmann::json::parse(next->body);
  CHECK(task["surface"] == "Entity 000");
  CHECK(task["progress"]["total"] == 5);

  auto bad = cli.Get("/api/tasks/next?annotator=zed");
  CHECK(bad->status == 404);
  auto err = nlohmann::json::parse(bad->body);
  CHECK(err["code"] == "UnknownAnnotator");
  CHECK(err.contains("message"));
  CHECK(err["details"] == nlohmann::json::array({"zed"}));

  auto gpe = cli.Post("/api/labels", R"({"entity_id":")" + task["id"].get<std::string>() +
                                         R"(","annotator":"a","label":"GPE"})",
                      "application/json");
  CHECK(gpe->status == 400);
  CHECK(nlohmann::json::parse(gpe->body)["code"] == "InvalidLabel");
  CHECK(cli.Post("/api/labels", "{oops", "application/json")->status == 400);
  CHECK(cli.Post("/api/labels", R"({"entity_id":"x","annotator":"a","label":"PER"})", "application/json")->status == 404);

  httplib::Headers as_b = {{"X-Annotator", "b"}};
  for (auto& r : svc.records()) {
    const std::string label = r.surface == "Entity 003" ? "ORG" : "PER";
    nlohmann::json body = {{"entity_id", r.id}, {"label", "PER"}, {"annotator", "a"}};
    CHECK(cli.Post("/api/labels", body.dump(), "application/json")->status == 200);
    nlohmann::json body_b = {{"entity_id", r.id}, {"label", label}};
    CHECK(cli.Post("/api/labels", as_b, body_b.dump(), "application/json")->status == 200);
  }
  CHECK(cli.Get("/api/tasks/next", as_b)->status == 204);
  auto agreement = nlohmann::json::parse(cli.Get("/api/agreement")->body);
  CHECK(agreement["percent_agreement"] == 80.0);
  CHECK(agreement["n_labeled_by_both"] == 5);
  CHECK(cli.Get("/api/agreement")->body == agreement_to_json(svc.agreement()).dump());

  CHECK(cli.Post("/api/finalize", "", "application/json")->status == 409);
  CHECK(cli.Get("/api/export?format=tsv")->status == 409);
  auto queue = nlohmann::json::parse(cli.Get("/api/disagreements")->body);
  REQUIRE(queue.size() == 1);
  CHECK(queue[0]["labels"]["b"] == "ORG");
  auto agreed_id = svc.records()[0].id;
  CHECK(cli.Post("/api/adjudications", nlohmann::json{{"entity_id", agreed_id}, {"label", "LOC"}}.dump(),
                 "application/json")->status == 409);
  CHECK(cli.Post("/api/adjudications", nlohmann::json{{"entity_id", queue[0]["entity_id"]}, {"label", "ORG"}}.dump(),
                 "application/json")->status == 200);
  CHECK(nlohmann::json::parse(cli.Get("/api/disagreements")->body).empty());

  auto fin = cli.Post("/api/finalize", "", "application/json");
  REQUIRE(fin->status == 200);
  CHECK(nlohmann::json::parse(fin->body)["entities"] == 5);
  auto tsv = cli.Get("/api/export?format=tsv");
  CHECK(tsv->status == 200);
  CHECK(tsv->body == util::read_file(dir / "corpus.tsv"));
  CHECK(std::count(tsv->body.begin(), tsv->body.end(), '\n') == 5);
  CHECK(tsv->body.find("Entity 003\tORG\n") != std::string::npos);
  CHECK(cli.Get("/api/export?format=jsonl")->status == 200);
  CHECK(cli.Get("/api/export?format=xml")->status == 400);
  auto progress = nlohmann::json::parse(cli.Get("/api/progress")->body);
  CHECK(progress["adjudicated"] == 1);

  server.stop();
  loop.join();
  std::filesystem::remove_all(dir);
}
