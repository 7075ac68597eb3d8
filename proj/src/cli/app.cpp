#include "wikiner/cli/app.hpp"

#include <csignal>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "CLI11.hpp"
#include "wikiner/annotation/server.hpp"
#include "wikiner/candidates/pipeline.hpp"
#include "wikiner/corpus/store.hpp"
#include "wikiner/error.hpp"
#include "wikiner/ml/validation.hpp"
#include "wikiner/util/files.hpp"

namespace wikiner::cli {

namespace fs = std::filesystem;

namespace {

// Throws MissingStageInput naming the subcommand that produces `path`.
const fs::path& require(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) {
    throw MissingStageInput(path.filename().string() + " not found in " + path.parent_path().string() +
                                "; run `wikiner " + producer + "` first",
                            {path.filename().string(), producer});
  }
  return path;
}

std::size_t count_lines(const fs::path& path) {
  std::size_t n = 0;
  for (const auto& line : util::split_lines(util::read_file(path))) n += !line.empty();
  return n;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

struct Options {
  std::string project = ".";
  // init
  std::string seeds_from;
  // fetch
  bool online = false;
  // candidates
  std::string tagger, pos_agg, wordtype_agg;
  // serve
  std::string host;
  int port = -1;
  std::string static_dir;
  // adjudicate
  std::string entity, label;
  // export
  std::string format = "tsv";
  std::string output;
  // evaluate / learning-curve
  std::string model;
  int folds = 0;
  long long seed = -1;
  bool without_misc = false;
  int threads = 0;
  int epochs = -1;
  std::string fractions;
};

class Project {
 public:
  Project(const Options& o, RunContext& ctx) : opts_(o), ctx_(ctx), dir_(o.project) {}

  fs::path path(const char* name) const { return dir_ / name; }
  const ProjectConfig& config() {
    if (!config_) config_ = load_config(dir_, ctx_.env);
    return *config_;
  }
  fs::path seed_list() { return dir_ / config().seed_list; }

  std::vector<std::string> seeds() {
    return ingest::parse_seed_list(util::read_file(require(seed_list(), "init")));
  }

  std::vector<corpus::EntityRecord> scored() {
    return corpus::records_from_jsonl(util::read_file(require(path(stage::kScored), "score")));
  }

  annotation::AnnotationService service() {
    return annotation::AnnotationService(scored(), annotation::Roster{config().annotators},
                                         path(stage::kAnnotations));
  }

  std::vector<ml::LabeledItem> labeled_items() {
    auto records = corpus::read_corpus(require(path(stage::kCorpus), "finalize"), corpus::CorpusFormat::Tsv);
    std::vector<ml::LabeledItem> items;
    for (const auto& r : records) items.push_back({r.surface, *r.final_label});
    return items;
  }

  ml::EvalConfig eval_config() {
    const auto& c = config();
    auto kind = ml::parse_model_kind(opts_.model.empty() ? c.model : opts_.model);
    auto e = ml::EvalConfig::for_model(kind);
    e.folds = static_cast<std::size_t>(opts_.folds > 0 ? opts_.folds : c.folds);
    e.seed = static_cast<std::uint64_t>(opts_.seed >= 0 ? opts_.seed : c.seed);
    e.include_misc = !opts_.without_misc;
    e.threads = static_cast<std::size_t>(opts_.threads > 0 ? opts_.threads : c.threads);
    if (opts_.epochs >= 0) e.hyperparams.epochs = opts_.epochs;
    return e;
  }

  fs::path output_or(const char* fallback) const {
    return opts_.output.empty() ? dir_ / fallback : fs::path(opts_.output);
  }

  std::ostream& out() { return ctx_.out; }

 private:
  const Options& opts_;
  RunContext& ctx_;
  fs::path dir_;
  std::optional<ProjectConfig> config_;
};

void cmd_init(const Options& o, Project& p) {
  if (!o.seeds_from.empty() && !fs::is_regular_file(o.seeds_from)) {
    throw std::invalid_argument("--seeds expects a seed list file (one title or URL per line); '" +
                                o.seeds_from + "' is not a file");
  }
  fs::create_directories(fs::path(o.project) / stage::kPages);
  auto cfg_path = fs::path(o.project) / kConfigFile;
  if (!fs::exists(cfg_path)) util::write_file_atomic(cfg_path, config_to_toml(ProjectConfig{}));
  auto seeds = p.seed_list();
  if (!o.seeds_from.empty()) {
    util::write_file_atomic(seeds, util::read_file(o.seeds_from));
  } else if (!fs::exists(seeds)) {
    util::write_file_atomic(seeds, "# One category title or Wikipedia URL per line.\n");
  }
  p.out() << "initialized project in " << fs::path(o.project).string() << "\n";
}

void cmd_fetch(const Options& o, Project& p, RunContext& ctx) {
  const auto& c = p.config();
  auto titles = p.seeds();
  ingest::PageCache cache(p.path(stage::kPages));
  fs::create_directories(cache.dir());
  std::vector<std::string> missing;
  for (const auto& t : titles) {
    if (!cache.load(t)) missing.push_back(t);
  }
  if (!missing.empty() && !o.online) {
    throw NetworkError(std::to_string(missing.size()) + " page(s) are not cached and the network is off; rerun with --online",
                       missing);
  }
  if (!missing.empty()) {
    ingest::FetchOptions fo;
    fo.online = true;
    fo.kind = ingest::parse_content_kind(c.content_kind);
    fo.base_url = c.base_url;
    fo.politeness_delay = std::chrono::milliseconds(c.politeness_delay_ms);
    auto transport = ctx.transport ? ctx.transport() : std::make_shared<ingest::CurlTransport>();
    ingest::PageFetcher fetcher(cache, transport, fo);
    for (const auto& t : missing) {
      fetcher.fetch(t);
      p.out() << "fetched " << t << "\n";
    }
  }
  p.out() << titles.size() << " page(s) cached, " << missing.size() << " fetched\n";
}

void cmd_extract(Project& p) {
  require(p.path(stage::kPages), "fetch");
  ingest::PageCache cache(p.path(stage::kPages));
  std::vector<ingest::WikiLink> links;
  std::size_t warnings = 0;
  auto titles = p.seeds();
  for (const auto& t : titles) {
    auto page = cache.load(t);
    if (!page) {
      throw MissingStageInput("page '" + t + "' is not in pages/; run `wikiner fetch` first", {t, "fetch"});
    }
    auto ex = ingest::parse_links(*page);
    warnings += ex.warnings;
    links.insert(links.end(), ex.links.begin(), ex.links.end());
  }
  util::write_file_atomic(p.path(stage::kLinks), ingest::links_to_jsonl(links));
  p.out() << "extracted " << links.size() << " links from " << titles.size() << " page(s)";
  if (warnings) p.out() << " (" << warnings << " malformed links skipped)";
  p.out() << "\n";
}

void cmd_candidates(const Options& o, Project& p) {
  const auto& c = p.config();
  auto links = ingest::links_from_jsonl(util::read_file(require(p.path(stage::kLinks), "extract")));
  std::vector<std::string> anchors;
  std::size_t empty = 0;
  for (const auto& l : links) {
    try {
      candidates::tokenize(l.anchor_text);
      anchors.push_back(l.anchor_text);
    } catch (const EmptySurface&) {
      ++empty;
    }
  }
  auto surfaces = candidates::dedup(anchors);
  const std::string selector = o.tagger.empty() ? c.tagger : o.tagger;
  std::unique_ptr<candidates::Tagger> tagger;
  if (selector == "heuristic" && !c.lexicon.empty()) {
    tagger = std::make_unique<candidates::HeuristicTagger>(candidates::load_lexicon(fs::path(o.project) / c.lexicon));
  } else {
    tagger = candidates::make_tagger(selector);
  }
  candidates::ScoringConfig sc;
  sc.pos_agg = candidates::parse_aggregation(o.pos_agg.empty() ? c.pos_aggregation : o.pos_agg);
  sc.wordtype_agg = candidates::parse_aggregation(o.wordtype_agg.empty() ? c.wordtype_aggregation : o.wordtype_agg);
  auto scored = candidates::score_candidates(surfaces, *tagger, sc);
  util::write_file_atomic(p.path(stage::kCandidates), candidates::candidates_to_jsonl(scored));
  std::size_t selected = 0;
  for (const auto& cand : scored) selected += cand.selected;
  p.out() << links.size() << " links -> " << surfaces.size() << " probable NEs (" << selected
          << " pass the confidence threshold)";
  if (empty) p.out() << "; " << empty << " anchors without tokens skipped";
  p.out() << "\n";
}

void cmd_score(Project& p) {
  auto cands = candidates::candidates_from_jsonl(util::read_file(require(p.path(stage::kCandidates), "candidates")));
  auto links = ingest::links_from_jsonl(util::read_file(require(p.path(stage::kLinks), "extract")));
  std::map<std::string, std::vector<corpus::Provenance>> prov;
  for (const auto& l : links) prov[l.anchor_text].push_back({l.source_title, l.target_title});
  std::vector<corpus::EntityRecord> records;
  for (auto& c : cands) {
    if (!c.selected) continue;
    auto it = prov.find(c.surface);
    records.push_back(corpus::make_record(c, it == prov.end() ? std::vector<corpus::Provenance>{} : it->second));
  }
  util::write_file_atomic(p.path(stage::kScored), corpus::records_to_jsonl(records));
  p.out() << records.size() << " of " << cands.size() << " probable NEs selected\n";
}

void cmd_stats(Project& p) {
  corpus::PipelineCounts counts;
  ingest::PageCache cache(require(p.path(stage::kPages), "fetch"));
  for (const auto& t : p.seeds()) counts.pages += fs::exists(cache.path_for(t));
  counts.links = count_lines(require(p.path(stage::kLinks), "extract"));
  counts.probable = count_lines(require(p.path(stage::kCandidates), "candidates"));
  counts.selected = count_lines(require(p.path(stage::kScored), "score"));
  std::vector<corpus::EntityRecord> labeled;
  if (fs::exists(p.path(stage::kCorpus))) {
    labeled = corpus::read_corpus(p.path(stage::kCorpus), corpus::CorpusFormat::Tsv);
  }
  auto stats = corpus::compute_stats(labeled, counts);
  util::write_file_atomic(p.path(stage::kStats), corpus::stats_to_json(stats).dump(2) + "\n");
  p.out() << corpus::format_stats_table(stats);
}

std::atomic<bool> g_serving{false};

void cmd_serve(const Options& o, Project& p) {
  auto svc = p.service();
  const auto& c = p.config();
  annotation::ServerOptions so;
  so.host = o.host.empty() ? c.host : o.host;
  so.port = o.port >= 0 ? o.port : static_cast<int>(c.port);
  so.corpus_path = p.path(stage::kCorpus);
  if (!o.static_dir.empty()) so.static_dir = o.static_dir;
  annotation::AnnotationServer server(svc, so);

  // SIGINT/SIGTERM are taken synchronously so shutdown runs on this thread.
  sigset_t set, old;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, &old);
  const int port = server.bind();
  g_serving = true;
  std::thread loop([&] {
    server.listen();
    g_serving = false;
  });
  server.wait_until_ready();
  p.out() << "serving " << svc.progress().total << " entities on http://" << so.host << ":" << port
          << " (Ctrl-C to stop)" << std::endl;
  timespec tick{0, 200'000'000};
  while (g_serving) {
    if (sigtimedwait(&set, nullptr, &tick) > 0) break;
  }
  server.stop();
  loop.join();
  pthread_sigmask(SIG_SETMASK, &old, nullptr);
  p.out() << "stopped\n";
}

void cmd_agreement(Project& p) {
  require(p.path(stage::kAnnotations), "serve");
  p.out() << annotation::agreement_to_json(p.service().agreement()).dump(2) << "\n";
}

void cmd_adjudicate(const Options& o, Project& p) {
  require(p.path(stage::kAnnotations), "serve");
  auto svc = p.service();
  svc.adjudicate(o.entity, o.label);
  p.out() << "adjudicated " << o.entity << " as " << o.label << "; " << svc.open_disagreements().size()
          << " disagreement(s) open\n";
}

void cmd_finalize(Project& p) {
  require(p.path(stage::kAnnotations), "serve");
  auto records = p.service().finalize();
  corpus::write_corpus(p.path(stage::kCorpus), records, corpus::CorpusFormat::Tsv);
  p.out() << "wrote " << stage::kCorpus << " with " << records.size() << " entities\n";
}

void cmd_export(const Options& o, Project& p) {
  auto format = corpus::parse_corpus_format(o.format);
  std::vector<corpus::EntityRecord> records;
  if (fs::exists(p.path(stage::kAnnotations))) {
    records = p.service().finalize();
  } else {
    records = corpus::read_corpus(require(p.path(stage::kCorpus), "finalize"), corpus::CorpusFormat::Tsv);
  }
  auto text = corpus::export_corpus(records, format);
  if (o.output == "-") {
    p.out() << text;
    return;
  }
  auto target = p.output_or(format == corpus::CorpusFormat::Tsv ? "corpus.tsv" : "corpus.jsonl");
  util::write_file_atomic(target, text);
  p.out() << "exported " << records.size() << " entities to " << target.string() << "\n";
}

void print_report(std::ostream& out, const ml::EvalReport& r) {
  out << "model " << ml::to_string(r.config.model) << ", " << r.config.folds << " folds, seed " << r.config.seed
      << (r.config.include_misc ? "" : ", MISC excluded") << "\n";
  out << "class     P       R       F       support\n";
  for (std::size_t c = 0; c < r.labels.size(); ++c) {
    const auto& m = r.pooled.per_class[c];
    out << std::left << std::setw(8) << corpus::to_string(r.labels[c]) << std::right << "  "
        << fixed(m.prf.precision) << "  " << fixed(m.prf.recall) << "  " << fixed(m.prf.f1) << "  "
        << m.support << "\n";
  }
  out << "micro     " << fixed(r.pooled.micro.precision) << "  " << fixed(r.pooled.micro.recall) << "  "
      << fixed(r.pooled.micro.f1) << "\n";
  out << "weighted  " << fixed(r.pooled.weighted_macro.precision) << "  "
      << fixed(r.pooled.weighted_macro.recall) << "  " << fixed(r.pooled.weighted_macro.f1) << "\n";
  out << "accuracy  pooled " << fixed(r.pooled.accuracy) << ", mean over folds " << fixed(r.mean_accuracy) << "\n";
}

void cmd_evaluate(const Options& o, Project& p) {
  auto config = p.eval_config();
  auto items = p.labeled_items();
  auto report = ml::cross_validate(items, config);
  auto target = p.output_or(o.without_misc ? stage::kReportWithoutMisc : stage::kReport);
  util::write_file_atomic(target, ml::report_to_string(report));
  print_report(p.out(), report);
  for (const auto& f : report.folds) {
    for (const auto& w : f.warnings) p.out() << "warning: fold " << f.fold << ": " << w << "\n";
  }
  p.out() << "wrote " << target.string() << "\n";
}

void cmd_learning_curve(const Options& o, Project& p) {
  auto config = p.eval_config();
  auto fractions = o.fractions.empty() ? p.config().fractions : ml::parse_fractions(o.fractions);
  auto items = p.labeled_items();
  auto points = ml::learning_curve(items, fractions, config);
  auto target = p.output_or(stage::kCurve);
  util::write_file_atomic(target, ml::curve_to_csv(points));
  p.out() << "fraction  n_train  accuracy\n";
  for (const auto& pt : points) {
    p.out() << std::left << std::setw(8) << pt.fraction << std::right << "  " << std::setw(7) << pt.n_train
            << "  " << fixed(pt.accuracy) << "\n";
  }
  p.out() << "wrote " << target.string() << "\n";
}

void print_error(std::ostream& err, const Error& e) {
  err << "error: " << e.code() << ": " << e.what() << "\n";
  if (dynamic_cast<const MissingStageInput*>(&e)) return;  // the message already names both
  const std::size_t shown = std::min<std::size_t>(e.details().size(), 20);
  for (std::size_t i = 0; i < shown; ++i) err << "  " << e.details()[i] << "\n";
  if (e.details().size() > shown) err << "  ... " << e.details().size() - shown << " more\n";
}

}  // namespace

int run(const std::vector<std::string>& args, RunContext& ctx) {
  CLI::App app{"Build and evaluate a Hindi-English named entity corpus from Wikipedia category pages.",
               "wikiner"};
  app.require_subcommand(1);
  Options o;
  app.add_option("-C,--project", o.project, "Project directory")->capture_default_str();

  auto* init = app.add_subcommand("init", "Create a project directory with a default wikiner.toml");
  init->add_option("--seeds", o.seeds_from, "Copy this seed list into the project");

  auto* fetch = app.add_subcommand("fetch", "Cache the seed pages under pages/");
  fetch->add_flag("--online", o.online, "Allow network access for pages not yet cached");

  auto* extract = app.add_subcommand("extract", "Parse cached pages into links.jsonl");

  auto* cands = app.add_subcommand("candidates", "Deduplicate, tag and score link anchors into candidates.jsonl");
  cands->add_option("--tagger", o.tagger, "heuristic or cmd:<path>");
  cands->add_option("--pos-agg", o.pos_agg, "any, all or first")->check(CLI::IsMember({"any", "all", "first"}));
  cands->add_option("--wordtype-agg", o.wordtype_agg, "any, all or first")->check(CLI::IsMember({"any", "all", "first"}));

  auto* score = app.add_subcommand("score", "Keep candidates with confidence >= 1 in scored.jsonl");
  auto* stats = app.add_subcommand("stats", "Write stats.json and print the corpus tables");

  auto* serve = app.add_subcommand("serve", "Run the annotation HTTP service");
  serve->add_option("--host", o.host, "Listen address");
  serve->add_option("--port", o.port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--static", o.static_dir, "Directory with the browser UI to serve at /");

  auto* agreement = app.add_subcommand("agreement", "Print inter-annotator agreement");
  auto* adjudicate = app.add_subcommand("adjudicate", "Resolve one disagreement");
  adjudicate->add_option("--entity", o.entity, "Entity id")->required();
  adjudicate->add_option("--label", o.label, "PER, LOC, ORG or MISC")->required();

  auto* finalize = app.add_subcommand("finalize", "Write corpus.tsv once every entity is resolved");
  auto* exp = app.add_subcommand("export", "Export the labeled corpus");
  exp->add_option("--format", o.format, "tsv or jsonl")->check(CLI::IsMember({"tsv", "jsonl"}))->capture_default_str();
  exp->add_option("-o,--output", o.output, "Output path, '-' for stdout");

  auto* evaluate = app.add_subcommand("evaluate", "Stratified k-fold evaluation of a classifier on corpus.tsv");
  auto* curve = app.add_subcommand("learning-curve", "Accuracy against training-set fraction");
  for (auto* sub : {evaluate, curve}) {
    sub->add_option("--model", o.model, "lr, svm, sgd or nb")->check(CLI::IsMember({"lr", "svm", "sgd", "nb"}));
    sub->add_option("--folds", o.folds, "Number of folds")->check(CLI::Range(2, 1000));
    sub->add_option("--seed", o.seed, "Random seed")->check(CLI::NonNegativeNumber);
    sub->add_flag("--without-misc", o.without_misc, "Drop MISC entities before folding");
    sub->add_option("--threads", o.threads, "Worker threads for folds")->check(CLI::Range(1, 256));
    sub->add_option("--epochs", o.epochs, "Override the model's training epochs")->check(CLI::NonNegativeNumber);
    sub->add_option("-o,--output", o.output, "Output path");
  }
  curve->add_option("--fractions", o.fractions, "Comma-separated fractions in (0,1], ascending");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, ctx.out, ctx.err);
    return code == 0 ? kOk : kUsageError;
  }

  Project p(o, ctx);
  try {
    if (*init) cmd_init(o, p);
    else if (*fetch) cmd_fetch(o, p, ctx);
    else if (*extract) cmd_extract(p);
    else if (*cands) cmd_candidates(o, p);
    else if (*score) cmd_score(p);
    else if (*stats) cmd_stats(p);
    else if (*serve) cmd_serve(o, p);
    else if (*agreement) cmd_agreement(p);
    else if (*adjudicate) cmd_adjudicate(o, p);
    else if (*finalize) cmd_finalize(p);
    else if (*exp) cmd_export(o, p);
    else if (*evaluate) cmd_evaluate(o, p);
    else if (*curve) cmd_learning_curve(o, p);
  } catch (const ConfigError& e) {
    print_error(ctx.err, e);
    return kUsageError;
  } catch (const Error& e) {
    print_error(ctx.err, e);
    return kDomainError;
  } catch (const std::invalid_argument& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunContext ctx{out, err, process_env(), {}};
  return run(args, ctx);
}

}  // namespace wikiner::cli
