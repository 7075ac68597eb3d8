#include "wikiner/ml/validation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <random>
#include <stdexcept>
#include <thread>

#include "wikiner/error.hpp"
#include "wikiner/util/hash.hpp"
#include "wikiner/util/rng.hpp"

namespace wikiner::ml {

namespace {

constexpr std::uint64_t kFoldSalt = 0xf01d;
constexpr std::uint64_t kCurveSalt = 0xc0de;

std::string label_name(NELabel label) { return std::string(corpus::to_string(label)); }

std::size_t label_index(const std::vector<NELabel>& labels, NELabel label) {
  return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), label) - labels.begin());
}

}  // namespace

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const NELabel> labels,
                                                       std::size_t k, std::uint64_t seed) {
  if (k < 2) throw BadK("k must be at least 2, got " + std::to_string(k));
  if (k > labels.size()) {
    throw BadK("k=" + std::to_string(k) + " exceeds the " + std::to_string(labels.size()) + " items");
  }
  std::mt19937_64 rng(util::combine_seed(seed, kFoldSalt));
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t offset = 0;
  for (NELabel label : kAllLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) members.push_back(i);
    }
    util::shuffle(members, rng);
    for (std::size_t j = 0; j < members.size(); ++j) folds[(offset + j) % k].push_back(members[j]);
    offset += members.size();
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

EvalConfig EvalConfig::for_model(ModelKind kind) {
  EvalConfig config;
  config.model = kind;
  config.hyperparams = Hyperparams::defaults(kind);
  return config;
}

std::vector<LabeledItem> active_items(std::span<const LabeledItem> corpus, const EvalConfig& config) {
  std::vector<LabeledItem> out;
  for (const auto& item : corpus) {
    if (config.include_misc || item.label != NELabel::MISC) out.push_back(item);
  }
  return out;
}

std::vector<NELabel> active_labels(std::span<const LabeledItem> items) {
  std::vector<NELabel> out;
  for (NELabel label : kAllLabels) {
    if (std::any_of(items.begin(), items.end(), [&](const auto& it) { return it.label == label; })) {
      out.push_back(label);
    }
  }
  return out;
}

FoldData prepare_fold(std::span<const LabeledItem> items, std::vector<std::size_t> train,
                      std::vector<std::size_t> test, const EvalConfig& config) {
  FoldData data{std::move(train), std::move(test), FeatureSpace(config.n_min, config.n_max), {}, {}, {}, {}};
  for (auto i : data.train) data.space.add(items[i].surface);
  data.space.freeze();
  for (auto i : data.train) {
    data.x_train.push_back(data.space.featurize(items[i].surface));
    data.y_train.push_back(items[i].label);
  }
  for (auto i : data.test) {
    data.x_test.push_back(data.space.featurize(items[i].surface));
    data.y_test.push_back(items[i].label);
  }
  return data;
}

namespace {

struct Trained {
  Model model;
  ConfusionMatrix confusion;
};

Trained train_and_score(const FoldData& data, const std::vector<NELabel>& labels,
                        const EvalConfig& config, std::uint64_t fold_seed) {
  Hyperparams hp = config.hyperparams;
  hp.seed = fold_seed;
  Model model = train(config.model, data.x_train, data.y_train, data.space.size(), hp, labels);
  std::vector<std::size_t> truth, predicted;
  for (std::size_t i = 0; i < data.x_test.size(); ++i) {
    truth.push_back(label_index(labels, data.y_test[i]));
    predicted.push_back(label_index(labels, predict(model, data.x_test[i])));
  }
  auto confusion = confusion_matrix(truth, predicted, labels.size());
  return {std::move(model), std::move(confusion)};
}

std::vector<std::size_t> all_but(const std::vector<std::vector<std::size_t>>& folds, std::size_t skip) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f != skip) out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NELabel> labels_of(std::span<const LabeledItem> items) {
  std::vector<NELabel> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.label);
  return out;
}

}  // namespace

FoldResult run_fold(std::span<const LabeledItem> items, const std::vector<NELabel>& labels,
                    const std::vector<std::vector<std::size_t>>& folds, std::size_t fold,
                    const EvalConfig& config) {
  FoldData data = prepare_fold(items, all_but(folds, fold), folds[fold], config);
  auto trained = train_and_score(data, labels, config, util::combine_seed(config.seed, fold));
  FoldResult r;
  r.fold = fold;
  r.n_train = data.train.size();
  r.n_test = data.test.size();
  r.vocabulary_size = data.space.size();
  r.metrics = compute_metrics(trained.confusion);
  r.confusion = std::move(trained.confusion);
  r.warnings = trained.model.warnings;
  return r;
}

EvalReport cross_validate(std::span<const LabeledItem> corpus, const EvalConfig& config) {
  auto items = active_items(corpus, config);
  if (items.empty()) throw std::invalid_argument("no labeled items to evaluate");
  EvalReport report;
  report.config = config;
  report.labels = active_labels(items);
  auto folds = stratified_kfold(labels_of(items), config.folds, config.seed);

  const std::size_t k = folds.size();
  std::vector<FoldResult> results(k);
  std::vector<std::exception_ptr> errors(k);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f = next++; f < k; f = next++) {
      try {
        results[f] = run_fold(items, report.labels, folds, f, config);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(config.threads, 1, k);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  report.folds = std::move(results);

  const std::size_t C = report.labels.size();
  const double inv_k = 1.0 / static_cast<double>(k);
  report.mean_per_class.assign(C, PRF{});
  report.pooled_confusion.assign(C, std::vector<std::size_t>(C, 0));
  auto add = [inv_k](PRF& into, const PRF& x) {
    into.precision += inv_k * x.precision;
    into.recall += inv_k * x.recall;
    into.f1 += inv_k * x.f1;
  };
  for (const auto& fr : report.folds) {
    for (std::size_t c = 0; c < C; ++c) {
      add(report.mean_per_class[c], fr.metrics.per_class[c].prf);
      for (std::size_t p = 0; p < C; ++p) report.pooled_confusion[c][p] += fr.confusion[c][p];
    }
    add(report.mean_micro, fr.metrics.micro);
    add(report.mean_weighted_macro, fr.metrics.weighted_macro);
    report.mean_accuracy += inv_k * fr.metrics.accuracy;
  }
  report.pooled = compute_metrics(report.pooled_confusion);
  return report;
}

namespace {

nlohmann::ordered_json prf_json(const PRF& prf) {
  return {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
}

nlohmann::ordered_json metrics_json(const Metrics& m, const std::vector<NELabel>& labels) {
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < labels.size(); ++c) {
    auto row = prf_json(m.per_class[c].prf);
    row["support"] = m.per_class[c].support;
    per_class[label_name(labels[c])] = row;
  }
  return {{"per_class", per_class},
          {"micro", prf_json(m.micro)},
          {"weighted_macro", prf_json(m.weighted_macro)},
          {"accuracy", m.accuracy},
          {"zero_division", m.zero_division}};
}

}  // namespace

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  using nlohmann::ordered_json;
  const auto& cfg = report.config;
  const auto& hp = cfg.hyperparams;
  ordered_json hyper = {{"learning_rate", hp.learning_rate},
                        {"l2_lambda", hp.l2_lambda},
                        {"epochs", hp.epochs},
                        {"batch_size", hp.batch_size},
                        {"decay", hp.decay},
                        {"alpha", hp.alpha}};
  ordered_json config = {{"model", to_string(cfg.model)}, {"folds", cfg.folds},
                         {"seed", cfg.seed},             {"misc_included", cfg.include_misc},
                         {"n_min", cfg.n_min},           {"n_max", cfg.n_max},
                         {"hyperparams", hyper}};
  ordered_json labels = ordered_json::array();
  for (NELabel l : report.labels) labels.push_back(label_name(l));

  ordered_json mean_per_class = ordered_json::object();
  for (std::size_t c = 0; c < report.labels.size(); ++c) {
    mean_per_class[label_name(report.labels[c])] = prf_json(report.mean_per_class[c]);
  }
  ordered_json averaged = {{"per_class", mean_per_class},
                           {"micro", prf_json(report.mean_micro)},
                           {"weighted_macro", prf_json(report.mean_weighted_macro)},
                           {"accuracy", report.mean_accuracy}};
  auto pooled = metrics_json(report.pooled, report.labels);
  pooled["confusion"] = report.pooled_confusion;

  ordered_json folds = ordered_json::array();
  for (const auto& fr : report.folds) {
    ordered_json f = {{"fold", fr.fold},
                      {"n_train", fr.n_train},
                      {"n_test", fr.n_test},
                      {"vocabulary_size", fr.vocabulary_size}};
    f["metrics"] = metrics_json(fr.metrics, report.labels);
    f["confusion"] = fr.confusion;
    f["warnings"] = fr.warnings;
    folds.push_back(std::move(f));
  }
  return {{"config", config}, {"labels", labels}, {"averaged", averaged},
          {"pooled", pooled}, {"folds", folds}};
}

std::string report_to_string(const EvalReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::vector<CurvePoint> learning_curve(std::span<const LabeledItem> corpus,
                                       std::span<const double> fractions, const EvalConfig& config) {
  if (fractions.empty()) throw std::invalid_argument("no fractions given");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) {
      throw std::invalid_argument("fractions must lie in (0, 1]");
    }
    if (i > 0 && !(fractions[i] > fractions[i - 1])) {
      throw std::invalid_argument("fractions must be strictly ascending");
    }
  }
  auto items = active_items(corpus, config);
  if (items.empty()) throw std::invalid_argument("no labeled items to evaluate");
  auto labels = active_labels(items);
  auto item_labels = labels_of(items);
  auto folds = stratified_kfold(item_labels, config.folds, config.seed);
  auto pool = all_but(folds, 0);

  std::mt19937_64 rng(util::combine_seed(config.seed, kCurveSalt));
  std::vector<std::vector<std::size_t>> by_class(labels.size());
  for (auto i : pool) by_class[label_index(labels, item_labels[i])].push_back(i);
  for (auto& members : by_class) util::shuffle(members, rng);

  std::vector<CurvePoint> points;
  for (double f : fractions) {
    std::vector<std::size_t> train;
    for (std::size_t c = 0; c < labels.size(); ++c) {
      const auto n_c = static_cast<double>(by_class[c].size());
      const auto take = static_cast<std::size_t>(std::floor(f * n_c + 1e-9));
      if (take == 0) {
        throw FractionTooSmall("fraction " + std::to_string(f) + " leaves no training items of class " +
                               label_name(labels[c]));
      }
      train.insert(train.end(), by_class[c].begin(), by_class[c].begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(train.begin(), train.end());
    FoldData data = prepare_fold(items, std::move(train), folds[0], config);
    auto trained = train_and_score(data, labels, config, util::combine_seed(config.seed, 0));
    points.push_back({f, data.train.size(), compute_metrics(trained.confusion).accuracy});
  }
  return points;
}

std::string curve_to_csv(std::span<const CurvePoint> points) {
  std::string out = "fraction,accuracy\n";
  char buf[64];
  for (const auto& p : points) {
    auto r = std::to_chars(buf, buf + sizeof buf, p.fraction);
    out.append(buf, r.ptr);
    out += ',';
    r = std::to_chars(buf, buf + sizeof buf, p.accuracy);
    out.append(buf, r.ptr);
    out += '\n';
  }
  return out;
}

std::vector<double> parse_fractions(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    auto part = text.substr(start, comma - start);
    double v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw std::invalid_argument("bad fraction '" + std::string(part) + "'");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

}  // namespace wikiner::ml
