#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "wikiner/ml/features.hpp"
#include "wikiner/ml/metrics.hpp"
#include "wikiner/ml/models.hpp"

namespace wikiner::ml {

struct LabeledItem {
  std::string surface;
  NELabel label;
};

// k disjoint folds covering every index, each sorted ascending. Each class is
// shuffled and dealt round-robin, continuing from where the previous class
// stopped, so per-class and total fold sizes differ by at most one.
// Throws BadK when k < 2 or k exceeds the number of items.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const NELabel> labels,
                                                       std::size_t k, std::uint64_t seed);

struct EvalConfig {
  ModelKind model = ModelKind::LogisticRegression;
  std::size_t folds = 5;
  std::uint64_t seed = 42;
  bool include_misc = true;
  Hyperparams hyperparams = Hyperparams::defaults(ModelKind::LogisticRegression);
  int n_min = 1;
  int n_max = 5;
  std::size_t threads = 1;  // scheduling only; never changes the result

  static EvalConfig for_model(ModelKind kind);
};

// The items cross_validate actually uses: MISC dropped when include_misc is off.
std::vector<LabeledItem> active_items(std::span<const LabeledItem> corpus, const EvalConfig& config);
std::vector<NELabel> active_labels(std::span<const LabeledItem> items);

struct FoldData {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  FeatureSpace space;
  std::vector<SparseVector> x_train;
  std::vector<NELabel> y_train;
  std::vector<SparseVector> x_test;
  std::vector<NELabel> y_test;
};

// Fits the feature space on the training indices only.
FoldData prepare_fold(std::span<const LabeledItem> items, std::vector<std::size_t> train,
                      std::vector<std::size_t> test, const EvalConfig& config);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t vocabulary_size = 0;
  ConfusionMatrix confusion;
  Metrics metrics;
  std::vector<std::string> warnings;
};

struct EvalReport {
  EvalConfig config;
  std::vector<NELabel> labels;
  std::vector<FoldResult> folds;
  // Arithmetic mean over folds of each metric.
  std::vector<PRF> mean_per_class;
  PRF mean_micro;
  PRF mean_weighted_macro;
  double mean_accuracy = 0;
  // Metrics of the confusion matrix summed over all folds.
  ConfusionMatrix pooled_confusion;
  Metrics pooled;
};

// Seeds fold i's training with combine_seed(config.seed, i).
FoldResult run_fold(std::span<const LabeledItem> items, const std::vector<NELabel>& labels,
                    const std::vector<std::vector<std::size_t>>& folds, std::size_t fold,
                    const EvalConfig& config);

EvalReport cross_validate(std::span<const LabeledItem> corpus, const EvalConfig& config);

nlohmann::ordered_json report_to_json(const EvalReport& report);
// Serialized JSON text with a trailing newline.
std::string report_to_string(const EvalReport& report);

struct CurvePoint {
  double fraction = 0;
  std::size_t n_train = 0;
  double accuracy = 0;
};

// Test split is fold 0; the rest is subsampled per class (floor(f * n_c)
// items from a fixed per-class permutation, so subsamples are nested).
// Throws FractionTooSmall when a class would lose every training item.
std::vector<CurvePoint> learning_curve(std::span<const LabeledItem> corpus,
                                       std::span<const double> fractions, const EvalConfig& config);

std::string curve_to_csv(std::span<const CurvePoint> points);

std::vector<double> parse_fractions(std::string_view text);

}  // namespace wikiner::ml
