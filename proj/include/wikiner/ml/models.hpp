#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wikiner/corpus/label.hpp"
#include "wikiner/ml/features.hpp"

namespace wikiner::ml {

using corpus::kAllLabels;
using corpus::NELabel;

enum class ModelKind { LogisticRegression, LinearSVM, SGDLog, NaiveBayes };

// Accepts the short names lr, svm, sgd, nb.
ModelKind parse_model_kind(std::string_view name);
std::string to_string(ModelKind kind);  // short name

struct Hyperparams {
  double learning_rate = 0.1;
  double l2_lambda = 1e-4;
  int epochs = 100;
  std::size_t batch_size = 32;
  double decay = 0.0;  // eta_t = learning_rate / (1 + t * decay)
  double alpha = 1.0;  // NB smoothing
  std::uint64_t seed = 42;

  static Hyperparams defaults(ModelKind kind);
};

struct LinearModel {
  ModelKind kind = ModelKind::LogisticRegression;
  std::vector<NELabel> classes;
  std::size_t n_features = 0;
  std::vector<double> weights;  // classes.size() x n_features, row-major
  std::vector<double> bias;
  Hyperparams hyperparams;

  double& w(std::size_t c, std::size_t f) { return weights[c * n_features + f]; }
  double w(std::size_t c, std::size_t f) const { return weights[c * n_features + f]; }
  static LinearModel zeros(ModelKind kind, std::vector<NELabel> classes, std::size_t n_features);
};

struct NaiveBayesModel {
  std::vector<NELabel> classes;
  std::size_t n_features = 0;
  std::vector<double> class_log_priors;
  std::vector<double> feature_log_likelihoods;  // classes.size() x n_features
  double alpha = 1.0;
};

struct Model {
  std::variant<LinearModel, NaiveBayesModel> impl;
  // Set when training saw a single class; every prediction returns it.
  std::optional<NELabel> constant;
  std::vector<std::string> warnings;

  ModelKind kind() const;
  const std::vector<NELabel>& classes() const;
  std::size_t n_features() const;
};

// `classes` fixes the output label set; empty means the labels present in y.
// Rows of X must index below n_features.
Model train(ModelKind kind, std::span<const SparseVector> X, std::span<const NELabel> y,
            std::size_t n_features, const Hyperparams& hp, std::vector<NELabel> classes = {});

std::vector<double> decision_scores(const Model& model, const SparseVector& x);
NELabel predict(const Model& model, const SparseVector& x);
// Throws NotProbabilistic for LinearSVM.
std::vector<double> predict_proba(const Model& model, const SparseVector& x);

// Index of the largest score; ties go to the class earliest in PER, LOC, ORG, MISC order.
std::size_t argmax_with_ties(std::span<const double> scores, std::span<const NELabel> classes);

// Training objective of a linear model: mean per-sample loss + (l2/2)|W|^2.
// y holds class indices into model.classes. Loss and gradient are coded
// separately so one can check the other.
double objective(const LinearModel& model, std::span<const SparseVector> X,
                 std::span<const std::size_t> y, double l2);

struct Gradient {
  std::vector<double> weights;
  std::vector<double> bias;
};
Gradient objective_gradient(const LinearModel& model, std::span<const SparseVector> X,
                            std::span<const std::size_t> y, double l2);

double frobenius_norm(const LinearModel& model);

}  // namespace wikiner::ml
