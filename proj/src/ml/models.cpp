#include "wikiner/ml/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "wikiner/error.hpp"
#include "wikiner/util/rng.hpp"

namespace wikiner::ml {

ModelKind parse_model_kind(std::string_view name) {
  if (name == "lr") return ModelKind::LogisticRegression;
  if (name == "svm") return ModelKind::LinearSVM;
  if (name == "sgd") return ModelKind::SGDLog;
  if (name == "nb") return ModelKind::NaiveBayes;
  throw std::invalid_argument("unknown model '" + std::string(name) + "' (expected lr, svm, sgd, nb)");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LogisticRegression: return "lr";
    case ModelKind::LinearSVM: return "svm";
    case ModelKind::SGDLog: return "sgd";
    case ModelKind::NaiveBayes: return "nb";
  }
  return "?";
}

Hyperparams Hyperparams::defaults(ModelKind kind) {
  Hyperparams hp;
  if (kind == ModelKind::SGDLog) {
    hp.epochs = 5;
    hp.batch_size = 1;
    hp.decay = 1e-2;
  }
  return hp;
}

LinearModel LinearModel::zeros(ModelKind kind, std::vector<NELabel> classes, std::size_t n_features) {
  LinearModel m;
  m.kind = kind;
  m.n_features = n_features;
  m.weights.assign(classes.size() * n_features, 0.0);
  m.bias.assign(classes.size(), 0.0);
  m.classes = std::move(classes);
  return m;
}

ModelKind Model::kind() const {
  if (auto* lin = std::get_if<LinearModel>(&impl)) return lin->kind;
  return ModelKind::NaiveBayes;
}

const std::vector<NELabel>& Model::classes() const {
  return std::visit([](const auto& m) -> const std::vector<NELabel>& { return m.classes; }, impl);
}

std::size_t Model::n_features() const {
  return std::visit([](const auto& m) { return m.n_features; }, impl);
}

namespace {

void check_dims(const SparseVector& x, std::size_t n_features) {
  if (!x.empty() && x.entries.back().first >= n_features) {
    throw DimensionMismatch("feature index " + std::to_string(x.entries.back().first) +
                            " outside a space of " + std::to_string(n_features));
  }
}

std::vector<double> linear_scores(const LinearModel& m, const SparseVector& x, double scale = 1.0) {
  std::vector<double> s(m.bias);
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    const double* row = m.weights.data() + c * m.n_features;
    double dot = 0;
    for (auto [f, v] : x.entries) dot += row[f] * v;
    s[c] += scale * dot;
  }
  return s;
}

double log_sum_exp(std::span<const double> s) {
  double mx = *std::max_element(s.begin(), s.end());
  if (!std::isfinite(mx)) return mx;
  double sum = 0;
  for (double v : s) sum += std::exp(v - mx);
  return mx + std::log(sum);
}

std::vector<double> softmax(std::span<const double> s) {
  double lse = log_sum_exp(s);
  std::vector<double> p(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) p[i] = std::exp(s[i] - lse);
  return p;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double target(std::size_t c, std::size_t y) { return c == y ? 1.0 : -1.0; }

// d(per-sample loss)/d(scores).
std::vector<double> score_derivative(ModelKind kind, std::span<const double> s, std::size_t y) {
  std::vector<double> d(s.size());
  switch (kind) {
    case ModelKind::LogisticRegression: {
      d = softmax(s);
      d[y] -= 1.0;
      break;
    }
    case ModelKind::LinearSVM:
      for (std::size_t c = 0; c < s.size(); ++c) {
        double t = target(c, y);
        d[c] = t * s[c] < 1.0 ? -t : 0.0;
      }
      break;
    case ModelKind::SGDLog:
      for (std::size_t c = 0; c < s.size(); ++c) {
        double t = target(c, y);
        d[c] = -t * sigmoid(-t * s[c]);
      }
      break;
    case ModelKind::NaiveBayes:
      throw std::logic_error("naive bayes has no gradient");
  }
  return d;
}

double sample_loss(ModelKind kind, std::span<const double> s, std::size_t y) {
  double loss = 0;
  switch (kind) {
    case ModelKind::LogisticRegression:
      loss = log_sum_exp(s) - s[y];
      break;
    case ModelKind::LinearSVM:
      for (std::size_t c = 0; c < s.size(); ++c) loss += std::max(0.0, 1.0 - target(c, y) * s[c]);
      break;
    case ModelKind::SGDLog:
      for (std::size_t c = 0; c < s.size(); ++c) loss += softplus(-target(c, y) * s[c]);
      break;
    case ModelKind::NaiveBayes:
      throw std::logic_error("naive bayes has no objective");
  }
  return loss;
}

std::vector<std::size_t> class_indices(std::span<const NELabel> y, const std::vector<NELabel>& classes) {
  std::vector<std::size_t> out;
  out.reserve(y.size());
  for (NELabel label : y) {
    auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) {
      throw std::invalid_argument("label " + std::string(corpus::to_string(label)) + " is not in the class set");
    }
    out.push_back(static_cast<std::size_t>(it - classes.begin()));
  }
  return out;
}

// Mini-batch gradient descent. W is kept as scale * V so the L2 shrink is O(1)
// per step and the data term only touches the batch's nonzero features.
LinearModel train_linear(ModelKind kind, std::span<const SparseVector> X,
                         std::span<const std::size_t> y, std::vector<NELabel> classes,
                         std::size_t n_features, const Hyperparams& hp) {
  LinearModel m = LinearModel::zeros(kind, std::move(classes), n_features);
  m.hyperparams = hp;
  const std::size_t C = m.classes.size();
  const std::size_t batch = std::max<std::size_t>(1, hp.batch_size);
  double scale = 1.0;
  std::mt19937_64 rng(hp.seed);
  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t step = 0;
  std::vector<std::vector<double>> derivs;

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    util::shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double eta = hp.learning_rate / (1.0 + static_cast<double>(step) * hp.decay);
      ++step;
      derivs.clear();
      for (std::size_t k = start; k < end; ++k) {
        auto s = linear_scores(m, X[order[k]], scale);
        derivs.push_back(score_derivative(kind, s, y[order[k]]));
      }
      const double inv_b = 1.0 / static_cast<double>(end - start);
      scale *= 1.0 - eta * hp.l2_lambda;
      const double step_v = eta * inv_b / scale;
      for (std::size_t k = start; k < end; ++k) {
        const auto& d = derivs[k - start];
        for (std::size_t c = 0; c < C; ++c) {
          if (d[c] == 0.0) continue;
          double* row = m.weights.data() + c * n_features;
          for (auto [f, v] : X[order[k]].entries) row[f] -= step_v * d[c] * v;
          m.bias[c] -= eta * inv_b * d[c];
        }
      }
      if (scale < 1e-6) {
        for (double& w : m.weights) w *= scale;
        scale = 1.0;
      }
    }
  }
  for (double& w : m.weights) w *= scale;
  return m;
}

NaiveBayesModel train_nb(std::span<const SparseVector> X, std::span<const std::size_t> y,
                         std::vector<NELabel> classes, std::size_t n_features, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  NaiveBayesModel m;
  m.n_features = n_features;
  m.alpha = alpha;
  const std::size_t C = classes.size();
  m.classes = std::move(classes);
  std::vector<double> docs(C, 0.0), totals(C, 0.0);
  std::vector<double> counts(C * n_features, 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    docs[y[i]] += 1;
    for (auto [f, v] : X[i].entries) {
      counts[y[i] * n_features + f] += v;
      totals[y[i]] += v;
    }
  }
  m.class_log_priors.resize(C);
  m.feature_log_likelihoods.resize(C * n_features);
  for (std::size_t c = 0; c < C; ++c) {
    m.class_log_priors[c] = std::log(docs[c] / static_cast<double>(X.size()));
    const double denom = totals[c] + alpha * static_cast<double>(n_features);
    for (std::size_t f = 0; f < n_features; ++f) {
      m.feature_log_likelihoods[c * n_features + f] = std::log((counts[c * n_features + f] + alpha) / denom);
    }
  }
  return m;
}

std::vector<double> nb_scores(const NaiveBayesModel& m, const SparseVector& x) {
  std::vector<double> s(m.class_log_priors);
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    const double* row = m.feature_log_likelihoods.data() + c * m.n_features;
    for (auto [f, v] : x.entries) s[c] += v * row[f];
  }
  return s;
}

}  // namespace

Model train(ModelKind kind, std::span<const SparseVector> X, std::span<const NELabel> y,
            std::size_t n_features, const Hyperparams& hp, std::vector<NELabel> classes) {
  if (X.size() != y.size()) throw std::invalid_argument("X and y differ in length");
  if (classes.empty()) {
    for (NELabel label : kAllLabels) {
      if (std::find(y.begin(), y.end(), label) != y.end()) classes.push_back(label);
    }
  }
  if (classes.empty() || X.size() < classes.size()) {
    throw std::invalid_argument("need at least one training sample per class");
  }
  for (const auto& x : X) check_dims(x, n_features);
  auto yi = class_indices(y, classes);

  Model model;
  std::vector<bool> seen(classes.size(), false);
  for (auto c : yi) seen[c] = true;
  if (std::count(seen.begin(), seen.end(), true) == 1) {
    NELabel only = y.front();
    model.constant = only;
    model.warnings.push_back("DegenerateData: training data holds only " + std::string(corpus::to_string(only)) +
                             "; using a constant predictor");
    if (kind == ModelKind::NaiveBayes) {
      NaiveBayesModel nb;
      nb.classes = std::move(classes);
      nb.n_features = n_features;
      nb.alpha = hp.alpha;
      model.impl = std::move(nb);
    } else {
      auto lin = LinearModel::zeros(kind, std::move(classes), n_features);
      lin.hyperparams = hp;
      model.impl = std::move(lin);
    }
    return model;
  }

  if (kind == ModelKind::NaiveBayes) {
    model.impl = train_nb(X, yi, std::move(classes), n_features, hp.alpha);
  } else {
    model.impl = train_linear(kind, X, yi, std::move(classes), n_features, hp);
  }
  return model;
}

std::vector<double> decision_scores(const Model& model, const SparseVector& x) {
  check_dims(x, model.n_features());
  if (model.constant) {
    const auto& cls = model.classes();
    std::vector<double> s(cls.size(), 0.0);
    for (std::size_t c = 0; c < cls.size(); ++c) s[c] = cls[c] == *model.constant ? 1.0 : 0.0;
    return s;
  }
  if (auto* lin = std::get_if<LinearModel>(&model.impl)) return linear_scores(*lin, x);
  return nb_scores(std::get<NaiveBayesModel>(model.impl), x);
}

std::size_t argmax_with_ties(std::span<const double> scores, std::span<const NELabel> classes) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best] || (scores[c] == scores[best] && classes[c] < classes[best])) {
      best = c;
    }
  }
  return best;
}

NELabel predict(const Model& model, const SparseVector& x) {
  auto s = decision_scores(model, x);
  const auto& cls = model.classes();
  return cls[argmax_with_ties(s, cls)];
}

std::vector<double> predict_proba(const Model& model, const SparseVector& x) {
  if (model.kind() == ModelKind::LinearSVM) {
    throw NotProbabilistic("the linear SVM has no probability estimates");
  }
  auto s = decision_scores(model, x);
  if (model.constant) return s;
  if (model.kind() == ModelKind::SGDLog) {
    double sum = 0;
    for (double& v : s) sum += (v = sigmoid(v));
    if (sum == 0) return std::vector<double>(s.size(), 1.0 / static_cast<double>(s.size()));
    for (double& v : s) v /= sum;
    return s;
  }
  return softmax(s);
}

double objective(const LinearModel& model, std::span<const SparseVector> X,
                 std::span<const std::size_t> y, double l2) {
  double loss = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    loss += sample_loss(model.kind, linear_scores(model, X[i]), y[i]);
  }
  loss /= static_cast<double>(X.size());
  double sq = 0;
  for (double w : model.weights) sq += w * w;
  return loss + 0.5 * l2 * sq;
}

Gradient objective_gradient(const LinearModel& model, std::span<const SparseVector> X,
                            std::span<const std::size_t> y, double l2) {
  Gradient g;
  g.weights.resize(model.weights.size());
  for (std::size_t k = 0; k < model.weights.size(); ++k) g.weights[k] = l2 * model.weights[k];
  g.bias.assign(model.bias.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    auto d = score_derivative(model.kind, linear_scores(model, X[i]), y[i]);
    for (std::size_t c = 0; c < d.size(); ++c) {
      g.bias[c] += inv_n * d[c];
      for (auto [f, v] : X[i].entries) g.weights[c * model.n_features + f] += inv_n * d[c] * v;
    }
  }
  return g;
}

double frobenius_norm(const LinearModel& model) {
  double sq = 0;
  for (double w : model.weights) sq += w * w;
  return std::sqrt(sq);
}

}  // namespace wikiner::ml
