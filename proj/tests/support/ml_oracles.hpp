#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "wikiner/ml/metrics.hpp"
#include "wikiner/ml/models.hpp"

namespace wikiner::testing {

using ml::LinearModel;
using ml::SparseVector;

struct GradInstance {
  LinearModel model;
  std::vector<SparseVector> x;
  std::vector<std::size_t> y;
};

// Random weights, random sparse count vectors (roughly half the features set).
inline GradInstance random_grad_instance(ml::ModelKind kind, std::mt19937_64& rng,
                                        std::size_t n_samples = 5, std::size_t n_features = 20,
                                        std::size_t n_classes = 4) {
  std::vector<corpus::NELabel> classes(corpus::kAllLabels.begin(),
                                       corpus::kAllLabels.begin() + static_cast<long>(n_classes));
  GradInstance inst{LinearModel::zeros(kind, classes, n_features), {}, {}};
  std::uniform_real_distribution<double> w(-0.5, 0.5);
  for (double& v : inst.model.weights) v = w(rng);
  for (double& v : inst.model.bias) v = w(rng);
  for (std::size_t i = 0; i < n_samples; ++i) {
    SparseVector x;
    for (std::uint32_t f = 0; f < n_features; ++f) {
      if (rng() % 2) x.entries.emplace_back(f, static_cast<std::uint32_t>(1 + rng() % 3));
    }
    inst.x.push_back(x);
    inst.y.push_back(rng() % n_classes);
  }
  return inst;
}

// True when no hinge term sits within `margin` of its kink.
inline bool hinge_differentiable(const GradInstance& inst, double margin = 1e-3) {
  const auto& m = inst.model;
  for (std::size_t i = 0; i < inst.x.size(); ++i) {
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
      double s = m.bias[c];
      for (auto [f, v] : inst.x[i].entries) s += m.w(c, f) * v;
      double t = c == inst.y[i] ? 1.0 : -1.0;
      if (std::abs(1.0 - t * s) < margin) return false;
    }
  }
  return true;
}

// Central differences over every weight then every bias, same layout as ml::Gradient.
inline ml::Gradient numeric_gradient(const GradInstance& inst, double l2, double h = 1e-5) {
  ml::Gradient g;
  LinearModel m = inst.model;
  auto probe = [&](double& param) {
    const double saved = param;
    param = saved + h;
    const double up = ml::objective(m, inst.x, inst.y, l2);
    param = saved - h;
    const double down = ml::objective(m, inst.x, inst.y, l2);
    param = saved;
    return (up - down) / (2 * h);
  };
  for (double& w : m.weights) g.weights.push_back(probe(w));
  for (double& b : m.bias) g.bias.push_back(probe(b));
  return g;
}

// |a - b| / max(|a| + |b|, tiny), over the concatenated parameter vector.
inline double relative_error(const ml::Gradient& a, const ml::Gradient& b) {
  double diff = 0, na = 0, nb = 0;
  auto acc = [&](const std::vector<double>& u, const std::vector<double>& v) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      diff += (u[i] - v[i]) * (u[i] - v[i]);
      na += u[i] * u[i];
      nb += v[i] * v[i];
    }
  };
  acc(a.weights, b.weights);
  acc(a.bias, b.bias);
  return std::sqrt(diff) / std::max(std::sqrt(na) + std::sqrt(nb), 1e-300);
}

struct BruteMetrics {
  std::vector<double> precision, recall, f1;
  double micro_p = 0, micro_r = 0, micro_f = 0, accuracy = 0;
};

inline double safe_div(double a, double b) { return b == 0 ? 0.0 : a / b; }
inline double harmonic(double p, double r) { return p + r == 0 ? 0.0 : 2 * p * r / (p + r); }

// Counts TP/FP/FN by walking individual (truth, prediction) pairs.
inline BruteMetrics brute_force_metrics(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                        std::size_t n_classes) {
  BruteMetrics out;
  double tp_all = 0, fp_all = 0, fn_all = 0, correct = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (auto [t, p] : pairs) {
      if (t == c && p == c) tp += 1;
      if (t != c && p == c) fp += 1;
      if (t == c && p != c) fn += 1;
    }
    double prec = safe_div(tp, tp + fp), rec = safe_div(tp, tp + fn);
    out.precision.push_back(prec);
    out.recall.push_back(rec);
    out.f1.push_back(harmonic(prec, rec));
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
  }
  for (auto [t, p] : pairs) correct += t == p ? 1 : 0;
  out.micro_p = safe_div(tp_all, tp_all + fp_all);
  out.micro_r = safe_div(tp_all, tp_all + fn_all);
  out.micro_f = harmonic(out.micro_p, out.micro_r);
  out.accuracy = safe_div(correct, static_cast<double>(pairs.size()));
  return out;
}

inline std::vector<std::pair<std::size_t, std::size_t>> expand(const ml::ConfusionMatrix& m) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t t = 0; t < m.size(); ++t) {
    for (std::size_t p = 0; p < m.size(); ++p) {
      for (std::size_t k = 0; k < m[t][p]; ++k) pairs.emplace_back(t, p);
    }
  }
  return pairs;
}

// Four classes over disjoint characters, ten copies each.
inline std::vector<std::pair<std::string, corpus::NELabel>> separable_toy_set() {
  std::vector<std::pair<std::string, corpus::NELabel>> out;
  const std::pair<const char*, corpus::NELabel> proto[] = {{"aaaa", corpus::NELabel::PER},
                                                           {"bbbb", corpus::NELabel::LOC},
                                                           {"cccc", corpus::NELabel::ORG},
                                                           {"dddd", corpus::NELabel::MISC}};
  for (auto [s, label] : proto) {
    for (int i = 0; i < 10; ++i) out.emplace_back(s, label);
  }
  return out;
}

}  // namespace wikiner::testing
