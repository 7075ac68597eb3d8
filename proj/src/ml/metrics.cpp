#include "wikiner/ml/metrics.hpp"

#include <stdexcept>

#include "wikiner/error.hpp"

namespace wikiner::ml {

ConfusionMatrix confusion_matrix(std::span<const std::size_t> truth,
                                 std::span<const std::size_t> predicted, std::size_t n_classes) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("length mismatch");
  ConfusionMatrix m(n_classes, std::vector<std::size_t>(n_classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= n_classes || predicted[i] >= n_classes) {
      throw std::invalid_argument("class index out of range");
    }
    ++m[truth[i]][predicted[i]];
  }
  return m;
}

PRF prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, bool* zero_division) {
  auto ratio = [&](std::size_t num, std::size_t den) {
    if (den == 0) {
      if (zero_division) *zero_division = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  PRF out;
  out.precision = ratio(tp, tp + fp);
  out.recall = ratio(tp, tp + fn);
  const double sum = out.precision + out.recall;
  if (sum == 0) {
    if (zero_division) *zero_division = true;
  } else if (out.precision == out.recall) {
    // The harmonic mean of equal values is that value; skip the rounding.
    out.f1 = out.precision;
  } else {
    out.f1 = 2 * out.precision * out.recall / sum;
  }
  return out;
}

Metrics compute_metrics(const ConfusionMatrix& confusion) {
  const std::size_t n = confusion.size();
  for (const auto& row : confusion) {
    if (row.size() != n) throw std::invalid_argument("confusion matrix is not square");
  }
  std::size_t total = 0, trace = 0;
  std::vector<std::size_t> row_sum(n, 0), col_sum(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t p = 0; p < n; ++p) {
      total += confusion[t][p];
      row_sum[t] += confusion[t][p];
      col_sum[p] += confusion[t][p];
    }
    trace += confusion[t][t];
  }
  if (total == 0) throw EmptyConfusion("confusion matrix holds no predictions");

  Metrics m;
  std::size_t fp_all = 0, fn_all = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t tp = confusion[c][c];
    const std::size_t fp = col_sum[c] - tp;
    const std::size_t fn = row_sum[c] - tp;
    fp_all += fp;
    fn_all += fn;
    ClassMetrics cm;
    cm.prf = prf_from_counts(tp, fp, fn, &m.zero_division);
    cm.support = row_sum[c];
    m.per_class.push_back(cm);
    const double w = static_cast<double>(row_sum[c]) / static_cast<double>(total);
    m.weighted_macro.precision += w * cm.prf.precision;
    m.weighted_macro.recall += w * cm.prf.recall;
    m.weighted_macro.f1 += w * cm.prf.f1;
  }
  m.micro = prf_from_counts(trace, fp_all, fn_all, &m.zero_division);
  m.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  return m;
}

}  // namespace wikiner::ml
