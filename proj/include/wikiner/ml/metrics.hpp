#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wikiner/corpus/label.hpp"

namespace wikiner::ml {

// Rows are true classes, columns predicted.
using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

ConfusionMatrix confusion_matrix(std::span<const std::size_t> truth,
                                 std::span<const std::size_t> predicted, std::size_t n_classes);

struct PRF {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct ClassMetrics {
  PRF prf;
  std::size_t support = 0;
};

struct Metrics {
  std::vector<ClassMetrics> per_class;
  PRF micro;
  PRF weighted_macro;  // support-weighted mean of the per-class values
  double accuracy = 0;
  bool zero_division = false;  // some ratio had a zero denominator and was set to 0
};

// Precision/recall/F from raw counts; zero denominators yield 0 and set *zero_division.
PRF prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, bool* zero_division = nullptr);

// Throws EmptyConfusion when the matrix has no counts, invalid_argument when not square.
Metrics compute_metrics(const ConfusionMatrix& confusion);

}  // namespace wikiner::ml
