#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wikiner::ml {

using NgramCounts = std::map<std::string, std::uint32_t>;

// Contiguous windows of n_min..n_max code points over the raw surface,
// spaces included and case preserved.
NgramCounts char_ngrams(std::string_view surface, int n_min = 1, int n_max = 5);

// Sorted by index; every count is positive.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

  bool empty() const { return entries.empty(); }
  bool operator==(const SparseVector&) const = default;
};

class FeatureSpace {
 public:
  explicit FeatureSpace(int n_min = 1, int n_max = 5);

  // Adds the surface's n-grams to the vocabulary; only before freeze().
  void add(std::string_view surface);
  // Assigns dense indices in lexicographic n-gram order.
  void freeze();

  bool frozen() const { return frozen_; }
  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }
  std::size_t size() const { return frozen_ ? grams_.size() : pending_.size(); }
  const std::vector<std::string>& grams() const { return grams_; }
  std::optional<std::uint32_t> index_of(std::string_view gram) const;

  // Unseen n-grams are dropped. Throws SpaceNotFrozen.
  SparseVector featurize(std::string_view surface) const;

 private:
  int n_min_;
  int n_max_;
  bool frozen_ = false;
  std::set<std::string> pending_;
  std::vector<std::string> grams_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

FeatureSpace fit_feature_space(std::span<const std::string> train_surfaces, int n_min = 1,
                               int n_max = 5);

}  // namespace wikiner::ml
