#include "wikiner/ml/features.hpp"

#include <algorithm>
#include <stdexcept>

#include "wikiner/error.hpp"
#include "wikiner/util/utf8.hpp"

namespace wikiner::ml {

NgramCounts char_ngrams(std::string_view surface, int n_min, int n_max) {
  if (n_min < 1 || n_min > n_max) throw std::invalid_argument("need 1 <= n_min <= n_max");
  auto chars = util::utf8_chars(surface);
  NgramCounts counts;
  const std::size_t len = chars.size();
  for (std::size_t n = static_cast<std::size_t>(n_min);
       n <= static_cast<std::size_t>(n_max) && n <= len; ++n) {
    for (std::size_t start = 0; start + n <= len; ++start) {
      const char* begin = chars[start].data();
      const char* end = chars[start + n - 1].data() + chars[start + n - 1].size();
      ++counts[std::string(begin, end)];
    }
  }
  return counts;
}

FeatureSpace::FeatureSpace(int n_min, int n_max) : n_min_(n_min), n_max_(n_max) {
  if (n_min < 1 || n_min > n_max) throw std::invalid_argument("need 1 <= n_min <= n_max");
}

void FeatureSpace::add(std::string_view surface) {
  if (frozen_) throw std::logic_error("feature space is frozen");
  for (auto& [gram, n] : char_ngrams(surface, n_min_, n_max_)) pending_.insert(gram);
}

void FeatureSpace::freeze() {
  if (frozen_) return;
  grams_.assign(pending_.begin(), pending_.end());
  pending_.clear();
  index_.reserve(grams_.size());
  for (std::size_t i = 0; i < grams_.size(); ++i) {
    index_.emplace(grams_[i], static_cast<std::uint32_t>(i));
  }
  frozen_ = true;
}

std::optional<std::uint32_t> FeatureSpace::index_of(std::string_view gram) const {
  auto it = index_.find(std::string(gram));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseVector FeatureSpace::featurize(std::string_view surface) const {
  if (!frozen_) throw SpaceNotFrozen("featurize called before the feature space was frozen");
  SparseVector v;
  for (auto& [gram, n] : char_ngrams(surface, n_min_, n_max_)) {
    if (auto idx = index_of(gram)) v.entries.emplace_back(*idx, n);
  }
  std::sort(v.entries.begin(), v.entries.end());
  return v;
}

FeatureSpace fit_feature_space(std::span<const std::string> train_surfaces, int n_min, int n_max) {
  FeatureSpace space(n_min, n_max);
  for (const auto& s : train_surfaces) space.add(s);
  space.freeze();
  return space;
}

}  // namespace wikiner::ml
