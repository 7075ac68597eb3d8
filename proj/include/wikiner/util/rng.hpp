#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace wikiner::util {

// Fisher-Yates over std::mt19937_64 raw output. std::shuffle and the
// standard distributions are implementation-defined, this is not.
template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace wikiner::util
