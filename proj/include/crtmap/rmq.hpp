#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace crtmap {

/*
 * Doubling sparse table: O(N log N) construction and memory, O(1) range minimum.
 * level_[k][i] holds min(values[i .. i + 2^k - 1]).
 */
template <typename T>
class SparseTable {
 public:
  SparseTable() = default;

  explicit SparseTable(std::span<const T> values) {
    if (values.empty()) return;
    levels_.emplace_back(values.begin(), values.end());
    for (std::size_t width = 2; width <= values.size(); width *= 2) {
      const auto& prev = levels_.back();
      const std::size_t half = width / 2;
      std::vector<T> next(values.size() - width + 1);
      for (std::size_t i = 0; i < next.size(); ++i) {
        next[i] = prev[i + half] < prev[i] ? prev[i + half] : prev[i];
      }
      levels_.push_back(std::move(next));
    }
  }

  std::size_t size() const { return levels_.empty() ? 0 : levels_.front().size(); }

  // number of stored entries over all levels
  std::size_t memory_entries() const {
    std::size_t total = 0;
    for (const auto& level : levels_) total += level.size();
    return total;
  }

  // minimum over the closed index range [lo, hi]
  T query(std::size_t lo, std::size_t hi) const {
    if (lo > hi || hi >= size()) throw std::out_of_range("SparseTable::query: bad range");
    const std::size_t width = hi - lo + 1;
    const int k = std::bit_width(width) - 1;
    const T& left = levels_[k][lo];
    const T& right = levels_[k][hi + 1 - (std::size_t{1} << k)];
    return right < left ? right : left;
  }

 private:
  std::vector<std::vector<T>> levels_;
};

}  // namespace crtmap
