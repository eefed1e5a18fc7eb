#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crtmap/rmq.hpp"

namespace crtmap {

/*
 * Integer contour function of a plane tree: 2n steps of +1/-1 starting and
 * ending at 0 and never going negative. Time t in {0, ..., 2n} is read on the
 * circle at angle 2*pi*t/(2n), so t = 0 and t = 2n are the same point.
 */
struct DiscreteExcursion {
  std::size_t n = 0;
  std::vector<int> steps;
  std::vector<int> heights;
  std::uint64_t seed = 0;

  std::size_t period() const { return 2 * n; }

  // Validates the step sequence and recomputes heights.
  static DiscreteExcursion from_steps(std::vector<int> steps, std::uint64_t seed = 0) {
    if (steps.empty() || steps.size() % 2 != 0) {
      throw std::invalid_argument("excursion: step count must be positive and even");
    }
    DiscreteExcursion e;
    e.n = steps.size() / 2;
    e.seed = seed;
    e.heights.assign(steps.size() + 1, 0);
    for (std::size_t t = 0; t < steps.size(); ++t) {
      if (steps[t] != 1 && steps[t] != -1) {
        throw std::invalid_argument("excursion: steps must be +1 or -1");
      }
      e.heights[t + 1] = e.heights[t] + steps[t];
      if (e.heights[t + 1] < 0) throw std::invalid_argument("excursion: path goes below 0");
    }
    if (e.heights.back() != 0) throw std::invalid_argument("excursion: path does not return to 0");
    e.steps = std::move(steps);
    return e;
  }

  static DiscreteExcursion from_heights(const std::vector<int>& heights, std::uint64_t seed = 0) {
    if (heights.size() < 3 || heights.front() != 0) {
      throw std::invalid_argument("excursion: heights must start at 0 and have length >= 3");
    }
    std::vector<int> steps(heights.size() - 1);
    for (std::size_t t = 0; t + 1 < heights.size(); ++t) steps[t] = heights[t + 1] - heights[t];
    return from_steps(std::move(steps), seed);
  }
};

/*
 * Uniform Dyck path of half-length n. Shuffles n up-steps and n+1 down-steps;
 * by the cycle lemma exactly one rotation stays nonnegative until its final
 * step, and dropping that final down-step leaves a uniform excursion.
 */
inline DiscreteExcursion sample_dyck_excursion(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_dyck_excursion: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<int> word(2 * n + 1, -1);
  std::fill(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(n), 1);
  std::shuffle(word.begin(), word.end(), rng);

  long sum = 0;
  long best = std::numeric_limits<long>::max();
  std::size_t cut = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    sum += word[i];
    if (sum < best) {
      best = sum;
      cut = i + 1;
    }
  }
  std::rotate(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(cut % word.size()), word.end());
  word.pop_back();
  return DiscreteExcursion::from_steps(std::move(word), seed);
}

// t -> 2n - t
inline DiscreteExcursion time_reversed(const DiscreteExcursion& e) {
  std::vector<int> steps(e.steps.rbegin(), e.steps.rend());
  for (int& s : steps) s = -s;
  return DiscreteExcursion::from_steps(std::move(steps), e.seed);
}

/*
 * A function sampled on the circle {0, ..., N} with f(0) = f(N), with O(1)
 * counterclockwise arc minima. Used for contour heights and for labels.
 */
template <typename T = int>
class CircleFunction {
 public:
  CircleFunction() = default;

  explicit CircleFunction(std::vector<T> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw std::invalid_argument("CircleFunction: need at least 2 samples");
    if (values_.front() != values_.back()) {
      throw std::invalid_argument("CircleFunction: endpoint values must agree");
    }
    table_ = SparseTable<T>(std::span<const T>(values_));
  }

  std::size_t period() const { return values_.size() - 1; }
  const std::vector<T>& values() const { return values_; }
  T operator[](std::size_t t) const { return values_[t]; }
  const SparseTable<T>& index() const { return table_; }

  T linear_min(std::size_t lo, std::size_t hi) const { return table_.query(lo, hi); }

  // closed counterclockwise arc from a to b
  T arc_min(std::size_t a, std::size_t b) const {
    check(a);
    check(b);
    if (a <= b) return table_.query(a, b);
    return std::min(table_.query(a, period()), table_.query(0, b));
  }

  // m(a,b) = max(min over [a,b], min over [b,a])
  T max_arc_min(std::size_t a, std::size_t b) const {
    return std::max(arc_min(a, b), arc_min(b, a));
  }

  T pseudo_distance(std::size_t a, std::size_t b) const {
    return values_[a] + values_[b] - 2 * max_arc_min(a, b);
  }

 private:
  void check(std::size_t t) const {
    if (t > period()) throw std::out_of_range("CircleFunction: time out of range");
  }

  std::vector<T> values_;
  SparseTable<T> table_;
};

using ContourIndex = CircleFunction<int>;

inline ContourIndex make_index(const DiscreteExcursion& e) { return ContourIndex(e.heights); }

struct LocalMinimaReport {
  std::vector<std::pair<std::size_t, double>> minima;  // (position, value)
  double min_gap = std::numeric_limits<double>::infinity();
  std::size_t ties = 0;  // pairs of minima whose values differ by at most tol
  bool degenerate = false;
};

/*
 * Strict local minima of a function sampled at f[0..m-1] on the circle
 * (no duplicated endpoint). Runs of equal values are collapsed to their first
 * index. A minimum must also be the smallest value within +-window samples.
 */
inline LocalMinimaReport local_minima_report(std::span<const double> f, double tol,
                                             std::size_t window = 1) {
  if (f.size() < 3) throw std::invalid_argument("local_minima_report: need >= 3 samples");
  if (tol < 0) throw std::invalid_argument("local_minima_report: tol must be >= 0");
  LocalMinimaReport report;
  const std::size_t m = f.size();

  // rotate so that index 0 starts a run
  std::size_t start = 0;
  while (start < m && f[start] == f[(start + m - 1) % m]) ++start;
  if (start == m) {
    report.degenerate = true;
    return report;
  }
  struct Run {
    std::size_t first;
    std::size_t length;
    double value;
  };
  std::vector<Run> runs;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t t = (start + k) % m;
    if (!runs.empty() && f[t] == runs.back().value) {
      ++runs.back().length;
    } else {
      runs.push_back({t, 1, f[t]});
    }
  }

  const std::size_t r = runs.size();
  for (std::size_t i = 0; i < r; ++i) {
    const Run& run = runs[i];
    if (!(run.value < runs[(i + r - 1) % r].value && run.value < runs[(i + 1) % r].value)) continue;
    bool window_min = true;
    if (window > 1) {
      for (std::size_t d = 1; d <= window && window_min; ++d) {
        const double before = f[(run.first + m - d % m) % m];
        const double after = f[(run.first + run.length - 1 + d) % m];
        if (before < run.value || after < run.value) window_min = false;
      }
    }
    if (window_min) report.minima.emplace_back(run.first, run.value);
  }
  std::sort(report.minima.begin(), report.minima.end());

  std::vector<double> values;
  values.reserve(report.minima.size());
  for (const auto& [pos, value] : report.minima) values.push_back(value);
  std::sort(values.begin(), values.end());
  for (std::size_t i = 1; i < values.size(); ++i) {
    report.min_gap = std::min(report.min_gap, values[i] - values[i - 1]);
  }
  // count tied pairs with a sliding window over sorted values
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < values.size(); ++hi) {
    while (values[hi] - values[lo] > tol) ++lo;
    report.ties += hi - lo;
  }
  return report;
}

}  // namespace crtmap
