#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "crtmap/circle_tree.hpp"
#include "crtmap/excursion.hpp"
#include "crtmap/snake.hpp"
#include "crtmap/union_find.hpp"

namespace crtmap {

/*
 * Single-source shortest paths on the complete graph {0..count-1} with edge
 * weights evaluated on demand. Array-based Dijkstra: O(count^2) time and
 * O(count) memory, which beats a heap on dense graphs.
 */
template <typename Weight>
std::vector<std::int64_t> dense_dijkstra(std::size_t count, std::size_t source, Weight&& weight) {
  constexpr auto inf = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> dist(count, inf);
  std::vector<bool> done(count, false);
  dist[source] = 0;
  for (std::size_t round = 0; round < count; ++round) {
    std::size_t u = count;
    for (std::size_t v = 0; v < count; ++v) {
      if (!done[v] && dist[v] != inf && (u == count || dist[v] < dist[u])) u = v;
    }
    if (u == count) break;
    done[u] = true;
    for (std::size_t v = 0; v < count; ++v) {
      if (done[v]) continue;
      const std::int64_t alt = dist[u] + static_cast<std::int64_t>(weight(u, v));
      if (alt < dist[v]) dist[v] = alt;
    }
  }
  return dist;
}

/*
 * Labels Z_bar of the re-rooted pair on a subset of contour times. D° is the
 * one-step distance on times; D* is its chain closure restricted to the
 * sampled times.
 */
class MapMetricSample {
 public:
  MapMetricSample(std::vector<int> z_bar, std::vector<std::uint32_t> times)
      : zbar_(std::move(z_bar)), times_(std::move(times)) {
    for (auto t : times_) {
      if (t > zbar_.period()) throw std::out_of_range("MapMetricSample: time out of range");
    }
    if (times_.size() > zbar_.period() + 1) throw std::invalid_argument("MapMetricSample: too many times");
  }

  static MapMetricSample all_times(std::vector<int> z_bar) {
    std::vector<std::uint32_t> times(z_bar.size() - 1);
    for (std::size_t t = 0; t < times.size(); ++t) times[t] = static_cast<std::uint32_t>(t);
    return MapMetricSample(std::move(z_bar), std::move(times));
  }

  // one uniformly chosen time in each of `count` equal strata of [0, 2n)
  static MapMetricSample stratified(std::vector<int> z_bar, std::size_t count, std::uint64_t seed) {
    const std::size_t period = z_bar.size() - 1;
    if (count == 0 || count > period) throw std::invalid_argument("MapMetricSample: bad sample size");
    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> times(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t lo = i * period / count, hi = (i + 1) * period / count - 1;
      times[i] = static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(lo, hi)(rng));
    }
    return MapMetricSample(std::move(z_bar), std::move(times));
  }

  std::size_t size() const { return times_.size(); }
  std::uint32_t time(std::size_t i) const { return times_.at(i); }
  const std::vector<std::uint32_t>& times() const { return times_; }
  const CircleFunction<int>& labels() const { return zbar_; }

  // D°(a, b) on contour times
  int d_circ_times(std::size_t a, std::size_t b) const { return zbar_.pseudo_distance(a, b); }

  // D° between sample indices
  int d_circ(std::size_t i, std::size_t j) const {
    if (i >= size() || j >= size()) throw std::out_of_range("d_circ: sample index out of range");
    return zbar_.pseudo_distance(times_[i], times_[j]);
  }

  std::vector<std::int64_t> d_star_from(std::size_t source) const {
    if (source >= size()) throw std::out_of_range("d_star_from: sample index out of range");
    return dense_dijkstra(size(), source,
                          [this](std::size_t i, std::size_t j) { return zbar_.pseudo_distance(times_[i], times_[j]); });
  }

 private:
  CircleFunction<int> zbar_;
  std::vector<std::uint32_t> times_;
};

/*
 * D° between tree points of T_ebar: the minimum of the time formula over all
 * contour representatives of the two classes (smallest-arc convention).
 * Constant on classes by construction.
 */
inline int d_circ_vertex(const CircleTree& tree_bar, const CircleFunction<int>& zbar, std::size_t a, std::size_t b) {
  int best = std::numeric_limits<int>::max();
  for (auto x : tree_bar.visits[tree_bar.class_id[a]]) {
    for (auto y : tree_bar.visits[tree_bar.class_id[b]]) best = std::min(best, zbar.pseudo_distance(x, y));
  }
  return best;
}

struct ZeroClassResult {
  bool pass = true;
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  const char* reason = "";
};

/*
 * Checks that {D* = 0} equals {D° = 0}: zero-weight chains never join two
 * points without a direct zero edge. Also rejects asymmetric weights.
 */
template <typename Weight>
ZeroClassResult zero_class_check(std::size_t count, Weight&& weight) {
  UnionFind uf(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const auto wij = weight(i, j), wji = weight(j, i);
      if (wij != wji) return {false, std::pair(i, j), "asymmetric weight"};
      if (wij == 0) uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      if (uf.find(static_cast<std::uint32_t>(i)) == uf.find(static_cast<std::uint32_t>(j)) && weight(i, j) != 0) {
        return {false, std::pair(i, j), "zero chain without zero edge"};
      }
    }
  }
  return {};
}

inline ZeroClassResult zero_class_check(const MapMetricSample& s) {
  return zero_class_check(s.size(), [&](std::size_t i, std::size_t j) { return s.d_circ(i, j); });
}

struct IsometryWitness {
  std::size_t a, b;
  const char* identity;
};

namespace detail {

inline std::optional<IsometryWitness> check_isometry_pair(const ContourIndex& e_idx, const ContourIndex& ebar_idx,
                                                          std::span<const int> z, const Rerooted& r, std::size_t a,
                                                          std::size_t b) {
  const std::size_t period = e_idx.period();
  const std::size_t ra = oplus(a, r.s_star, period), rb = oplus(b, r.s_star, period);
  if (ebar_idx.pseudo_distance(a, b) != e_idx.pseudo_distance(ra, rb)) return IsometryWitness{a, b, "tree isometry"};
  if (r.z_bar[a] != z[ra] - r.underline_z) return IsometryWitness{a, b, "label shift"};
  return std::nullopt;
}

}  // namespace detail

/*
 * The rotation by s* maps (T_ebar, d_ebar) isometrically onto (T_e, d_e) and
 * Z_bar(a) = Z(a (+) s*) - min Z. Checked on random pairs, or on every pair
 * when trials == 0.
 */
inline std::optional<IsometryWitness> reroot_isometry_check(const DiscreteExcursion& e, std::span<const int> z,
                                                            const Rerooted& r, std::size_t trials, std::uint64_t seed) {
  const ContourIndex e_idx(e.heights), ebar_idx(r.e_bar.heights);
  const std::size_t period = e.period();
  if (trials == 0) {
    for (std::size_t a = 0; a <= period; ++a) {
      for (std::size_t b = 0; b <= period; ++b) {
        if (auto w = detail::check_isometry_pair(e_idx, ebar_idx, z, r, a, b)) return w;
      }
    }
    return std::nullopt;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, period);
  for (std::size_t i = 0; i < trials; ++i) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (auto w = detail::check_isometry_pair(e_idx, ebar_idx, z, r, a, b)) return w;
  }
  return std::nullopt;
}

}  // namespace crtmap
