#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crtmap/circle_tree.hpp"
#include "crtmap/excursion.hpp"
#include "crtmap/union_find.hpp"

namespace crtmap {

enum class IncrementLaw { uniform3, plus_minus_one };

inline std::string_view law_name(IncrementLaw law) {
  return law == IncrementLaw::uniform3 ? "u3" : "pm1";
}

inline IncrementLaw parse_law(std::string_view name) {
  if (name == "u3") return IncrementLaw::uniform3;
  if (name == "pm1") return IncrementLaw::plus_minus_one;
  throw std::invalid_argument("unknown increment law: " + std::string(name));
}

inline double increment_variance(IncrementLaw law) {
  return law == IncrementLaw::uniform3 ? 2.0 / 3.0 : 1.0;
}

template <typename Rng>
int draw_increment(IncrementLaw law, Rng& rng) {
  if (law == IncrementLaw::uniform3) {
    return static_cast<int>(std::uniform_int_distribution<int>(0, 2)(rng)) - 1;
  }
  return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? -1 : 1;
}

// Snake-head labels read along the contour; values[t] = label of class_id[t].
struct LabelFunction {
  std::vector<int> values;
  IncrementLaw law = IncrementLaw::uniform3;
  std::uint64_t seed = 0;
};

// Per-vertex labels with root 0 and i.i.d. edge increments. Vertex ids are preorder, so parents come first.
template <typename Rng>
std::vector<int> sample_vertex_labels(const CircleTree& tree, IncrementLaw law, Rng& rng) {
  std::vector<int> labels(tree.n_vertices(), 0);
  for (std::size_t v = 1; v < labels.size(); ++v) {
    labels[v] = labels[static_cast<std::size_t>(tree.parent[v])] + draw_increment(law, rng);
  }
  return labels;
}

inline LabelFunction labels_from_vertex_labels(const CircleTree& tree, std::span<const int> vertex_labels,
                                               IncrementLaw law = IncrementLaw::uniform3,
                                               std::uint64_t seed = 0) {
  if (vertex_labels.size() != tree.n_vertices()) {
    throw std::invalid_argument("labels: one label per tree vertex required");
  }
  LabelFunction z{std::vector<int>(tree.class_id.size()), law, seed};
  for (std::size_t t = 0; t < tree.class_id.size(); ++t) z.values[t] = vertex_labels[tree.class_id[t]];
  return z;
}

// increments[v] is the increment on the edge parent(v) -> v; increments[0] is ignored.
inline LabelFunction labels_from_increments(const CircleTree& tree, std::span<const int> increments) {
  if (increments.size() != tree.n_vertices()) {
    throw std::invalid_argument("labels: one increment per tree vertex required");
  }
  std::vector<int> labels(tree.n_vertices(), 0);
  for (std::size_t v = 1; v < labels.size(); ++v) {
    labels[v] = labels[static_cast<std::size_t>(tree.parent[v])] + increments[v];
  }
  return labels_from_vertex_labels(tree, labels);
}

inline LabelFunction sample_labels(const CircleTree& tree, IncrementLaw law, std::uint64_t seed) {
  if (tree.n_vertices() == 0 || tree.class_id.empty()) throw std::invalid_argument("sample_labels: empty tree");
  std::mt19937_64 rng(seed);
  const auto labels = sample_vertex_labels(tree, law, rng);
  return labels_from_vertex_labels(tree, labels, law, seed);
}

struct CovarianceEstimate {
  std::size_t s = 0, t = 0;
  double mean = 0;     // sample mean of Z_s * Z_t
  double std_error = 0;   // standard error of the mean
  double target = 0;   // sigma^2 * height of the common ancestor
};

inline int common_ancestor_height(const CircleTree& tree, std::uint32_t u, std::uint32_t v) {
  while (u != v) {
    if (tree.vertex_height[u] >= tree.vertex_height[v]) {
      u = static_cast<std::uint32_t>(tree.parent[u]);
    } else {
      v = static_cast<std::uint32_t>(tree.parent[v]);
    }
  }
  return tree.vertex_height[u];
}

// Monte Carlo estimate of E[Z_s Z_t | tree] over M independent label draws, all pairs sharing draws.
inline std::vector<CovarianceEstimate> covariance_estimates(const CircleTree& tree, IncrementLaw law,
                                                            std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                                            std::size_t replicates, std::uint64_t seed) {
  std::vector<CovarianceEstimate> out(pairs.size());
  std::vector<double> sum(pairs.size(), 0.0), sum_sq(pairs.size(), 0.0);
  std::mt19937_64 rng(seed);
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto labels = sample_vertex_labels(tree, law, rng);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double x = static_cast<double>(labels[tree.class_id[pairs[i].first]]) *
                       static_cast<double>(labels[tree.class_id[pairs[i].second]]);
      sum[i] += x;
      sum_sq[i] += x * x;
    }
  }
  const double m = static_cast<double>(replicates);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto& est = out[i];
    est.s = pairs[i].first;
    est.t = pairs[i].second;
    est.mean = sum[i] / m;
    const double var = std::max(0.0, (sum_sq[i] - m * est.mean * est.mean) / (m - 1));
    est.std_error = std::sqrt(var / m);
    est.target = increment_variance(law) *
                 common_ancestor_height(tree, tree.class_id[est.s], tree.class_id[est.t]);
  }
  return out;
}

inline CovarianceEstimate covariance_estimate(const CircleTree& tree, IncrementLaw law, std::size_t s,
                                              std::size_t t, std::size_t replicates, std::uint64_t seed) {
  if (replicates < 1000) throw std::invalid_argument("covariance_estimate: need at least 1000 replicates");
  const std::pair<std::size_t, std::size_t> pair{s, t};
  return covariance_estimates(tree, law, std::span(&pair, 1), replicates, seed).front();
}

struct Rerooted {
  std::size_t s_star = 0;
  DiscreteExcursion e_bar;
  std::vector<int> z_bar;
  int underline_z = 0;
};

// cyclic shift on {0, ..., P}: s (+) t = s + t, minus P if that exceeds P
inline std::size_t oplus(std::size_t s, std::size_t t, std::size_t period) {
  return s + t <= period ? s + t : s + t - period;
}

/*
 * Re-roots (e, Z) at the first time s* where Z is minimal:
 *   e_bar(t) = e(s*) + e(s* (+) t) - 2 min of e between s* and s* (+) t,
 *   Z_bar(t) = Z(s* (+) t) - Z(s*).
 */
inline Rerooted reroot(const DiscreteExcursion& e, std::span<const int> z) {
  const std::size_t period = e.period();
  if (z.size() != period + 1) throw std::invalid_argument("reroot: labels not aligned with excursion");
  Rerooted out;
  out.s_star = static_cast<std::size_t>(std::min_element(z.begin(), z.end()) - z.begin());
  out.underline_z = z[out.s_star];
  const ContourIndex idx(e.heights);
  std::vector<int> heights(period + 1);
  out.z_bar.resize(period + 1);
  for (std::size_t t = 0; t <= period; ++t) {
    const std::size_t u = oplus(out.s_star, t, period);
    const std::size_t lo = std::min(out.s_star, u), hi = std::max(out.s_star, u);
    heights[t] = e.heights[out.s_star] + e.heights[u] - 2 * idx.linear_min(lo, hi);
    out.z_bar[t] = z[u] - z[out.s_star];
  }
  out.e_bar = DiscreteExcursion::from_heights(heights, e.seed);
  return out;
}

// Local minima of Z_t / (2n)^{1/4} at the given window radius.
inline LocalMinimaReport hypothesis_check_HZ(std::span<const int> z, std::size_t window, double tol = 0.0) {
  if (z.size() < 4) throw std::invalid_argument("hypothesis_check_HZ: too few samples");
  const std::size_t period = z.size() - 1;
  const double scale = std::pow(static_cast<double>(period), -0.25);
  std::vector<double> f(period);
  for (std::size_t t = 0; t < period; ++t) f[t] = z[t] * scale;
  return local_minima_report(f, tol, window);
}

/*
 * Classes of ~_Z on the circle {0, ..., P-1}: a ~ c iff Z_a = Z_c and one of
 * the two arcs between them stays >= Z_a. Each time is linked to the next
 * time (cyclically, within one lap) whose value is <= its own when the values
 * are equal. Returns classes of size >= 2 with ascending times.
 */
inline std::vector<std::vector<std::uint32_t>> label_classes(std::span<const int> z) {
  const std::size_t period = z.size() - 1;
  UnionFind uf(period);
  std::vector<std::size_t> next_le(2 * period, SIZE_MAX);
  std::vector<std::size_t> stack;
  for (std::size_t i = 2 * period; i-- > 0;) {
    const int v = z[i % period];
    while (!stack.empty() && z[stack.back() % period] > v) stack.pop_back();
    if (!stack.empty()) next_le[i] = stack.back();
    stack.push_back(i);
  }
  for (std::size_t t = 0; t < period; ++t) {
    const std::size_t j = next_le[t];
    if (j == SIZE_MAX || j >= t + period) continue;
    if (z[j % period] == z[t]) uf.unite(static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(j % period));
  }
  std::vector<std::vector<std::uint32_t>> by_root(period);
  for (std::size_t t = 0; t < period; ++t) by_root[uf.find(static_cast<std::uint32_t>(t))].push_back(static_cast<std::uint32_t>(t));
  std::vector<std::vector<std::uint32_t>> classes;
  for (auto& c : by_root) {
    if (c.size() >= 2) classes.push_back(std::move(c));
  }
  return classes;
}

// true if sorted positions (in [0, P)) contain x with cyclic distance to a >= sep
inline bool has_far_partner(std::span<const std::uint32_t> sorted, std::size_t a, std::size_t sep,
                            std::size_t period) {
  if (2 * sep > period) return false;
  const std::size_t lo = a + sep, hi = a + period - sep;
  auto any_in = [&](std::size_t l, std::size_t h) {
    if (l > h) return false;
    auto it = std::lower_bound(sorted.begin(), sorted.end(), l);
    return it != sorted.end() && *it <= h;
  };
  if (lo < period && any_in(lo, std::min(hi, period - 1))) return true;
  if (hi >= period && any_in(lo >= period ? lo - period : 0, hi - period)) return true;
  return false;
}

struct HprimeReport {
  std::size_t count = 0;
  double fraction = 0;
  bool degenerate = false;
};

/*
 * Counts times a having both a tree partner b (d_e(a,b) = 0) and a label
 * partner c (d_Z(a,c) = 0) at cyclic distance >= separation from a.
 */
inline HprimeReport hypothesis_check_Hprime(const CircleTree& tree, std::span<const int> z,
                                            std::size_t separation) {
  if (separation < 1) throw std::invalid_argument("hypothesis_check_Hprime: separation must be >= 1");
  const std::size_t period = tree.period();
  if (z.size() != period + 1) throw std::invalid_argument("hypothesis_check_Hprime: labels not aligned");
  HprimeReport report;
  report.degenerate = std::all_of(z.begin(), z.end(), [&](int v) { return v == z[0]; });

  std::vector<std::vector<std::uint32_t>> tree_pts(tree.n_vertices());
  for (std::size_t v = 0; v < tree.n_vertices(); ++v) {
    for (auto t : tree.visits[v]) {
      if (t != period) tree_pts[v].push_back(t);
    }
  }
  std::vector<std::int64_t> label_class_of(period, -1);
  const auto classes = label_classes(z);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (auto t : classes[c]) label_class_of[t] = static_cast<std::int64_t>(c);
  }
  for (std::size_t a = 0; a < period; ++a) {
    if (!has_far_partner(tree_pts[tree.class_id[a]], a, separation, period)) continue;
    if (label_class_of[a] < 0) continue;
    if (has_far_partner(classes[static_cast<std::size_t>(label_class_of[a])], a, separation, period)) ++report.count;
  }
  report.fraction = static_cast<double>(report.count) / static_cast<double>(period);
  return report;
}

}  // namespace crtmap
