#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "crtmap/excursion.hpp"

namespace crtmap {

/*
 * The quotient of the circle by d_g = 0 for a Dyck contour: one vertex per
 * class, vertex ids in depth-first (preorder) order, root = 0. The root class
 * contains both t = 0 and t = 2n.
 */
struct CircleTree {
  std::vector<std::uint32_t> class_id;      // indexed by time 0..2n
  std::vector<int> vertex_height;           // per vertex
  std::vector<std::int64_t> parent;         // -1 for the root
  std::vector<std::vector<std::uint32_t>> children;  // plane order
  std::vector<std::vector<std::uint32_t>> visits;    // ascending times per vertex

  std::size_t n_vertices() const { return vertex_height.size(); }
  std::size_t n_edges() const { return n_vertices() - 1; }
  std::size_t period() const { return class_id.size() - 1; }

  // graph distance by climbing to the common ancestor
  int tree_distance(std::uint32_t u, std::uint32_t v) const {
    int d = 0;
    while (u != v) {
      if (vertex_height[u] >= vertex_height[v]) {
        u = static_cast<std::uint32_t>(parent[u]);
      } else {
        v = static_cast<std::uint32_t>(parent[v]);
      }
      ++d;
    }
    return d;
  }
};

// Linear stack scan: an up-step opens a child of the vertex on top, a down-step closes it.
inline CircleTree build_circle_tree(const DiscreteExcursion& e) {
  CircleTree tree;
  const std::size_t steps = e.steps.size();
  tree.class_id.assign(steps + 1, 0);
  tree.vertex_height.reserve(e.n + 1);
  tree.parent.reserve(e.n + 1);
  tree.vertex_height.push_back(0);
  tree.parent.push_back(-1);
  tree.children.emplace_back();

  std::vector<std::uint32_t> stack{0};
  for (std::size_t t = 0; t < steps; ++t) {
    if (e.steps[t] == 1) {
      const auto v = static_cast<std::uint32_t>(tree.vertex_height.size());
      tree.vertex_height.push_back(e.heights[t + 1]);
      tree.parent.push_back(stack.back());
      tree.children[stack.back()].push_back(v);
      tree.children.emplace_back();
      stack.push_back(v);
    } else {
      stack.pop_back();
    }
    tree.class_id[t + 1] = stack.back();
  }
  tree.visits.assign(tree.vertex_height.size(), {});
  for (std::size_t t = 0; t <= steps; ++t) {
    tree.visits[tree.class_id[t]].push_back(static_cast<std::uint32_t>(t));
  }
  return tree;
}

struct PlaneTree {
  std::vector<std::int64_t> parent;  // depth-first order, root 0 has -1
  std::vector<std::vector<std::uint32_t>> children;
};

/*
 * Independent Dyck parser: push on +1, pop on -1. Kept separate from
 * build_circle_tree so the two can be compared.
 */
inline PlaneTree plane_tree_oracle(const std::vector<int>& steps) {
  PlaneTree tree;
  tree.parent.push_back(-1);
  tree.children.emplace_back();
  std::vector<std::uint32_t> path{0};
  for (int s : steps) {
    if (s == 1) {
      const auto v = static_cast<std::uint32_t>(tree.parent.size());
      tree.parent.push_back(path.back());
      tree.children[path.back()].push_back(v);
      tree.children.emplace_back();
      path.push_back(v);
    } else if (s == -1) {
      if (path.size() == 1) throw std::invalid_argument("plane_tree_oracle: unbalanced steps");
      path.pop_back();
    } else {
      throw std::invalid_argument("plane_tree_oracle: steps must be +1 or -1");
    }
  }
  if (path.size() != 1) throw std::invalid_argument("plane_tree_oracle: unbalanced steps");
  return tree;
}

// Rooted plane-tree isomorphism by simultaneous depth-first traversal.
inline bool isomorphic(const PlaneTree& a, const CircleTree& b) {
  if (a.parent.size() != b.n_vertices()) return false;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [u, v] = stack.back();
    stack.pop_back();
    if (a.children[u].size() != b.children[v].size()) return false;
    for (std::size_t i = 0; i < a.children[u].size(); ++i) {
      stack.emplace_back(a.children[u][i], b.children[v][i]);
    }
  }
  return true;
}

// class size -> number of classes; the root counts both t = 0 and t = 2n
inline std::map<std::size_t, std::size_t> class_histogram(const CircleTree& tree) {
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& v : tree.visits) ++histogram[v.size()];
  return histogram;
}

/*
 * Finite-n proxy for "classes have at most three points": a class's macroscopic
 * size is the number of cyclic gaps between consecutive visits of length at
 * least eps * 2n. Returns the fraction of classes with macroscopic size >= 4
 * among those with macroscopic size >= 2 (0 if there are none).
 */
inline double macroscopic_class_fraction(const CircleTree& tree, double eps) {
  const std::size_t period = tree.period();
  const double cutoff = eps * static_cast<double>(period);
  std::size_t large = 0, nontrivial = 0;
  for (const auto& v : tree.visits) {
    std::vector<std::size_t> pts;
    for (auto t : v) {
      if (t != period) pts.push_back(t);
    }
    if (pts.size() < 2) continue;
    std::size_t gaps = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::size_t next = i + 1 < pts.size() ? pts[i + 1] : pts[0] + period;
      if (static_cast<double>(next - pts[i]) >= cutoff) ++gaps;
    }
    if (gaps >= 2) ++nontrivial;
    if (gaps >= 4) ++large;
  }
  return nontrivial == 0 ? 0.0 : static_cast<double>(large) / static_cast<double>(nontrivial);
}

struct PseudometricWitness {
  std::size_t a, b, c;
  const char* axiom;
};

/*
 * Checks symmetry, nonnegativity, d(a,a) = 0 and the triangle inequality on
 * random triples. ArcMin(a, b) must return the counterclockwise arc minimum.
 */
template <typename ArcMin>
  requires std::invocable<ArcMin&, std::size_t, std::size_t>
std::optional<PseudometricWitness> verify_pseudometric(const DiscreteExcursion& e, ArcMin&& arc_min,
                                                       std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, e.period());
  const auto& h = e.heights;
  auto d = [&](std::size_t a, std::size_t b) {
    const int m = std::max(arc_min(a, b), arc_min(b, a));
    return h[a] + h[b] - 2 * m;
  };
  for (std::size_t i = 0; i < trials; ++i) {
    const std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
    const int ab = d(a, b), ba = d(b, a), bc = d(b, c), ac = d(a, c);
    if (ab != ba) return PseudometricWitness{a, b, c, "symmetry"};
    if (ab < 0 || bc < 0 || ac < 0) return PseudometricWitness{a, b, c, "nonnegativity"};
    if (d(a, a) != 0) return PseudometricWitness{a, a, a, "diagonal"};
    if (ac > ab + bc) return PseudometricWitness{a, b, c, "triangle"};
  }
  return std::nullopt;
}

inline std::optional<PseudometricWitness> verify_pseudometric(const DiscreteExcursion& e,
                                                              const ContourIndex& idx,
                                                              std::size_t trials, std::uint64_t seed) {
  return verify_pseudometric(
      e, [&](std::size_t a, std::size_t b) { return idx.arc_min(a, b); }, trials, seed);
}

}  // namespace crtmap
