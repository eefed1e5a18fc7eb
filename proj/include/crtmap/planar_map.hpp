#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crtmap/circle_tree.hpp"
#include "crtmap/excursion.hpp"
#include "crtmap/snake.hpp"

namespace crtmap {

/*
 * Rooted combinatorial map. Half-edges 2e and 2e+1 form edge e, so
 * opp[h] == h ^ 1. next[] rotates around the origin vertex; faces are the
 * orbits of h -> next[opp[h]].
 */
struct PlanarMap {
  int k = 2;  // faces have degree 2k
  std::size_t n_faces = 0;
  std::uint32_t root = 0;
  std::vector<std::uint32_t> next;
  std::vector<std::uint32_t> opp;
  std::vector<std::uint32_t> vertex_of;
  std::size_t n_vertices = 0;

  std::size_t n_half_edges() const { return next.size(); }
  std::size_t n_edges() const { return next.size() / 2; }
  std::uint32_t root_vertex() const { return vertex_of[root]; }
  std::uint32_t target(std::uint32_t h) const { return vertex_of[opp[h]]; }
};

// Fills vertex_of and n_vertices from the orbits of next.
inline void assign_vertices(PlanarMap& map) {
  const std::size_t halves = map.next.size();
  map.vertex_of.assign(halves, std::numeric_limits<std::uint32_t>::max());
  std::uint32_t v = 0;
  for (std::uint32_t h = 0; h < halves; ++h) {
    if (map.vertex_of[h] != std::numeric_limits<std::uint32_t>::max()) continue;
    for (std::uint32_t x = h; map.vertex_of[x] == std::numeric_limits<std::uint32_t>::max(); x = map.next[x]) {
      map.vertex_of[x] = v;
    }
    ++v;
  }
  map.n_vertices = v;
}

// Adjacency in CSR form; neighbors of v are listed in rotation order.
struct Graph {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> targets;

  std::size_t size() const { return offsets.size() - 1; }
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {targets.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
};

inline Graph adjacency(const PlanarMap& map) {
  Graph g;
  g.offsets.assign(map.n_vertices + 1, 0);
  std::vector<std::uint32_t> first(map.n_vertices, std::numeric_limits<std::uint32_t>::max());
  for (std::uint32_t h = 0; h < map.n_half_edges(); ++h) {
    ++g.offsets[map.vertex_of[h] + 1];
    if (first[map.vertex_of[h]] == std::numeric_limits<std::uint32_t>::max()) first[map.vertex_of[h]] = h;
  }
  for (std::size_t v = 0; v < map.n_vertices; ++v) g.offsets[v + 1] += g.offsets[v];
  g.targets.resize(map.n_half_edges());
  for (std::uint32_t v = 0; v < map.n_vertices; ++v) {
    std::uint32_t pos = g.offsets[v];
    std::uint32_t h = first[v];
    do {
      g.targets[pos++] = map.target(h);
      h = map.next[h];
    } while (h != first[v]);
  }
  return g;
}

inline std::vector<std::int32_t> bfs_distances(const Graph& g, std::uint32_t source) {
  std::vector<std::int32_t> dist(g.size(), -1);
  std::vector<std::uint32_t> queue{source};
  queue.reserve(g.size());
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t u = queue[head];
    for (std::uint32_t v : g.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

inline std::vector<std::int32_t> bfs_distances(const PlanarMap& map, std::uint32_t source) {
  if (source >= map.n_vertices) throw std::out_of_range("bfs_distances: bad source vertex");
  return bfs_distances(adjacency(map), source);
}

struct MapAudit {
  bool ok = true;
  std::string failure;
  std::size_t vertices = 0, edges = 0, faces = 0;
  bool connected = false;
  bool bipartite = false;
};

/*
 * Structural checks: next is a permutation, opp a fixed-point-free involution,
 * connectivity, face count and degrees, Euler characteristic 2, bipartiteness.
 */
inline MapAudit audit_map(const PlanarMap& map) {
  MapAudit audit;
  auto fail = [&](std::string why) {
    audit.ok = false;
    if (audit.failure.empty()) audit.failure = std::move(why);
  };
  const std::size_t halves = map.n_half_edges();
  audit.edges = map.n_edges();
  audit.vertices = map.n_vertices;
  if (halves == 0 || halves % 2 != 0 || map.opp.size() != halves || map.vertex_of.size() != halves) {
    fail("half-edge arrays have inconsistent sizes");
    return audit;
  }
  std::vector<bool> seen(halves, false);
  for (std::uint32_t h = 0; h < halves; ++h) {
    if (map.next[h] >= halves || seen[map.next[h]]) {
      fail("next is not a permutation");
      return audit;
    }
    seen[map.next[h]] = true;
    if (map.opp[h] != (h ^ 1u)) fail("opp is not the edge pairing");
    if (map.vertex_of[map.next[h]] != map.vertex_of[h]) fail("vertex_of disagrees with next orbits");
  }
  if (map.root >= halves) fail("root out of range");

  std::fill(seen.begin(), seen.end(), false);
  std::size_t faces = 0;
  for (std::uint32_t h = 0; h < halves; ++h) {
    if (seen[h]) continue;
    ++faces;
    std::size_t degree = 0;
    for (std::uint32_t x = h; !seen[x]; x = map.next[map.opp[x]]) {
      seen[x] = true;
      ++degree;
    }
    if (degree != static_cast<std::size_t>(2 * map.k)) fail("face of degree " + std::to_string(degree));
  }
  audit.faces = faces;
  if (faces != map.n_faces) fail("face count mismatch");

  const Graph g = adjacency(map);
  const auto dist = bfs_distances(g, 0);
  audit.connected = std::all_of(dist.begin(), dist.end(), [](std::int32_t d) { return d >= 0; });
  if (!audit.connected) fail("map is disconnected");
  audit.bipartite = true;
  for (std::uint32_t h = 0; h < halves && audit.connected; ++h) {
    if ((dist[map.vertex_of[h]] + dist[map.target(h)]) % 2 == 0) audit.bipartite = false;
  }
  if (!audit.bipartite) fail("map is not bipartite");
  const auto euler = static_cast<long>(audit.vertices) - static_cast<long>(audit.edges) + static_cast<long>(faces);
  if (euler != 2) fail("Euler characteristic " + std::to_string(euler));
  if (audit.vertices != static_cast<std::size_t>(map.k - 1) * map.n_faces + 2) fail("vertex count mismatch");
  return audit;
}

// A map together with the labels that generated it; pointed is the extra vertex of the bijection.
struct LabeledMap {
  PlanarMap map;
  std::vector<int> labels;  // per vertex
  std::uint32_t pointed = 0;
};

/*
 * Corner-successor construction shared by the tree and mobile bijections.
 * corners lists white corners in contour order; each corner is joined to the
 * next corner (cyclically) whose label is one less, or to an extra vertex
 * when its label is minimal. White vertex w keeps id w; the extra vertex gets
 * id n_white. The root is the edge drawn from corner 0, reversed when
 * flip_root is set.
 */
inline LabeledMap map_from_corners(std::span<const std::uint32_t> corner_vertex, std::span<const int> corner_label,
                                   std::size_t n_white, int k, std::size_t n_faces, bool flip_root) {
  const std::size_t count = corner_vertex.size();
  if (count == 0 || corner_label.size() != count) throw std::invalid_argument("map_from_corners: bad corner lists");
  const int min_label = *std::min_element(corner_label.begin(), corner_label.end());
  const int max_label = *std::max_element(corner_label.begin(), corner_label.end());
  const auto pointed = static_cast<std::uint32_t>(n_white);

  LabeledMap out;
  out.pointed = pointed;
  out.labels.assign(n_white + 1, 0);
  out.labels[pointed] = min_label - 1;
  for (std::size_t i = 0; i < count; ++i) out.labels[corner_vertex[i]] = corner_label[i];

  constexpr std::int64_t to_pointed = -1;
  std::vector<std::int64_t> succ(count, to_pointed);
  std::vector<std::int64_t> next_pos(static_cast<std::size_t>(max_label - min_label + 1), -1);
  for (std::size_t p = 2 * count; p-- > 0;) {
    const std::size_t i = p % count;
    const int level = corner_label[i] - min_label;
    if (p < count && level > 0) succ[i] = next_pos[static_cast<std::size_t>(level - 1)] % static_cast<std::int64_t>(count);
    next_pos[static_cast<std::size_t>(level)] = static_cast<std::int64_t>(p);
  }

  // incoming arcs per corner, ordered by forward distance from that corner
  std::vector<std::vector<std::uint32_t>> incoming(count);
  std::vector<std::uint32_t> into_pointed;
  for (std::size_t j = 0; j < count; ++j) {
    if (succ[j] == to_pointed) {
      into_pointed.push_back(static_cast<std::uint32_t>(j));
    } else {
      incoming[static_cast<std::size_t>(succ[j])].push_back(static_cast<std::uint32_t>(j));
    }
  }
  std::vector<std::vector<std::uint32_t>> corners_of(n_white);
  for (std::size_t i = 0; i < count; ++i) corners_of[corner_vertex[i]].push_back(static_cast<std::uint32_t>(i));

  PlanarMap& map = out.map;
  map.k = k;
  map.n_faces = n_faces;
  map.next.assign(2 * count, 0);
  map.opp.resize(2 * count);
  for (std::uint32_t h = 0; h < 2 * count; ++h) map.opp[h] = h ^ 1u;

  std::vector<std::uint32_t> ring;
  auto close_ring = [&]() {
    for (std::size_t r = 0; r < ring.size(); ++r) map.next[ring[r]] = ring[(r + 1) % ring.size()];
  };
  for (std::size_t w = 0; w < n_white; ++w) {
    ring.clear();
    const auto& cs = corners_of[w];
    for (auto it = cs.rbegin(); it != cs.rend(); ++it) {
      const std::uint32_t c = *it;
      ring.push_back(2 * c);
      auto& in = incoming[c];
      std::sort(in.begin(), in.end(), [&](std::uint32_t a, std::uint32_t b) {
        return (a + count - c) % count < (b + count - c) % count;
      });
      for (auto j : in) ring.push_back(2 * j + 1);
    }
    close_ring();
  }
  ring.clear();
  for (auto j : into_pointed) ring.push_back(2 * j + 1);
  close_ring();

  map.root = flip_root ? 1u : 0u;
  assign_vertices(map);
  // renumber so that white vertex w has id w and the extra vertex has id n_white
  std::vector<std::uint32_t> rename(map.n_vertices);
  for (std::size_t i = 0; i < count; ++i) {
    rename[map.vertex_of[2 * i]] = corner_vertex[i];
    if (succ[i] == to_pointed) rename[map.vertex_of[2 * i + 1]] = pointed;
  }
  for (auto& v : map.vertex_of) v = rename[v];
  return out;
}

/*
 * Uniform rooted quadrangulation with n faces, with its generating labels:
 * uniform Dyck tree, i.i.d. {-1,0,+1} edge labels, corner successors, and a
 * fair bit for the root orientation.
 */
inline LabeledMap sample_quadrangulation_labeled(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_quadrangulation: n must be >= 1");
  std::mt19937_64 rng(seed);
  const std::uint64_t tree_seed = rng(), label_seed = rng();
  const bool flip = (rng() & 1u) != 0;
  const auto e = sample_dyck_excursion(n, tree_seed);
  const auto tree = build_circle_tree(e);
  std::mt19937_64 label_rng(label_seed);
  const auto labels = sample_vertex_labels(tree, IncrementLaw::uniform3, label_rng);
  std::vector<std::uint32_t> corner_vertex(2 * n);
  std::vector<int> corner_label(2 * n);
  for (std::size_t t = 0; t < 2 * n; ++t) {
    corner_vertex[t] = tree.class_id[t];
    corner_label[t] = labels[tree.class_id[t]];
  }
  return map_from_corners(corner_vertex, corner_label, tree.n_vertices(), 2, n, flip);
}

inline PlanarMap sample_quadrangulation(std::size_t n, std::uint64_t seed) {
  return sample_quadrangulation_labeled(n, seed).map;
}

/*
 * Uniform rooted 2k-angulation with n faces from a uniform mobile: a plane
 * tree alternating white (labeled) and black (face) vertices, each black
 * vertex having k white neighbors. Shape from the cycle lemma on the
 * white-vertex Lukasiewicz word; around each black vertex the labels read in
 * contour order may drop by at most one per step.
 */
inline LabeledMap sample_2k_angulation_labeled(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("sample_2k_angulation: k must be >= 2");
  if (n == 0) throw std::invalid_argument("sample_2k_angulation: n must be >= 1");
  std::mt19937_64 rng(seed);
  const std::size_t km1 = static_cast<std::size_t>(k - 1);
  const std::size_t n_white = km1 * n + 1;

  // uniform composition of n black vertices among the white vertices
  std::vector<std::uint8_t> stars(n + n_white - 1, 0);
  std::fill(stars.begin(), stars.begin() + static_cast<std::ptrdiff_t>(n), 1);
  std::shuffle(stars.begin(), stars.end(), rng);
  std::vector<std::size_t> blacks(n_white, 0);
  {
    std::size_t w = 0;
    for (auto s : stars) {
      if (s) {
        ++blacks[w];
      } else {
        ++w;
      }
    }
  }
  long sum = 0, best = std::numeric_limits<long>::max();
  std::size_t cut = 0;
  for (std::size_t i = 0; i < n_white; ++i) {
    sum += static_cast<long>(km1 * blacks[i]) - 1;
    if (sum < best) {
      best = sum;
      cut = i + 1;
    }
  }
  std::rotate(blacks.begin(), blacks.begin() + static_cast<std::ptrdiff_t>(cut % n_white), blacks.end());

  // labels and contour corners in one depth-first pass; white ids are preorder
  std::vector<int> label(n_white, 0);
  std::vector<std::uint32_t> corner_vertex;
  std::vector<int> corner_label;
  corner_vertex.reserve(km1 * n + n);
  std::vector<std::uint8_t> comp(2 * static_cast<std::size_t>(k) - 1);

  struct Frame {
    std::uint32_t white;
    std::size_t blacks_left;
    std::vector<std::uint32_t> pending;  // white children of the current black vertex, in order
    std::size_t pending_pos;
  };
  std::uint32_t next_white = 1;
  std::vector<Frame> stack;
  stack.push_back({0, blacks[0], {}, 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.pending_pos < f.pending.size()) {
      const std::uint32_t child = f.pending[f.pending_pos++];
      stack.push_back({child, blacks[child], {}, 0});
      continue;
    }
    if (f.blacks_left > 0) {
      --f.blacks_left;
      corner_vertex.push_back(f.white);
      corner_label.push_back(label[f.white]);
      // increments x_1..x_k >= -1 summing to 0, uniform among C(2k-1, k-1) choices
      std::fill(comp.begin(), comp.end(), 0);
      std::fill(comp.begin(), comp.begin() + (k - 1), 1);
      std::shuffle(comp.begin(), comp.end(), rng);
      f.pending.clear();
      f.pending_pos = 0;
      int current = label[f.white];
      int run = 0;
      for (auto bar : comp) {
        if (!bar) {
          ++run;
          continue;
        }
        current += run - 1;
        run = 0;
        const std::uint32_t child = next_white++;
        label[child] = current;
        f.pending.push_back(child);
      }
      continue;
    }
    if (f.white != 0) {
      corner_vertex.push_back(f.white);
      corner_label.push_back(label[f.white]);
    }
    stack.pop_back();
  }
  const bool flip = (rng() & 1u) != 0;
  return map_from_corners(corner_vertex, corner_label, n_white, k, n, flip);
}

inline PlanarMap sample_2k_angulation(std::size_t n, int k, std::uint64_t seed) {
  return sample_2k_angulation_labeled(n, k, seed).map;
}

/*
 * Canonical code of a rooted map: half-edges relabeled in breadth-first
 * discovery order from the root through next and opp. Rooted maps have no
 * nontrivial automorphisms, so equal codes mean isomorphic rooted maps.
 */
inline std::vector<std::uint32_t> canonical_code(const PlanarMap& map) {
  const std::size_t halves = map.n_half_edges();
  constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(halves, unset), order;
  order.reserve(halves);
  label[map.root] = 0;
  order.push_back(map.root);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::uint32_t x : {map.next[order[i]], map.opp[order[i]]}) {
      if (label[x] == unset) {
        label[x] = static_cast<std::uint32_t>(order.size());
        order.push_back(x);
      }
    }
  }
  std::vector<std::uint32_t> code{static_cast<std::uint32_t>(halves)};
  for (auto h : order) {
    code.push_back(label[map.next[h]]);
    code.push_back(label[map.opp[h]]);
  }
  return code;
}

/*
 * Builds a map from faces given as vertex cycles. Faces are reoriented
 * consistently by propagation across shared edges; every edge must border
 * exactly two face sides. Vertex ids are kept. Throws on non-orientable or
 * malformed input.
 */
inline PlanarMap from_faces(const std::vector<std::vector<std::uint32_t>>& faces, std::uint32_t root_face = 0) {
  if (faces.empty()) throw std::invalid_argument("from_faces: no faces");
  const std::size_t degree = faces.front().size();
  if (degree < 2 || degree % 2 != 0) throw std::invalid_argument("from_faces: face degree must be even");
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::pair<std::size_t, std::size_t>>> sides;
  std::uint32_t max_vertex = 0;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].size() != degree) throw std::invalid_argument("from_faces: faces must share one degree");
    for (std::size_t j = 0; j < degree; ++j) {
      const auto u = faces[f][j], v = faces[f][(j + 1) % degree];
      max_vertex = std::max({max_vertex, u, v});
      sides[std::pair(std::min(u, v), std::max(u, v))].emplace_back(f, j);
    }
  }
  for (const auto& [edge, list] : sides) {
    if (list.size() != 2) throw std::invalid_argument("from_faces: every edge needs exactly two sides");
  }
  auto raw_dir = [&](std::size_t f, std::size_t j) {
    return std::pair(faces[f][j], faces[f][(j + 1) % degree]);
  };
  std::vector<int> flip(faces.size(), -1);
  std::vector<std::size_t> queue{0};
  flip[0] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t f = queue[head];
    for (std::size_t j = 0; j < degree; ++j) {
      auto [u, v] = raw_dir(f, j);
      if (flip[f]) std::swap(u, v);
      for (const auto& [g, side] : sides[std::pair(std::min(u, v), std::max(u, v))]) {
        if (g == f && side == j) continue;
        const auto [gu, gv] = raw_dir(g, side);
        const int needed = (gu == u && gv == v) ? 1 : 0;  // g must traverse v -> u
        if (flip[g] < 0) {
          flip[g] = needed;
          queue.push_back(g);
        } else if (flip[g] != needed) {
          throw std::invalid_argument("from_faces: surface is not orientable");
        }
      }
    }
  }
  if (queue.size() != faces.size()) throw std::invalid_argument("from_faces: faces are not connected");

  // oriented side (f, j) goes from origin(f, j) to origin(f, j + 1)
  auto origin = [&](std::size_t f, std::size_t j) {
    return flip[f] ? faces[f][(degree - j) % degree] : faces[f][j];
  };
  const std::size_t halves = faces.size() * degree;
  std::vector<std::uint32_t> half_of_side(halves);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> edge_id;
  std::vector<std::uint32_t> used(halves / 2, 0);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (std::size_t j = 0; j < degree; ++j) {
      const auto a = origin(f, j), b = origin(f, (j + 1) % degree);
      const auto key = std::pair(std::min(a, b), std::max(a, b));
      auto [it, inserted] = edge_id.emplace(key, static_cast<std::uint32_t>(edge_id.size()));
      half_of_side[f * degree + j] = 2 * it->second + used[it->second]++;
    }
  }
  PlanarMap map;
  map.k = static_cast<int>(degree / 2);
  map.n_faces = faces.size();
  map.next.resize(halves);
  map.opp.resize(halves);
  map.vertex_of.resize(halves);
  std::vector<std::uint32_t> phi(halves);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (std::size_t j = 0; j < degree; ++j) {
      const auto h = half_of_side[f * degree + j];
      phi[h] = half_of_side[f * degree + (j + 1) % degree];
      map.vertex_of[h] = origin(f, j);
    }
  }
  for (std::uint32_t h = 0; h < halves; ++h) {
    map.opp[h] = h ^ 1u;
    map.next[h] = phi[h ^ 1u];
  }
  map.root = half_of_side[root_face * degree];
  map.n_vertices = static_cast<std::size_t>(max_vertex) + 1;
  return map;
}

/*
 * Bijection check: distance from the extra vertex equals
 * label - min label + 1 for every vertex. Returns the first mismatching vertex.
 */
inline std::optional<std::uint32_t> cvs_distance_audit(const PlanarMap& map, std::span<const int> labels,
                                                       std::uint32_t pointed) {
  if (labels.size() != map.n_vertices) throw std::invalid_argument("cvs_distance_audit: label count mismatch");
  const auto dist = bfs_distances(map, pointed);
  int min_white = std::numeric_limits<int>::max();
  for (std::uint32_t v = 0; v < map.n_vertices; ++v) {
    if (v != pointed) min_white = std::min(min_white, labels[v]);
  }
  for (std::uint32_t v = 0; v < map.n_vertices; ++v) {
    const int expected = v == pointed ? 0 : labels[v] - min_white + 1;
    if (dist[v] != expected) return v;
  }
  return std::nullopt;
}

inline std::optional<std::uint32_t> cvs_distance_audit(const LabeledMap& m) {
  return cvs_distance_audit(m.map, m.labels, m.pointed);
}

struct BallGrowth {
  std::vector<int> radii;
  std::vector<std::size_t> counts;
  double exponent = 0;  // least-squares slope of log |B_r| against log r over radii >= 1
};

inline BallGrowth ball_growth_profile(const Graph& g, std::uint32_t center, std::span<const int> radii) {
  const auto dist = bfs_distances(g, center);
  int ecc = 0;
  for (auto d : dist) ecc = std::max(ecc, d);
  std::vector<std::size_t> at(static_cast<std::size_t>(ecc) + 1, 0);
  for (auto d : dist) {
    if (d >= 0) ++at[static_cast<std::size_t>(d)];
  }
  BallGrowth out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t fitted = 0;
  for (int r : radii) {
    if (r < 0) throw std::invalid_argument("ball_growth_profile: negative radius");
    std::size_t count = 0;
    for (int d = 0; d <= std::min(r, ecc); ++d) count += at[static_cast<std::size_t>(d)];
    out.radii.push_back(r);
    out.counts.push_back(count);
    if (r >= 1) {
      const double x = std::log(static_cast<double>(r)), y = std::log(static_cast<double>(count));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++fitted;
    }
  }
  if (fitted >= 2) {
    const double m = static_cast<double>(fitted);
    out.exponent = (sxy - sx * sy / m) / (sxx - sx * sx / m);
  }
  return out;
}

// Radii n^{1/8} .. n^{1/4} (rounded inward) used for the growth exponent.
inline std::vector<int> growth_window(std::size_t n_faces) {
  const double n = static_cast<double>(n_faces);
  const int lo = std::max(1, static_cast<int>(std::ceil(std::pow(n, 0.125))));
  const int hi = static_cast<int>(std::floor(std::pow(n, 0.25)));
  std::vector<int> radii;
  for (int r = lo; r <= hi; ++r) radii.push_back(r);
  return radii;
}

inline BallGrowth ball_growth_profile(const PlanarMap& map, std::uint32_t center, std::span<const int> radii) {
  return ball_growth_profile(adjacency(map), center, radii);
}

struct BottleneckFinding {
  std::vector<std::uint32_t> cycle;       // vertices x_0 .. x_{p-1}
  std::vector<std::uint32_t> half_edges;  // h_i goes from x_{i-1} to x_i
  int side_diameter[2] = {0, 0};          // lower bounds
};

/*
 * Injective cycles of length <= max_length whose two sides both have
 * diameter >= delta * n^{1/4} in the map metric. Cycles are enumerated once,
 * from their smallest vertex and in one orientation. The sides are grown
 * from the cycle's left and right neighbors by interleaved BFS in the map
 * minus the cycle; the first side to exhaust is the small one. Side
 * diameters are lower-bounded by a double sweep in the whole map.
 */
class BottleneckScanner {
 public:
  BottleneckScanner(const PlanarMap& map, double delta)
      : map_(map), graph_(adjacency(map)), mark_(map.n_vertices, 0), dist_(map.n_vertices, -1) {
    threshold_ = delta * std::pow(static_cast<double>(map.n_faces), 0.25);
  }

  double threshold() const { return threshold_; }

  std::vector<BottleneckFinding> scan(int max_length, std::size_t max_findings = SIZE_MAX) {
    if (max_length < 2 || max_length > 8) throw std::invalid_argument("bottleneck_scan: Lmax must be in [2, 8]");
    findings_.clear();
    max_length_ = max_length;
    max_findings_ = max_findings;
    on_cycle_.assign(map_.n_vertices, 0);
    first_out_.assign(map_.n_vertices, 0);
    for (std::uint32_t h = map_.n_half_edges(); h-- > 0;) first_out_[map_.vertex_of[h]] = h;
    for (std::uint32_t x0 = 0; x0 < map_.n_vertices && findings_.size() < max_findings_; ++x0) {
      path_.clear();
      verts_.assign(1, x0);
      on_cycle_[x0] = 1;
      extend(x0);
      on_cycle_[x0] = 0;
    }
    return findings_;
  }

 private:
  void extend(std::uint32_t x0) {
    const std::uint32_t here = verts_.back();
    const std::uint32_t start = first_out_[here];
    std::uint32_t h = start;
    do {
      if (findings_.size() >= max_findings_) return;
      const std::uint32_t to = map_.target(h);
      const std::size_t len = path_.size() + 1;
      if (to == x0 && len >= 2) {
        const bool canonical = len == 2 ? (path_[0] >> 1) < (h >> 1) : verts_[1] < verts_.back();
        if (canonical) {
          path_.push_back(h);
          evaluate();
          path_.pop_back();
        }
      } else if (to > x0 && !on_cycle_[to] && static_cast<int>(len) < max_length_) {
        path_.push_back(h);
        verts_.push_back(to);
        on_cycle_[to] = 1;
        extend(x0);
        on_cycle_[to] = 0;
        verts_.pop_back();
        path_.pop_back();
      }
      h = map_.next[h];
    } while (h != start);
  }

  void evaluate() {
    const std::size_t p = path_.size();
    seeds_[0].clear();
    seeds_[1].clear();
    for (std::size_t i = 0; i < p; ++i) {
      // at x_i (target of h_i): rotate from the outgoing h_{i+1} to the returning opp(h_i)
      const std::uint32_t out = path_[(i + 1) % p], back = map_.opp[path_[i]];
      int side = 0;
      for (std::uint32_t x = map_.next[out]; x != out; x = map_.next[x]) {
        if (x == back) {
          side = 1;
          continue;
        }
        const std::uint32_t v = map_.target(x);
        if (!on_cycle_[v]) seeds_[side].push_back(v);
      }
    }
    if (seeds_[0].empty() || seeds_[1].empty()) return;

    // interleaved BFS; stamps 2*epoch + side mark visited vertices
    ++epoch_;
    std::vector<std::uint32_t>* queues[2] = {&queue_[0], &queue_[1]};
    std::size_t head[2] = {0, 0};
    for (int s = 0; s < 2; ++s) {
      queues[s]->clear();
      for (auto v : seeds_[s]) {
        if (mark_[v] < 2 * epoch_) {
          mark_[v] = 2 * epoch_ + static_cast<std::uint64_t>(s);
          queues[s]->push_back(v);
        }
      }
    }
    int small = -1;
    while (small < 0) {
      for (int s = 0; s < 2 && small < 0; ++s) {
        auto& q = *queues[s];
        if (head[s] == q.size()) {
          small = s;
          break;
        }
        const std::uint32_t u = q[head[s]++];
        for (auto v : graph_.neighbors(u)) {
          if (on_cycle_[v] || mark_[v] >= 2 * epoch_) continue;
          mark_[v] = 2 * epoch_ + static_cast<std::uint64_t>(s);
          q.push_back(v);
        }
      }
    }
    const auto& small_side = *queues[small];
    const std::uint64_t small_mark = 2 * epoch_ + static_cast<std::uint64_t>(small);
    auto in_small = [&](std::uint32_t v) { return mark_[v] == small_mark; };
    auto in_large = [&](std::uint32_t v) { return !on_cycle_[v] && mark_[v] != small_mark; };
    const int d_small = diameter_lower_bound(small_side.front(), in_small, small_side.size());
    if (d_small < threshold_) return;
    const int d_large = diameter_lower_bound(queues[1 - small]->front(), in_large, SIZE_MAX);
    if (d_large < threshold_) return;

    BottleneckFinding f;
    f.half_edges = path_;
    for (std::size_t i = 0; i < p; ++i) f.cycle.push_back(map_.vertex_of[path_[i]]);
    f.side_diameter[small] = d_small;
    f.side_diameter[1 - small] = d_large;
    findings_.push_back(std::move(f));
  }

  // Double sweep in the whole map restricted to endpoints in the side; stops once threshold is reached.
  template <typename InSide>
  int diameter_lower_bound(std::uint32_t start, InSide&& in_side, std::size_t side_size) {
    auto sweep = [&](std::uint32_t from, std::uint32_t& far) {
      touched_.clear();
      touched_.push_back(from);
      dist_[from] = 0;
      far = from;
      int best = 0;
      std::size_t found = 1;
      for (std::size_t i = 0; i < touched_.size() && best < threshold_ && found < side_size; ++i) {
        const std::uint32_t u = touched_[i];
        for (auto v : graph_.neighbors(u)) {
          if (dist_[v] >= 0) continue;
          dist_[v] = dist_[u] + 1;
          touched_.push_back(v);
          if (in_side(v)) {
            ++found;
            if (dist_[v] > best) {
              best = dist_[v];
              far = v;
            }
          }
        }
      }
      for (auto v : touched_) dist_[v] = -1;
      return best;
    };
    std::uint32_t far = start, far2 = start;
    const int first = sweep(start, far);
    if (first >= threshold_) return first;
    return std::max(first, sweep(far, far2));
  }

  const PlanarMap& map_;
  Graph graph_;
  double threshold_ = 0;
  int max_length_ = 4;
  std::size_t max_findings_ = SIZE_MAX;
  std::vector<std::uint64_t> mark_;
  std::uint64_t epoch_ = 0;
  std::vector<std::int32_t> dist_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::uint8_t> on_cycle_;
  std::vector<std::uint32_t> first_out_;
  std::vector<std::uint32_t> path_, verts_;
  std::vector<std::uint32_t> seeds_[2];
  std::vector<std::uint32_t> queue_[2];
  std::vector<BottleneckFinding> findings_;
};

inline std::vector<BottleneckFinding> bottleneck_scan(const PlanarMap& map, double delta, int max_length,
                                                      std::size_t max_findings = SIZE_MAX) {
  if (delta <= 0) throw std::invalid_argument("bottleneck_scan: delta must be positive");
  BottleneckScanner scanner(map, delta);
  return scanner.scan(max_length, max_findings);
}

}  // namespace crtmap
