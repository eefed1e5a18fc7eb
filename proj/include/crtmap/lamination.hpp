#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crtmap/circle_tree.hpp"
#include "crtmap/excursion.hpp"

namespace crtmap {

enum class DiskModel { klein, poincare };
enum class ChordRule { consecutive, all_pairs };

// Chord between circle points a < b, measured in units of 2*pi/period.
struct Chord {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t cls = 0;

  friend bool operator==(const Chord&, const Chord&) = default;
};

struct Lamination {
  std::vector<Chord> chords;
  std::size_t period = 0;
  DiskModel model = DiskModel::klein;
  std::string relation = "tree";

  double angle(std::uint32_t t) const {
    return 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(period);
  }
};

/*
 * Chords from equivalence classes given as lists of times (time == period is
 * the same point as 0). With the consecutive rule a class with circle points
 * t_1 < ... < t_m contributes (t_1,t_2), ..., (t_{m-1},t_m), (t_m,t_1);
 * a class with two points contributes a single chord.
 */
inline Lamination lamination_from_classes(const std::vector<std::vector<std::uint32_t>>& classes,
                                          std::size_t period, std::string relation,
                                          ChordRule rule = ChordRule::consecutive) {
  Lamination lam;
  lam.period = period;
  lam.relation = std::move(relation);
  std::vector<std::uint32_t> pts;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    pts.clear();
    for (auto t : classes[c]) pts.push_back(static_cast<std::uint32_t>(t % period));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t m = pts.size();
    if (m < 2) continue;
    const auto cls = static_cast<std::uint32_t>(c);
    if (rule == ChordRule::all_pairs) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) lam.chords.push_back({pts[i], pts[j], cls});
      }
    } else if (m == 2) {
      lam.chords.push_back({pts[0], pts[1], cls});
    } else {
      for (std::size_t i = 0; i + 1 < m; ++i) lam.chords.push_back({pts[i], pts[i + 1], cls});
      lam.chords.push_back({pts[0], pts[m - 1], cls});
    }
  }
  std::sort(lam.chords.begin(), lam.chords.end(),
            [](const Chord& x, const Chord& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
  return lam;
}

inline Lamination build_lamination(const CircleTree& tree, ChordRule rule = ChordRule::consecutive) {
  return lamination_from_classes(tree.visits, tree.period(), "tree", rule);
}

/*
 * Stack sweep over chords sorted by (a asc, b desc). Open chords on the stack
 * are nested; a new chord must close before the innermost open one.
 * Shared endpoints are allowed.
 */
inline std::optional<std::pair<Chord, Chord>> check_noncrossing(const Lamination& lam) {
  std::vector<Chord> sorted = lam.chords;
  std::sort(sorted.begin(), sorted.end(), [](const Chord& x, const Chord& y) {
    return x.a != y.a ? x.a < y.a : x.b > y.b;
  });
  std::vector<Chord> open;
  for (const Chord& c : sorted) {
    while (!open.empty() && open.back().b <= c.a) open.pop_back();
    if (!open.empty() && c.b > open.back().b) return std::pair(open.back(), c);
    open.push_back(c);
  }
  return std::nullopt;
}

namespace detail {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // sum over [0, i)
  std::int64_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }
  std::int64_t range(std::size_t lo, std::size_t hi) const {  // open interval (lo, hi)
    return hi <= lo + 1 ? 0 : prefix(hi) - prefix(lo + 1);
  }

 private:
  std::vector<std::int64_t> tree_;
};

}  // namespace detail

/*
 * For each query chord (x, y), x < y, the number of lamination chords it
 * crosses in the open disk. Offline sweep with a Fenwick tree, O((K + Q) log P).
 */
inline std::vector<std::int64_t> crossing_counts(const Lamination& lam,
                                                 const std::vector<std::pair<std::uint32_t, std::uint32_t>>& queries) {
  std::vector<std::int64_t> count(queries.size(), 0);
  std::vector<std::size_t> order(queries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  // c < x < d < y
  {
    std::vector<Chord> by_a = lam.chords;
    std::sort(by_a.begin(), by_a.end(), [](const Chord& p, const Chord& q) { return p.a < q.a; });
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return queries[i].first < queries[j].first; });
    detail::Fenwick fw(lam.period + 1);
    std::size_t next = 0;
    for (std::size_t qi : order) {
      const auto [x, y] = queries[qi];
      while (next < by_a.size() && by_a[next].a < x) fw.add(by_a[next++].b);
      count[qi] += fw.range(x, y);
    }
  }
  // x < c < y < d
  {
    std::vector<Chord> by_b = lam.chords;
    std::sort(by_b.begin(), by_b.end(), [](const Chord& p, const Chord& q) { return p.b > q.b; });
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return queries[i].second > queries[j].second; });
    detail::Fenwick fw(lam.period + 1);
    std::size_t next = 0;
    for (std::size_t qi : order) {
      const auto [x, y] = queries[qi];
      while (next < by_b.size() && by_b[next].b > y) fw.add(by_b[next++].a);
      count[qi] += fw.range(x, y);
    }
  }
  return count;
}

struct MaximalityReport {
  std::size_t trials = 0;
  std::size_t skipped = 0;     // degenerate pairs a == b
  std::size_t candidates = 0;  // chords crossing no leaf
  std::size_t violations = 0;  // candidates with d_g(a,b) > tol
  double fraction = 0;         // violations / candidates
};

/*
 * A chord crossing no leaf of a maximal lamination must join equivalent
 * points. Samples random pairs of circle points, keeps those whose straight
 * chord crosses nothing and counts those with d_g(a,b) > tol.
 */
inline MaximalityReport maximality_probe(const Lamination& lam, const ContourIndex& g, std::size_t trials, int tol,
                                         std::uint64_t seed) {
  MaximalityReport report;
  report.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(lam.period - 1));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> queries;
  queries.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    std::uint32_t a = pick(rng), b = pick(rng);
    if (a == b) {
      ++report.skipped;
      continue;
    }
    if (a > b) std::swap(a, b);
    queries.emplace_back(a, b);
  }
  const auto crossings = crossing_counts(lam, queries);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (crossings[i] != 0) continue;
    ++report.candidates;
    if (g.pseudo_distance(queries[i].first, queries[i].second) > tol) ++report.violations;
  }
  report.fraction = report.candidates == 0
                        ? 0.0
                        : static_cast<double>(report.violations) / static_cast<double>(report.candidates);
  return report;
}

/*
 * Number of faces inside the disk of the planar graph formed by the chords and
 * the circle arcs between consecutive endpoints, counted by tracing face
 * orbits of its rotation system.
 */
inline std::size_t face_census(const Lamination& lam) {
  if (lam.chords.empty()) return 1;
  std::vector<std::uint32_t> pts;
  for (const auto& c : lam.chords) {
    pts.push_back(c.a);
    pts.push_back(c.b);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t p = pts.size();
  auto index_of = [&](std::uint32_t t) {
    return static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), t) - pts.begin());
  };

  // half-edge 2e leaves the first endpoint of edge e, 2e+1 leaves the second
  struct Incident {
    std::int64_t key;
    std::uint32_t half_edge;
  };
  std::vector<std::vector<Incident>> around(p);
  std::uint32_t edge = 0;
  const auto period = static_cast<std::int64_t>(lam.period);
  const std::int64_t before_all = -1, after_all = 2 * period;
  for (std::size_t i = 0; i < p; ++i, ++edge) {  // arc from pts[i] to the next point
    const std::size_t j = (i + 1) % p;
    around[i].push_back({before_all, 2 * edge});
    around[j].push_back({after_all, 2 * edge + 1});
  }
  for (const auto& c : lam.chords) {
    const std::size_t i = index_of(c.a), j = index_of(c.b);
    around[i].push_back({(static_cast<std::int64_t>(c.b) - c.a + period) % period, 2 * edge});
    around[j].push_back({(static_cast<std::int64_t>(c.a) - c.b + period) % period, 2 * edge + 1});
    ++edge;
  }
  const std::size_t halves = 2 * static_cast<std::size_t>(edge);
  std::vector<std::uint32_t> sigma(halves);
  for (auto& list : around) {
    std::stable_sort(list.begin(), list.end(), [](const Incident& x, const Incident& y) { return x.key < y.key; });
    for (std::size_t k = 0; k < list.size(); ++k) sigma[list[k].half_edge] = list[(k + 1) % list.size()].half_edge;
  }
  std::vector<bool> seen(halves, false);
  std::size_t faces = 0;
  for (std::uint32_t h = 0; h < halves; ++h) {
    if (seen[h]) continue;
    ++faces;
    for (std::uint32_t x = h; !seen[x]; x = sigma[x ^ 1u]) seen[x] = true;
  }
  return faces - 1;  // outer face
}

struct Segment {
  double x0, y0, x1, y1;
};

// Chords as straight (Klein model) segments in the unit disk.
inline std::vector<Segment> klein_segments(const Lamination& lam) {
  std::vector<Segment> segs;
  segs.reserve(lam.chords.size());
  for (const auto& c : lam.chords) {
    const double ta = lam.angle(c.a), tb = lam.angle(c.b);
    segs.push_back({std::cos(ta), std::sin(ta), std::cos(tb), std::sin(tb)});
  }
  return segs;
}

inline std::string svg_string(const Lamination& lam, DiskModel model, int width_px,
                              const std::string& header_comment = {}) {
  const double w = width_px;
  const double cx = w / 2, cy = w / 2, radius = 0.45 * w;
  std::string out;
  char buf[256];
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!header_comment.empty()) out += "<!-- " + header_comment + " -->\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                width_px, width_px, width_px, width_px);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<circle cx=\"%.6f\" cy=\"%.6f\" r=\"%.6f\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n", cx,
                cy, radius);
  out += buf;
  out += "<g fill=\"none\" stroke=\"#1f4e9a\" stroke-width=\"0.5\">\n";
  for (const auto& c : lam.chords) {
    const double ta = lam.angle(c.a), tb = lam.angle(c.b);
    const double x1 = cx + radius * std::cos(ta), y1 = cy - radius * std::sin(ta);
    const double x2 = cx + radius * std::cos(tb), y2 = cy - radius * std::sin(tb);
    double sep = std::fabs(tb - ta);
    if (sep > std::numbers::pi) sep = 2 * std::numbers::pi - sep;
    if (model == DiskModel::klein || std::fabs(sep - std::numbers::pi) < 1e-9) {
      std::snprintf(buf, sizeof buf, "<path d=\"M %.6f %.6f L %.6f %.6f\"/>\n", x1, y1, x2, y2);
    } else {
      // boundary-orthogonal circle; its minor arc between the endpoints lies inside the disk
      const double r = radius * std::tan(sep / 2);
      const double mid = std::atan2(std::sin(ta) + std::sin(tb), std::cos(ta) + std::cos(tb));
      const double dist = radius / std::cos(sep / 2);
      const double ox = cx + dist * std::cos(mid), oy = cy - dist * std::sin(mid);
      const double cross = (x1 - ox) * (y2 - oy) - (y1 - oy) * (x2 - ox);
      std::snprintf(buf, sizeof buf, "<path d=\"M %.6f %.6f A %.6f %.6f 0 0 %d %.6f %.6f\"/>\n", x1, y1, r, r,
                    cross > 0 ? 1 : 0, x2, y2);
    }
    out += buf;
  }
  out += "</g>\n</svg>\n";
  return out;
}

inline void render_svg(const Lamination& lam, DiskModel model, const std::string& path, int width_px,
                       const std::string& header_comment = {}) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("render_svg: cannot open " + path);
  file << svg_string(lam, model, width_px, header_comment);
  if (!file) throw std::runtime_error("render_svg: write failed for " + path);
}

inline void write_chords_csv(const Lamination& lam, std::ostream& out) {
  char buf[96];
  out << "a_deg,b_deg,class_id\n";
  for (const auto& c : lam.chords) {
    std::snprintf(buf, sizeof buf, "%.9f,%.9f,%u\n", lam.angle(c.a) * 180.0 / std::numbers::pi,
                  lam.angle(c.b) * 180.0 / std::numbers::pi, c.cls);
    out << buf;
  }
}

}  // namespace crtmap
