#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "crtmap/circle_tree.hpp"
#include "crtmap/excursion.hpp"
#include "crtmap/lamination.hpp"

namespace crtmap {

/*
 * Box-counting estimate. Scales are dyadic, eps = 2^-level, listed from
 * coarse to fine. The slope is the least-squares fit of log(count) against
 * log(1/eps) over levels [window_lo, window_hi] (indices into `levels`).
 */
struct DimensionEstimate {
  std::vector<int> levels;
  std::vector<double> scales;
  std::vector<std::size_t> counts;
  double slope = 0;
  double std_error = 0;
  std::size_t window_lo = 0;
  std::size_t window_hi = 0;
};

namespace detail {

inline std::vector<int> sorted_levels(std::span<const int> levels) {
  if (levels.size() < 2) throw std::invalid_argument("box counting: need at least 2 scales");
  std::vector<int> out(levels.begin(), levels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.size() < 2 || out.front() < 0 || out.back() > 20) {
    throw std::invalid_argument("box counting: levels must be distinct and in [0, 20]");
  }
  return out;
}

// drop the two coarsest and two finest levels when at least five are available
inline void fit_slope(DimensionEstimate& est) {
  const std::size_t m = est.levels.size();
  est.window_lo = m >= 5 ? 2 : 0;
  est.window_hi = m >= 5 ? m - 3 : m - 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(est.window_hi - est.window_lo + 1);
  for (std::size_t i = est.window_lo; i <= est.window_hi; ++i) {
    const double x = est.levels[i] * std::numbers::ln2;
    const double y = std::log(static_cast<double>(std::max<std::size_t>(est.counts[i], 1)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double sxx_c = sxx - sx * sx / k;
  est.slope = (sxy - sx * sy / k) / sxx_c;
  const double intercept = (sy - est.slope * sx) / k;
  if (k > 2) {
    double sse = 0;
    for (std::size_t i = est.window_lo; i <= est.window_hi; ++i) {
      const double x = est.levels[i] * std::numbers::ln2;
      const double r = std::log(static_cast<double>(std::max<std::size_t>(est.counts[i], 1))) - intercept - est.slope * x;
      sse += r * r;
    }
    est.std_error = std::sqrt(sse / (k - 2) / sxx_c);
  }
}

// Occupied cells at every level, derived from the finest level by halving indices.
inline void count_from_finest(DimensionEstimate& est, const std::vector<std::uint64_t>& fine_cells, std::uint64_t fine_side) {
  const int finest = est.levels.back();
  for (std::size_t i = 0; i < est.levels.size(); ++i) {
    const int shift = finest - est.levels[i];
    std::vector<std::uint64_t> cells;
    cells.reserve(fine_cells.size());
    for (auto id : fine_cells) {
      const std::uint64_t cx = (id % fine_side) >> shift, cy = (id / fine_side) >> shift;
      cells.push_back(cy * fine_side + cx);
    }
    std::sort(cells.begin(), cells.end());
    est.counts.push_back(static_cast<std::size_t>(std::unique(cells.begin(), cells.end()) - cells.begin()));
  }
}

}  // namespace detail

/*
 * Boxes of side eps over [-1, 1]^2 (grid origin shifted by -offset) hit by the
 * segments. Segments are traversed cell by cell on the finest grid.
 */
inline DimensionEstimate box_count_segments(std::span<const Segment> segments, std::span<const int> levels,
                                            double offset_x = 0.0, double offset_y = 0.0) {
  if (segments.empty()) throw std::invalid_argument("box_count_segments: no segments");
  DimensionEstimate est;
  est.levels = detail::sorted_levels(levels);
  for (int l : est.levels) est.scales.push_back(std::ldexp(1.0, -l));
  const double eps = est.scales.back();
  const double ox = -1.0 - offset_x, oy = -1.0 - offset_y;
  const auto side = static_cast<std::int64_t>(std::ceil((2.0 + std::max(offset_x, offset_y)) / eps)) + 2;

  std::vector<std::uint8_t> hit(static_cast<std::size_t>(side * side), 0);
  std::vector<std::uint64_t> cells;
  auto mark = [&](std::int64_t cx, std::int64_t cy) {
    cx = std::clamp<std::int64_t>(cx, 0, side - 1);
    cy = std::clamp<std::int64_t>(cy, 0, side - 1);
    const auto id = static_cast<std::uint64_t>(cy * side + cx);
    if (!hit[id]) {
      hit[id] = 1;
      cells.push_back(id);
    }
  };
  for (const auto& s : segments) {
    const double u0 = (s.x0 - ox) / eps, v0 = (s.y0 - oy) / eps;
    const double u1 = (s.x1 - ox) / eps, v1 = (s.y1 - oy) / eps;
    auto cx = static_cast<std::int64_t>(std::floor(u0)), cy = static_cast<std::int64_t>(std::floor(v0));
    const auto ex = static_cast<std::int64_t>(std::floor(u1)), ey = static_cast<std::int64_t>(std::floor(v1));
    const double du = u1 - u0, dv = v1 - v0;
    const int step_x = du > 0 ? 1 : -1, step_y = dv > 0 ? 1 : -1;
    const double inf = std::numeric_limits<double>::infinity();
    const double t_dx = du != 0 ? std::fabs(1.0 / du) : inf;
    const double t_dy = dv != 0 ? std::fabs(1.0 / dv) : inf;
    double t_x = du != 0 ? (du > 0 ? (cx + 1 - u0) : (u0 - cx)) * t_dx : inf;
    double t_y = dv != 0 ? (dv > 0 ? (cy + 1 - v0) : (v0 - cy)) * t_dy : inf;
    mark(cx, cy);
    const std::int64_t max_steps = std::abs(ex - cx) + std::abs(ey - cy);
    for (std::int64_t k = 0; k < max_steps; ++k) {
      if (t_x < t_y) {
        cx += step_x;
        t_x += t_dx;
      } else {
        cy += step_y;
        t_y += t_dy;
      }
      mark(cx, cy);
    }
  }
  detail::count_from_finest(est, cells, static_cast<std::uint64_t>(side));
  detail::fit_slope(est);
  return est;
}

// Boxes of length eps on the circle [0, 1) hit by the given positions.
inline DimensionEstimate box_count_points(std::span<const double> positions, std::span<const int> levels,
                                          double offset = 0.0) {
  if (positions.empty()) throw std::invalid_argument("box_count_points: no points");
  DimensionEstimate est;
  est.levels = detail::sorted_levels(levels);
  for (int l : est.levels) est.scales.push_back(std::ldexp(1.0, -l));
  const std::uint64_t side = (std::uint64_t{1} << est.levels.back()) + 1;
  std::vector<std::uint64_t> cells;
  cells.reserve(positions.size());
  for (double x : positions) {
    const double wrapped = x - std::floor(x);
    cells.push_back(static_cast<std::uint64_t>(std::floor((wrapped + offset) * static_cast<double>(side - 1))));
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  detail::count_from_finest(est, cells, side);
  detail::fit_slope(est);
  return est;
}

// Circle positions t / 2n of times lying in a class with at least two visits.
inline std::vector<double> endpoint_set(const CircleTree& tree) {
  const std::size_t period = tree.period();
  std::vector<std::uint32_t> times;
  for (const auto& v : tree.visits) {
    if (v.size() < 2) continue;
    for (auto t : v) times.push_back(static_cast<std::uint32_t>(t % period));
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<double> out;
  out.reserve(times.size());
  for (auto t : times) out.push_back(static_cast<double>(t) / static_cast<double>(period));
  return out;
}

/*
 * Running-minimum times after a: {t in (a, 2n] : e_t = min over [a, t]}.
 * A subset of the endpoint set whose Minkowski dimension is 1/2 for the
 * Brownian excursion (the full endpoint set is dense).
 */
inline std::vector<double> running_minimum_set(const DiscreteExcursion& e, std::size_t a) {
  const std::size_t period = e.period();
  if (a >= period) throw std::out_of_range("running_minimum_set: a out of range");
  std::vector<double> out;
  int running = e.heights[a];
  for (std::size_t t = a + 1; t <= period; ++t) {
    running = std::min(running, e.heights[t]);
    if (e.heights[t] == running) out.push_back(static_cast<double>(t % period) / static_cast<double>(period));
  }
  return out;
}

/*
 * Endpoint-side estimate used against the lamination: mean slope of the
 * running-minimum sets started at the contour midpoint, forward and on the
 * time-reversed contour.
 */
inline DimensionEstimate endpoint_dimension(const DiscreteExcursion& e, std::span<const int> levels) {
  const std::size_t mid = e.period() / 2;
  auto forward = box_count_points(running_minimum_set(e, mid), levels);
  const auto backward = box_count_points(running_minimum_set(time_reversed(e), mid), levels);
  forward.slope = 0.5 * (forward.slope + backward.slope);
  forward.std_error = 0.5 * std::hypot(forward.std_error, backward.std_error);
  return forward;
}

// dim(L) >= 1 + dim(A), up to tol
inline bool dim_lower_bound_check(const DimensionEstimate& lamination, const DimensionEstimate& endpoints,
                                  double tol) {
  return lamination.slope >= 1.0 + endpoints.slope - tol;
}

}  // namespace crtmap
