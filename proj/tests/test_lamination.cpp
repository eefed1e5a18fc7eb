#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include "crtmap/circle_tree.hpp"
#include "crtmap/lamination.hpp"

using namespace crtmap;

namespace {

const std::vector<int> kTwoLeaves = {0, 1, 2, 1, 2, 1, 0};

Lamination degrees(std::vector<std::pair<std::uint32_t, std::uint32_t>> chords) {
  Lamination lam;
  lam.period = 360;
  for (auto [a, b] : chords) lam.chords.push_back({a, b, 0});
  return lam;
}

// endpoint coordinates of every path in an SVG string
std::vector<std::pair<double, double>> path_points(const std::string& svg) {
  std::vector<std::pair<double, double>> pts;
  const std::regex move(R"(M ([-0-9.]+) ([-0-9.]+) (?:L|A [-0-9.]+ [-0-9.]+ 0 0 [01]) ([-0-9.]+) ([-0-9.]+))");
  for (std::sregex_iterator it(svg.begin(), svg.end(), move), end; it != end; ++it) {
    pts.emplace_back(std::stod((*it)[1]), std::stod((*it)[2]));
    pts.emplace_back(std::stod((*it)[3]), std::stod((*it)[4]));
  }
  return pts;
}

}  // namespace

TEST(Build, RootClassIsOnePoint) {
  // visits 0 and 2n are the same circle point
  const auto lam = build_lamination(build_circle_tree(DiscreteExcursion::from_heights({0, 1, 0})));
  EXPECT_TRUE(lam.chords.empty());
}

TEST(Build, TwoPointClassGivesOneChord) {
  const auto lam = build_lamination(build_circle_tree(DiscreteExcursion::from_heights({0, 1, 2, 1, 0})));
  ASSERT_EQ(lam.chords.size(), 1u);
  EXPECT_EQ(lam.chords[0].a, 1u);
  EXPECT_EQ(lam.chords[0].b, 3u);
}

TEST(Build, InscribedTriangle) {
  const auto tree = build_circle_tree(DiscreteExcursion::from_heights(kTwoLeaves));
  const auto lam = build_lamination(tree);
  ASSERT_EQ(lam.chords.size(), 3u);
  std::set<std::pair<std::uint32_t, std::uint32_t>> ends;
  for (const auto& c : lam.chords) {
    ends.emplace(c.a, c.b);
    EXPECT_EQ(c.cls, tree.class_id[1]);
  }
  EXPECT_EQ(ends, (std::set<std::pair<std::uint32_t, std::uint32_t>>{{1, 3}, {3, 5}, {1, 5}}));
}

TEST(Build, ChordCountAndEndpoints) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto e = sample_dyck_excursion(1000, s);
    const auto tree = build_circle_tree(e);
    const auto lam = build_lamination(tree);
    std::size_t expected = 0;
    for (const auto& v : tree.visits) {
      std::set<std::size_t> pts;
      for (auto t : v) pts.insert(t % e.period());
      if (pts.size() == 2) expected += 1;
      if (pts.size() >= 3) expected += pts.size();
    }
    EXPECT_EQ(lam.chords.size(), expected);
    for (const auto& c : lam.chords) {
      ASSERT_NE(c.a, c.b);
      ASSERT_EQ(tree.class_id[c.a], c.cls);
      ASSERT_EQ(tree.class_id[c.b], c.cls);
    }
  }
}

TEST(NonCrossing, Nested) { EXPECT_FALSE(check_noncrossing(degrees({{0, 90}, {10, 80}})).has_value()); }

TEST(NonCrossing, SharedEndpoint) { EXPECT_FALSE(check_noncrossing(degrees({{0, 90}, {90, 180}, {0, 180}})).has_value()); }

TEST(NonCrossing, PlantedCrossing) {
  const auto w = check_noncrossing(degrees({{0, 90}, {45, 180}}));
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->first, (Chord{0, 90, 0}));
  EXPECT_EQ(w->second, (Chord{45, 180, 0}));
}

TEST(NonCrossing, GeneratedLaminations) {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto lam = build_lamination(build_circle_tree(sample_dyck_excursion(s % 10 == 0 ? 1000 : 200, s)));
    ASSERT_FALSE(check_noncrossing(lam).has_value()) << "seed " << s;
  }
}

TEST(NonCrossing, AllPairsCrossOnLargeClasses) {
  // a vertex with three children has four circle points; both diagonals are drawn
  const auto tree = build_circle_tree(DiscreteExcursion::from_heights({0, 1, 2, 1, 2, 1, 2, 1, 0}));
  EXPECT_FALSE(check_noncrossing(build_lamination(tree)).has_value());
  EXPECT_TRUE(check_noncrossing(build_lamination(tree, ChordRule::all_pairs)).has_value());
}

TEST(Crossings, MatchBruteForce) {
  const auto lam = build_lamination(build_circle_tree(sample_dyck_excursion(300, 4)));
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(lam.period - 1));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> queries;
  while (queries.size() < 500) {
    auto a = pick(rng), b = pick(rng);
    if (a == b) continue;
    queries.emplace_back(std::min(a, b), std::max(a, b));
  }
  const auto counts = crossing_counts(lam, queries);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto [x, y] = queries[i];
    std::int64_t brute = 0;
    for (const auto& c : lam.chords) {
      if ((c.a < x && x < c.b && c.b < y) || (x < c.a && c.a < y && y < c.b)) ++brute;
    }
    ASSERT_EQ(counts[i], brute);
  }
}

TEST(Maximality, SameClassNeverViolates) {
  const auto e = sample_dyck_excursion(500, 6);
  const auto tree = build_circle_tree(e);
  const auto lam = build_lamination(tree);
  const auto g = make_index(e);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> queries;
  for (const auto& c : lam.chords) queries.emplace_back(c.a, c.b);
  const auto counts = crossing_counts(lam, queries);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    EXPECT_EQ(counts[i], 0);
    EXPECT_EQ(g.pseudo_distance(queries[i].first, queries[i].second), 0);
  }
}

TEST(Maximality, DegeneratePairsSkipped) {
  const auto e = DiscreteExcursion::from_heights({0, 1, 0});
  const auto lam = build_lamination(build_circle_tree(e));
  const auto r = maximality_probe(lam, make_index(e), 1000, 2, 3);
  EXPECT_GT(r.skipped, 0u);
  EXPECT_EQ(r.skipped + r.candidates, 1000u);
}

TEST(Maximality, ViolationFractionByScale) {
  double prev = 1.0;
  for (std::size_t n : {1u << 10, 1u << 12, 1u << 14}) {
    double sum = 0;
    std::size_t candidates = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto e = sample_dyck_excursion(n, s);
      const auto r = maximality_probe(build_lamination(build_circle_tree(e)), make_index(e), 10000, 2, s);
      sum += r.fraction;
      candidates += r.candidates;
    }
    std::printf("n=%zu  candidates %zu  violation fraction %.6f\n", n, candidates, sum / 10);
    EXPECT_GT(candidates, 0u);
    EXPECT_LE(sum / 10, prev);
    prev = sum / 10;
  }
}

TEST(FaceCensus, MatchesChordCount) {
  EXPECT_EQ(face_census(degrees({})), 1u);
  EXPECT_EQ(face_census(degrees({{0, 90}})), 2u);
  EXPECT_EQ(face_census(degrees({{0, 120}, {120, 240}, {0, 240}})), 4u);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto lam = build_lamination(build_circle_tree(sample_dyck_excursion(2000, s)));
    ASSERT_EQ(face_census(lam), lam.chords.size() + 1);
  }
}

TEST(Render, TriangleEndpointsAtContourTimes) {
  const auto lam = build_lamination(build_circle_tree(DiscreteExcursion::from_heights(kTwoLeaves)));
  for (auto model : {DiskModel::klein, DiskModel::poincare}) {
    const int width = 600;
    const auto svg = svg_string(lam, model, width);
    const auto pts = path_points(svg);
    ASSERT_EQ(pts.size(), 6u);
    for (const auto& [x, y] : pts) {
      const double angle = std::atan2(-(y - width / 2.0), x - width / 2.0);
      const double t = std::fmod(angle / (2 * std::numbers::pi) * 6 + 6, 6.0);
      EXPECT_NEAR(t, std::round(t), 1e-5);
      EXPECT_EQ(static_cast<int>(std::round(t)) % 2, 1);  // times 1, 3, 5
      EXPECT_NEAR(std::hypot(x - width / 2.0, y - width / 2.0), 0.45 * width, 1e-4);
    }
  }
}

TEST(Render, PoincareArcsAndDiameters) {
  const auto diameter = svg_string(degrees({{0, 180}}), DiskModel::poincare, 400);
  EXPECT_NE(diameter.find(" L "), std::string::npos);
  EXPECT_EQ(diameter.find(" A "), std::string::npos);
  const auto arc = svg_string(degrees({{0, 90}}), DiskModel::poincare, 400);
  const std::regex radius(R"(A ([0-9.]+) )");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(arc, m, radius));
  EXPECT_NEAR(std::stod(m[1]), 0.45 * 400 * std::tan(std::numbers::pi / 4), 1e-4);
}

TEST(Render, EmptyLaminationOnlyCircle) {
  const auto svg = svg_string(degrees({}), DiskModel::klein, 200);
  EXPECT_NE(svg.find("<circle"), std::string::npos);
  EXPECT_EQ(svg.find("<path"), std::string::npos);
}

TEST(Render, Deterministic) {
  const auto lam = build_lamination(build_circle_tree(sample_dyck_excursion(500, 2)));
  EXPECT_EQ(svg_string(lam, DiskModel::poincare, 800, "x"), svg_string(lam, DiskModel::poincare, 800, "x"));
}

TEST(Render, BadPathNamed) {
  try {
    render_svg(degrees({}), DiskModel::klein, "/nonexistent-dir/out.svg", 100);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.svg"), std::string::npos);
  }
}

TEST(Csv, ChordColumns) {
  std::ostringstream out;
  write_chords_csv(degrees({{0, 90}}), out);
  EXPECT_EQ(out.str(), "a_deg,b_deg,class_id\n0.000000000,90.000000000,0\n");
}
