#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "crtmap/circle_tree.hpp"
#include "crtmap/snake.hpp"
#include "support/stats.hpp"

using namespace crtmap;

namespace {

const std::vector<int> kTwoLeaves = {0, 1, 2, 1, 2, 1, 0};

// time-reversal statistics: label range and the label at a quarter of the contour
std::pair<double, double> reversal_stats(std::size_t n, std::uint64_t seed, bool reversed) {
  auto e = sample_dyck_excursion(n, seed);
  const auto z = sample_labels(build_circle_tree(e), IncrementLaw::uniform3, seed + 7777);
  std::vector<int> values = z.values;
  if (reversed) std::reverse(values.begin(), values.end());
  const double scale = std::pow(2.0 * n, -0.25);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {(*hi - *lo) * scale, values[2 * n / 4] * scale};
}

}  // namespace

TEST(Labels, HandExample) {
  const auto tree = build_circle_tree(DiscreteExcursion::from_heights(kTwoLeaves));
  const std::vector<int> increments = {0, 1, 0, -1};
  const auto z = labels_from_increments(tree, increments);
  EXPECT_EQ(z.values, (std::vector<int>{0, 1, 1, 1, 0, 1, 0}));
}

TEST(Labels, ZeroIncrements) {
  const auto tree = build_circle_tree(sample_dyck_excursion(100, 1));
  const std::vector<int> zeros(tree.n_vertices(), 0);
  const auto z = labels_from_increments(tree, zeros);
  EXPECT_TRUE(std::all_of(z.values.begin(), z.values.end(), [](int v) { return v == 0; }));
}

TEST(Labels, ClassConstantAndAligned) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto e = sample_dyck_excursion(400, s);
    const auto tree = build_circle_tree(e);
    for (auto law : {IncrementLaw::uniform3, IncrementLaw::plus_minus_one}) {
      const auto z = sample_labels(tree, law, s);
      ASSERT_EQ(z.values.size(), e.period() + 1);
      EXPECT_EQ(z.values.front(), 0);
      EXPECT_EQ(z.values.back(), 0);
      const auto g = make_index(e);
      std::mt19937_64 rng(s);
      std::uniform_int_distribution<std::size_t> pick(0, e.period());
      for (int i = 0; i < 2000; ++i) {
        const auto a = pick(rng), b = pick(rng);
        if (g.pseudo_distance(a, b) == 0) ASSERT_EQ(z.values[a], z.values[b]);
      }
      for (std::size_t t = 0; t < e.period(); ++t) {
        const int step = std::abs(z.values[t + 1] - z.values[t]);
        ASSERT_LE(step, 1);
        if (law == IncrementLaw::plus_minus_one) ASSERT_EQ(step, 1);
      }
    }
  }
}

TEST(Labels, LawNames) {
  EXPECT_EQ(parse_law("u3"), IncrementLaw::uniform3);
  EXPECT_EQ(parse_law("pm1"), IncrementLaw::plus_minus_one);
  EXPECT_EQ(law_name(IncrementLaw::plus_minus_one), "pm1");
  EXPECT_THROW(parse_law("gauss"), std::invalid_argument);
  EXPECT_DOUBLE_EQ(increment_variance(IncrementLaw::uniform3), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(increment_variance(IncrementLaw::plus_minus_one), 1.0);
}

TEST(Covariance, ExactExpectationOnTwoLeaves) {
  // all 27 increment assignments of the three edges
  const auto tree = build_circle_tree(DiscreteExcursion::from_heights(kTwoLeaves));
  double sum = 0;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      for (int c = -1; c <= 1; ++c) {
        const std::vector<int> inc = {0, a, b, c};
        const auto z = labels_from_increments(tree, inc);
        sum += z.values[2] * z.values[4];
      }
    }
  }
  EXPECT_DOUBLE_EQ(sum / 27.0, 2.0 / 3.0);
  const auto est = covariance_estimate(tree, IncrementLaw::uniform3, 2, 4, 100000, 5);
  EXPECT_DOUBLE_EQ(est.target, 2.0 / 3.0);
  EXPECT_LT(std::abs(est.mean - est.target), 3 * est.std_error);
}

TEST(Covariance, DiagonalAndDisjoint) {
  const auto e = DiscreteExcursion::from_heights({0, 1, 2, 3, 2, 1, 0, 1, 2, 1, 0});
  const auto tree = build_circle_tree(e);
  const auto diag = covariance_estimate(tree, IncrementLaw::uniform3, 3, 3, 100000, 1);
  EXPECT_DOUBLE_EQ(diag.target, 2.0);
  EXPECT_LT(std::abs(diag.mean - diag.target), 3 * diag.std_error);
  const auto apart = covariance_estimate(tree, IncrementLaw::uniform3, 3, 8, 100000, 2);
  EXPECT_DOUBLE_EQ(apart.target, 0.0);
  EXPECT_LT(std::abs(apart.mean), 3 * apart.std_error);
}

TEST(Covariance, GridWithinFourErrors) {
  const auto e = sample_dyck_excursion(512, 2024);
  const auto tree = build_circle_tree(e);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> pick(0, e.period());
  while (pairs.size() < 20) pairs.emplace_back(pick(rng), pick(rng));
  const auto ests = covariance_estimates(tree, IncrementLaw::uniform3, pairs, 20000, 9);
  const auto g = make_index(e);
  for (const auto& est : ests) {
    const auto [lo, hi] = std::minmax(est.s, est.t);
    EXPECT_DOUBLE_EQ(est.target, 2.0 / 3.0 * g.linear_min(lo, hi));
    EXPECT_LT(std::abs(est.mean - est.target), 4 * est.std_error + 1e-12) << est.s << "," << est.t;
  }
}

TEST(Covariance, RejectsFewReplicates) {
  const auto tree = build_circle_tree(DiscreteExcursion::from_heights(kTwoLeaves));
  EXPECT_THROW(covariance_estimate(tree, IncrementLaw::uniform3, 1, 2, 999, 0), std::invalid_argument);
}

TEST(Reroot, ZeroLabels) {
  const auto e = sample_dyck_excursion(50, 3);
  const std::vector<int> zeros(e.period() + 1, 0);
  const auto r = reroot(e, zeros);
  EXPECT_EQ(r.s_star, 0u);
  EXPECT_EQ(r.e_bar.heights, e.heights);
  EXPECT_EQ(r.z_bar, zeros);
}

TEST(Reroot, HandExampleMinimumAtStart) {
  const auto e = DiscreteExcursion::from_heights(kTwoLeaves);
  const std::vector<int> z = {0, 1, 1, 1, 0, 1, 0};
  const auto r = reroot(e, z);
  EXPECT_EQ(r.s_star, 0u);
  EXPECT_EQ(r.z_bar, z);
  EXPECT_EQ(r.underline_z, 0);
}

TEST(Reroot, ShiftedRoot) {
  const auto e = DiscreteExcursion::from_heights(kTwoLeaves);
  const std::vector<int> z = {0, 1, 1, 1, -1, 1, 0};
  const auto r = reroot(e, z);
  EXPECT_EQ(r.s_star, 4u);
  EXPECT_EQ(r.underline_z, -1);
  EXPECT_EQ(r.e_bar.heights, (std::vector<int>{0, 1, 2, 1, 2, 1, 0}));
  EXPECT_EQ(r.z_bar, (std::vector<int>{0, 2, 1, 2, 2, 2, 0}));
}

TEST(Reroot, InvariantsOnSamples) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto e = sample_dyck_excursion(300, s);
    const auto z = sample_labels(build_circle_tree(e), IncrementLaw::uniform3, s);
    const auto r = reroot(e, z.values);
    EXPECT_EQ(r.z_bar.front(), 0);
    EXPECT_EQ(r.z_bar.back(), 0);
    EXPECT_EQ(*std::min_element(r.z_bar.begin(), r.z_bar.end()), 0);
    EXPECT_EQ(r.e_bar.heights.front(), 0);
    EXPECT_EQ(r.e_bar.n, e.n);
  }
}

TEST(Reroot, InvolutionWhenMinimumUnique) {
  int checked = 0;
  for (std::uint64_t s = 0; checked < 10 && s < 500; ++s) {
    const auto e = sample_dyck_excursion(200, s);
    const auto tree = build_circle_tree(e);
    const auto z = sample_labels(tree, IncrementLaw::uniform3, s);
    const int lowest = *std::min_element(z.values.begin(), z.values.end());
    std::set<std::uint32_t> argmin;
    for (std::size_t t = 0; t <= e.period(); ++t) {
      if (z.values[t] == lowest) argmin.insert(tree.class_id[t]);
    }
    if (argmin.size() != 1) continue;
    ++checked;
    const auto r = reroot(e, z.values);
    const auto again = reroot(r.e_bar, r.z_bar);
    EXPECT_EQ(again.s_star, 0u);
    EXPECT_EQ(again.e_bar.heights, r.e_bar.heights);
    EXPECT_EQ(again.z_bar, r.z_bar);
  }
  EXPECT_EQ(checked, 10);
}

TEST(Reroot, OplusWraps) {
  EXPECT_EQ(oplus(4, 2, 6), 6u);
  EXPECT_EQ(oplus(4, 3, 6), 1u);
  EXPECT_EQ(oplus(0, 6, 6), 6u);
}

TEST(HypothesisZ, ZeroIsDegenerate) {
  const std::vector<int> zeros(65, 0);
  EXPECT_TRUE(hypothesis_check_HZ(zeros, 1).degenerate);
}

TEST(HypothesisZ, PlantedTie) {
  const std::vector<int> z = {0, 1, -2, 1, 3, 1, -2, 1, 0};
  const auto r = hypothesis_check_HZ(z, 1);
  // minima at 0 (value 0) and at 2, 6 (value -2)
  ASSERT_EQ(r.minima.size(), 3u);
  EXPECT_EQ(r.minima[1].first, 2u);
  EXPECT_EQ(r.minima[2].first, 6u);
  EXPECT_EQ(r.min_gap, 0.0);
  EXPECT_EQ(r.ties, 1u);
}

TEST(HypothesisZ, SeparatedMinimaReported) {
  std::size_t prev = 0;
  for (std::size_t n : {1u << 12, 1u << 14, 1u << 16}) {
    std::size_t separated = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto e = sample_dyck_excursion(n, s);
      const auto z = sample_labels(build_circle_tree(e), IncrementLaw::uniform3, s + 1);
      if (hypothesis_check_HZ(z.values, e.period() / 256).min_gap > 0) ++separated;
    }
    std::printf("n=%zu  seeds with distinct window minima %zu/100\n", n, separated);
    EXPECT_GE(separated, prev);
    prev = separated;
  }
}

TEST(LabelClasses, SmallExample) {
  const std::vector<int> z = {0, 1, 0, 1, 0};
  const auto classes = label_classes(z);
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0], (std::vector<std::uint32_t>{0, 2}));
}

TEST(LabelClasses, MatchesPairwise) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto e = sample_dyck_excursion(1 + s % 30, s);
    const auto z = sample_labels(build_circle_tree(e), IncrementLaw::uniform3, s);
    const CircleFunction<int> zf(z.values);
    const std::size_t p = e.period();
    std::vector<std::int64_t> cls(p, -1);
    const auto classes = label_classes(z.values);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      for (auto t : classes[c]) cls[t] = static_cast<std::int64_t>(c);
    }
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        const bool same = a == b || (cls[a] >= 0 && cls[a] == cls[b]);
        ASSERT_EQ(same, zf.pseudo_distance(a, b) == 0) << "seed " << s << " " << a << "," << b;
      }
    }
  }
}

TEST(HypothesisPrime, SingleEdge) {
  const auto e = DiscreteExcursion::from_heights({0, 1, 0});
  const auto tree = build_circle_tree(e);
  for (auto z : {std::vector<int>{0, 1, 0}, std::vector<int>{0, -1, 0}, std::vector<int>{0, 0, 0}}) {
    EXPECT_EQ(hypothesis_check_Hprime(tree, z, 1).count, 0u);
  }
}

TEST(HypothesisPrime, ZeroLabelsFlagged) {
  const auto e = sample_dyck_excursion(64, 1);
  const auto tree = build_circle_tree(e);
  const std::vector<int> zeros(e.period() + 1, 0);
  const auto r = hypothesis_check_Hprime(tree, zeros, 8);
  EXPECT_TRUE(r.degenerate);
  EXPECT_THROW(hypothesis_check_Hprime(tree, zeros, 0), std::invalid_argument);
}

TEST(HypothesisPrime, FractionDecreases) {
  double prev = 1.0;
  for (std::size_t n : {1u << 10, 1u << 12, 1u << 14}) {
    double sum = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto e = sample_dyck_excursion(n, s);
      const auto tree = build_circle_tree(e);
      const auto z = sample_labels(tree, IncrementLaw::uniform3, s + 100);
      sum += hypothesis_check_Hprime(tree, z.values, n / 8).fraction;
    }
    std::printf("n=%zu  double-nontrivial fraction %.6f\n", n, sum / 50);
    EXPECT_LT(sum / 50, prev);
    prev = sum / 50;
  }
}

TEST(TimeReversal, KolmogorovSmirnov) {
  const std::size_t seeds = 1000, n = 256;
  std::vector<double> range_fwd, range_rev, quarter_fwd, quarter_rev;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const auto f = reversal_stats(n, s, false);
    const auto r = reversal_stats(n, s + seeds, true);
    range_fwd.push_back(f.first);
    quarter_fwd.push_back(f.second);
    range_rev.push_back(r.first);
    quarter_rev.push_back(r.second);
  }
  const double crit = stats::ks_critical_1pct(seeds, seeds);
  EXPECT_LT(stats::ks_statistic(range_fwd, range_rev), crit);
  EXPECT_LT(stats::ks_statistic(quarter_fwd, quarter_rev), crit);
}
