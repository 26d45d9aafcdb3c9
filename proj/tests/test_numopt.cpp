#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "sfrl/error.hpp"
#include "sfrl/numopt.hpp"
#include "test_support.hpp"

using namespace sfrl;
using sfrl::testing::random_pmf;
using sfrl::testing::ref_h2;
using sfrl::testing::ref_mutual_information;

namespace {

void expect_mixture_valid(const MixtureSolution& s, const std::vector<std::vector<double>>& points,
                          const std::vector<double>& target, std::size_t max_support, double tol) {
  ASSERT_EQ(s.weights.size(), s.support.size());
  EXPECT_LE(s.support.size(), max_support);
  double total = 0.0;
  std::vector<double> mixed(target.size(), 0.0);
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    EXPECT_GE(s.weights[i], 0.0);
    total += s.weights[i];
    for (std::size_t c = 0; c < target.size(); ++c) mixed[c] += s.weights[i] * points[s.support[i]][c];
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
  for (std::size_t c = 0; c < target.size(); ++c) {
    EXPECT_LE(mixed[c], target[c] + tol) << "coordinate " << c;
    EXPECT_NEAR(mixed[c], s.achieved[c], 1e-9);
  }
}

}  // namespace

TEST(Capacity, NoiselessBinaryIsOneBit) {
  const auto s = blahut_arimoto_capacity(Kernel::identity(2));
  EXPECT_NEAR(s.capacity, 1.0, 1e-9);
  EXPECT_NEAR(s.input[0], 0.5, 1e-6);
}

TEST(Capacity, IdenticalRowsIsZero) {
  EXPECT_NEAR(blahut_arimoto_capacity(Kernel::from_rows({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}})).capacity, 0.0,
              1e-9);
}

TEST(Capacity, BinarySymmetricMatchesClosedForm) {
  for (double p : {0.01, 0.11, 0.25, 0.4}) {
    const auto s = blahut_arimoto_capacity(Kernel::binary_symmetric(p));
    EXPECT_NEAR(s.capacity, 1.0 - ref_h2(p), 1e-8) << p;
    EXPECT_LE(s.gap, 1e-9);
  }
  EXPECT_NEAR(blahut_arimoto_capacity(Kernel::binary_symmetric(0.11)).capacity, 0.5, 1e-4);
}

TEST(Capacity, ZChannelMatchesClosedForm) {
  for (double p : {0.1, 0.3, 0.5}) {
    const double expected = std::log2(1.0 + (1.0 - p) * std::pow(p, p / (1.0 - p)));
    const auto s = blahut_arimoto_capacity(Kernel::from_rows({{1.0, 0.0}, {p, 1.0 - p}}));
    EXPECT_NEAR(s.capacity, expected, 1e-8) << p;
  }
}

TEST(Capacity, AchievingInputAttainsCapacity) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const auto rows = sfrl::testing::random_kernel(rng, 3, 4);
    const auto s = blahut_arimoto_capacity(Kernel::from_rows(rows));
    std::vector<std::vector<double>> m(3, std::vector<double>(4));
    for (int x = 0; x < 3; ++x) {
      for (int y = 0; y < 4; ++y) m[x][y] = s.input[x] * rows[x][y];
    }
    EXPECT_NEAR(ref_mutual_information(m), s.capacity, 1e-8);
  }
}

TEST(Capacity, NonIncreasingInNoise) {
  double prev = std::numeric_limits<double>::infinity();
  for (double p = 0.0; p <= 0.5 + 1e-12; p += 0.05) {
    const double c = blahut_arimoto_capacity(Kernel::binary_symmetric(p)).capacity;
    EXPECT_LE(c, prev + 1e-9);
    prev = c;
  }
}

TEST(Capacity, IterationLimitThrowsWithLastIterate) {
  try {
    blahut_arimoto_capacity(Kernel::from_rows({{0.9, 0.1, 0.0}, {0.0, 0.8, 0.2}, {0.3, 0.0, 0.7}}), 1e-15, 2);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_value(), 0.0);
    EXPECT_GT(e.last_gap(), 0.0);
  }
}

TEST(RateDistortion, LosslessPoint) {
  const auto s = blahut_arimoto_rate_distortion(Distribution::uniform(2), DistortionMatrix::hamming(2), 0.0);
  EXPECT_NEAR(s.rate, 1.0, 1e-9);
  EXPECT_NEAR(s.kernel.row(0)[0], 1.0, 1e-9);
  EXPECT_NEAR(s.kernel.row(1)[1], 1.0, 1e-9);
}

TEST(RateDistortion, SymmetricSourceMatchesClosedForm) {
  const auto s = blahut_arimoto_rate_distortion(Distribution::uniform(2), DistortionMatrix::hamming(2), 0.11);
  EXPECT_NEAR(s.rate, 1.0 - ref_h2(0.11), 1e-6);
  EXPECT_NEAR(s.rate, 0.5, 1e-3);
  EXPECT_LE(s.distortion, 0.11 + 1e-9);
}

TEST(RateDistortion, BiasedSourceMatchesClosedForm) {
  for (double d : {0.02, 0.05, 0.11, 0.15}) {
    const auto s = blahut_arimoto_rate_distortion(Distribution({0.8, 0.2}), DistortionMatrix::hamming(2), d);
    EXPECT_NEAR(s.rate, ref_h2(0.2) - ref_h2(d), 1e-6) << d;
  }
}

TEST(RateDistortion, ZeroRatePastMaxDistortion) {
  for (double d : {0.5, 0.7}) {
    const auto s = blahut_arimoto_rate_distortion(Distribution::uniform(2), DistortionMatrix::hamming(2), d);
    EXPECT_NEAR(s.rate, 0.0, 1e-9);
  }
}

TEST(RateDistortion, BelowMinimumIsInfeasible) {
  const auto d = DistortionMatrix::from_rows({{0.1, 1.0}, {1.0, 0.1}});
  EXPECT_NEAR(min_distortion(Distribution::uniform(2), d), 0.1, 1e-15);
  EXPECT_THROW(blahut_arimoto_rate_distortion(Distribution::uniform(2), d, 0.05), InfeasibleError);
}

TEST(RateDistortion, InfiniteEntriesAreExcluded) {
  const double inf = std::numeric_limits<double>::infinity();
  const auto d = DistortionMatrix::from_rows({{0.0, 1.0, inf}, {inf, 1.0, 0.0}});
  const auto s = blahut_arimoto_rate_distortion(Distribution::uniform(2), d, 0.3);
  EXPECT_EQ(s.kernel.row(0)[2], 0.0);
  EXPECT_EQ(s.kernel.row(1)[0], 0.0);
  EXPECT_LE(s.distortion, 0.3 + 1e-9);
}

TEST(RateDistortion, NonIncreasingInDistortion) {
  const Distribution src({0.5, 0.3, 0.2});
  double prev = std::numeric_limits<double>::infinity();
  for (double d = 0.0; d <= 0.5; d += 0.05) {
    const double r = blahut_arimoto_rate_distortion(src, DistortionMatrix::hamming(3), d).rate;
    EXPECT_LE(r, prev + 1e-9);
    prev = r;
  }
}

TEST(RateDistortion, MatchesGridSearchOnTwoByTwo) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 6; ++t) {
    const double px0 = 0.2 + 0.6 * u(rng);
    const std::vector<std::vector<double>> dist = {{0.0, 0.5 + u(rng)}, {0.5 + u(rng), 0.0}};
    const double dmax = std::min(px0 * dist[0][1], (1.0 - px0) * dist[1][0]);
    const double target = dmax * (0.2 + 0.6 * u(rng));

    double best = std::numeric_limits<double>::infinity();
    const int grid = 400;
    for (int i = 0; i <= grid; ++i) {
      for (int j = 0; j <= grid; ++j) {
        const double a = static_cast<double>(i) / grid, b = static_cast<double>(j) / grid;
        // a = P(Y=1|X=0), b = P(Y=0|X=1)
        const double ed = px0 * a * dist[0][1] + (1.0 - px0) * b * dist[1][0];
        if (ed > target) continue;
        const std::vector<std::vector<double>> m = {{px0 * (1 - a), px0 * a}, {(1 - px0) * b, (1 - px0) * (1 - b)}};
        best = std::min(best, ref_mutual_information(m));
      }
    }
    const auto s = blahut_arimoto_rate_distortion(Distribution({px0, 1.0 - px0}), DistortionMatrix::from_rows(dist),
                                                  target);
    EXPECT_LE(s.rate, best + 1e-9);
    EXPECT_NEAR(s.rate, best, 5e-3);
  }
}

TEST(CaratheodoryMix, SymmetricMidpoint) {
  const std::vector<std::vector<double>> pts = {{1, 3}, {2, 2}};
  const auto s = caratheodory_mix(pts, {1.5, 2.5});
  expect_mixture_valid(s, pts, {1.5, 2.5}, 3, 1e-9);
  ASSERT_EQ(s.support.size(), 2u);
  EXPECT_NEAR(s.weights[0], 0.5, 1e-9);
  EXPECT_NEAR(s.weights[1], 0.5, 1e-9);
}

TEST(CaratheodoryMix, SinglePointDominates) {
  const std::vector<std::vector<double>> pts = {{5, 5}, {0, 1}, {3, 0}};
  const auto s = caratheodory_mix(pts, {0.5, 1.5});
  expect_mixture_valid(s, pts, {0.5, 1.5}, 3, 1e-9);
}

TEST(CaratheodoryMix, InfeasibleReportsCoordinate) {
  try {
    caratheodory_mix({{1, 0}, {2, 0}}, {0.5, 1.0});
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.coordinate(), 0);
  }
}

TEST(CaratheodoryMix, SevenDimensionalRandomPoints) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::vector<double>> pts(200, std::vector<double>(7));
    std::vector<double> mean(7, 0.0);
    for (auto& p : pts) {
      for (int c = 0; c < 7; ++c) mean[c] += (p[c] = g(rng)) / pts.size();
    }
    std::vector<double> target = mean;
    for (auto& v : target) v += 0.01;
    const auto s = caratheodory_mix(pts, target);
    expect_mixture_valid(s, pts, target, 8, 1e-9);
  }
}

TEST(MinimizingMix, SupportAtMostDimensionAndMinimizes) {
  std::mt19937_64 rng(78);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::vector<double>> pts(100, std::vector<double>(4));
    for (auto& p : pts) {
      for (auto& v : p) v = u(rng);
    }
    const std::vector<double> target = {0.5, 0.5, 0.5, 10.0};
    const auto s = minimizing_mix(pts, target, 3);
    expect_mixture_valid(s, pts, target, 4, 1e-9);
    // Any feasible single point is no better than the mixture.
    for (const auto& p : pts) {
      if (p[0] <= 0.5 && p[1] <= 0.5 && p[2] <= 0.5) EXPECT_LE(s.achieved[3], p[3] + 1e-9);
    }
  }
}

TEST(MinimizingMix, ObjectiveAboveTargetIsInfeasible) {
  EXPECT_THROW(minimizing_mix({{0, 5}, {1, 4}}, {1, 1}, 1), InfeasibleError);
}
