#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfrl/error.hpp"
#include "sfrl/probspace.hpp"
#include "test_support.hpp"

using namespace sfrl;
using sfrl::testing::random_pmf;
using sfrl::testing::ref_entropy;
using sfrl::testing::ref_h2;

TEST(Entropy, UniformFourSymbolsIsTwoBits) { EXPECT_DOUBLE_EQ(entropy(Distribution::uniform(4)), 2.0); }

TEST(Entropy, PointMassIsZero) { EXPECT_EQ(entropy(Distribution::point_mass(5, 2)), 0.0); }

TEST(Entropy, DyadicDistribution) { EXPECT_NEAR(entropy(Distribution({0.5, 0.25, 0.25})), 1.5, 1e-15); }

TEST(Entropy, MatchesReferenceAndStaysInRange) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 9;
    const auto p = random_pmf(rng, n);
    const double h = entropy(Distribution(p));
    EXPECT_NEAR(h, ref_entropy(p), 1e-12);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log2(static_cast<double>(n)) + 1e-12);
  }
}

TEST(Distribution, RejectsBadMass) {
  EXPECT_THROW(Distribution({0.5, 0.6}), ValidationError);
  EXPECT_THROW(Distribution({1.2, -0.2}), ValidationError);
  EXPECT_THROW(Distribution(std::vector<double>{}), ValidationError);
}

TEST(Distribution, RenormalizesWithinTolerance) {
  const Distribution d({0.5 + 4e-13, 0.5});
  EXPECT_NEAR(d[0] + d[1], 1.0, 1e-15);
}

TEST(KlDivergence, IdenticalIsZero) {
  const Distribution p({0.2, 0.3, 0.5});
  EXPECT_EQ(kl_divergence(p, p), 0.0);
}

TEST(KlDivergence, BernoulliHalfAgainstQuarter) {
  // 0.5 log2(0.5/0.25) + 0.5 log2(0.5/0.75)
  const double expected = 0.5 * std::log2(2.0) + 0.5 * std::log2(2.0 / 3.0);
  EXPECT_NEAR(kl_divergence(Distribution({0.5, 0.5}), Distribution({0.75, 0.25})), expected, 1e-12);
  EXPECT_NEAR(expected, 0.2075, 1e-4);
}

TEST(KlDivergence, SupportViolationIsInfinite) {
  EXPECT_EQ(kl_divergence(Distribution({0.0, 1.0}), Distribution({1.0, 0.0})),
            std::numeric_limits<double>::infinity());
}

TEST(KlDivergence, MismatchedAlphabetsThrow) {
  EXPECT_THROW(kl_divergence(Distribution::uniform(2), Distribution::uniform(3)), ShapeError);
}

TEST(KlDivergence, GibbsInequalityOnRandomPairs) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const Distribution p(random_pmf(rng, 5)), q(random_pmf(rng, 5));
    EXPECT_GE(kl_divergence(p, q), 0.0);
  }
}

TEST(MutualInformation, ProductIsZero) {
  const auto j = JointDistribution::product(Distribution({0.3, 0.7}), Distribution({0.1, 0.4, 0.5}));
  EXPECT_NEAR(mutual_information(j), 0.0, 1e-12);
}

TEST(MutualInformation, DoublySymmetricBinary) {
  const auto j = JointDistribution::from_matrix({{0.4, 0.1}, {0.1, 0.4}});
  EXPECT_NEAR(mutual_information(j), 1.0 - ref_h2(0.2), 1e-12);
  EXPECT_NEAR(mutual_information(j), 0.27807, 1e-5);
}

TEST(MutualInformation, IdenticalUniformBitsIsOne) {
  EXPECT_NEAR(mutual_information(JointDistribution::from_matrix({{0.5, 0.0}, {0.0, 0.5}})), 1.0, 1e-15);
}

TEST(MutualInformation, RequiresTwoAxes) {
  const auto j = JointDistribution::from_weights({2, 2, 2}, std::vector<double>(8, 1.0));
  EXPECT_THROW(mutual_information(j), ShapeError);
}

TEST(MutualInformation, EqualsAverageDivergenceAndIsPermutationInvariant) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto px = random_pmf(rng, 3);
    const auto k = sfrl::testing::random_kernel(rng, 3, 4);
    std::vector<std::vector<double>> m(3, std::vector<double>(4));
    for (int x = 0; x < 3; ++x) {
      for (int y = 0; y < 4; ++y) m[x][y] = px[x] * k[x][y];
    }
    const auto j = JointDistribution::from_matrix(m);
    const double info = mutual_information(j);
    EXPECT_NEAR(info, sfrl::testing::ref_mutual_information(m), 1e-10);

    const Distribution py = j.marginal(1);
    double avg = 0.0;
    for (int x = 0; x < 3; ++x) avg += px[x] * kl_divergence(Distribution(k[x]), py);
    EXPECT_NEAR(info, avg, 1e-10);

    auto permuted = m;
    std::reverse(permuted.begin(), permuted.end());
    for (auto& row : permuted) std::rotate(row.begin(), row.begin() + 1, row.end());
    EXPECT_NEAR(mutual_information(JointDistribution::from_matrix(permuted)), info, 1e-12);
  }
}

TEST(ConditionalEntropy, Examples) {
  EXPECT_NEAR(conditional_entropy(JointDistribution::from_matrix({{0.5, 0.0}, {0.0, 0.5}}), 0), 0.0, 1e-15);
  EXPECT_NEAR(conditional_entropy(JointDistribution::product(Distribution::uniform(2), Distribution::uniform(2)), 0),
              1.0, 1e-15);
  EXPECT_NEAR(conditional_entropy(JointDistribution::from_matrix({{0.4, 0.1}, {0.1, 0.4}}), 0), ref_h2(0.2), 1e-12);
  EXPECT_NEAR(ref_h2(0.2), 0.72193, 1e-5);
  EXPECT_THROW(conditional_entropy(JointDistribution::from_matrix({{1.0}}), 2), ShapeError);
}

TEST(ConditionalEntropy, ChainRuleOnRandomJoints) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const auto w = random_pmf(rng, 12);
    const auto j = JointDistribution::from_weights({3, 4}, w);
    EXPECT_NEAR(entropy(j), entropy(j.marginal(0)) + conditional_entropy(j, 0), 1e-10);
  }
}

TEST(ConditionalMutualInformation, MatchesEntropyIdentity) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const auto j = JointDistribution::from_weights({2, 3, 2}, random_pmf(rng, 12));
    // I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)
    const double expected = entropy(j.marginal(std::vector<std::size_t>{0, 2})) +
                            entropy(j.marginal(std::vector<std::size_t>{1, 2})) - entropy(j) -
                            entropy(j.marginal(2));
    EXPECT_NEAR(mutual_information(j, {0}, {1}, {2}), expected, 1e-10);
    EXPECT_GE(mutual_information(j, {0}, {1}, {2}), -1e-12);
  }
}

TEST(Marginal, AxesReorderAndSum) {
  const auto j = JointDistribution::from_weights({2, 3}, {1, 2, 3, 4, 5, 6});
  const auto t = j.marginal(std::vector<std::size_t>{1, 0});
  EXPECT_EQ(t.shape(), (std::vector<std::size_t>{3, 2}));
  EXPECT_NEAR(t(2, 1), 6.0 / 21.0, 1e-15);
  EXPECT_NEAR(j.marginal(1)[0], 5.0 / 21.0, 1e-15);
}

TEST(Conditionals, ZeroMassCellsAreEmpty) {
  const auto j = JointDistribution::from_matrix({{0.5, 0.0}, {0.0, 0.0}, {0.25, 0.25}});
  const auto c = conditionals(j, 1, {0});
  ASSERT_EQ(c.size(), 3u);
  EXPECT_TRUE(c[0].has_value());
  EXPECT_FALSE(c[1].has_value());
  EXPECT_NEAR((*c[2])[1], 0.5, 1e-15);
}

TEST(TotalVariation, HalfL1) {
  EXPECT_NEAR(total_variation(Distribution({0.5, 0.5}), Distribution({0.8, 0.2})), 0.3, 1e-15);
}

TEST(Power, ProductIndexing) {
  const auto d = power(Distribution({0.25, 0.75}), 2);
  ASSERT_EQ(d.size(), 4u);
  EXPECT_NEAR(d[1], 0.25 * 0.75, 1e-15);
  const auto k = power(Kernel::binary_symmetric(0.1), 2);
  EXPECT_NEAR(k.row(1)[2], 0.1 * 0.1, 1e-15);
  EXPECT_NEAR(k.row(0)[0], 0.81, 1e-15);
}

TEST(Kernel, JointAndMarginal) {
  const Kernel k = Kernel::binary_symmetric(0.2);
  const auto j = k.joint(Distribution::uniform(2));
  EXPECT_NEAR(j(0, 1), 0.1, 1e-15);
  EXPECT_NEAR(k.output_marginal(Distribution({1.0, 0.0}))[1], 0.2, 1e-15);
  EXPECT_THROW(Kernel::from_rows({{0.5, 0.5}, {1.0}}), ShapeError);
}
