#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sfrl/error.hpp"
#include "sfrl/pfr.hpp"
#include "sfrl/rng.hpp"
#include "test_support.hpp"

using namespace sfrl;

namespace {

constexpr std::uint64_t kSeed = 20240611;

std::vector<double> empirical_law(const std::vector<std::size_t>& draws, std::size_t n) {
  std::vector<double> p(n, 0.0);
  for (auto d : draws) p[d] += 1.0 / draws.size();
  return p;
}

double tv(const std::vector<double>& a, const Distribution& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / 2.0;
}

}  // namespace

TEST(Rng, CounterBasedAndStreamSeparated) {
  const CounterRng a(1, 2), b(1, 2), c(1, 3);
  EXPECT_EQ(a.bits(17), b.bits(17));
  EXPECT_NE(a.bits(17), c.bits(17));
  EXPECT_NE(derive_stream(1, 0), derive_stream(2, 0));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double v = a.uniform_open(i);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Codebook, DeterministicRegeneration) {
  PfrCodebook a = build_codebook(kSeed, 7, 50), b = build_codebook(kSeed, 7, 1);
  for (std::size_t i = 1; i <= 50; ++i) {
    EXPECT_EQ(a.point(i).mark, b.point(i).mark);
    EXPECT_EQ(a.point(i).time, b.point(i).time);
  }
}

TEST(Codebook, TimesStrictlyIncreasingAndMarksInRange) {
  PfrCodebook cb = build_codebook(kSeed, 1, 1000);
  for (std::size_t i = 1; i <= 1000; ++i) {
    EXPECT_GE(cb.point(i).mark, 0.0);
    EXPECT_LT(cb.point(i).mark, 1.0);
    if (i > 1) EXPECT_GT(cb.point(i).time, cb.point(i - 1).time);
  }
}

TEST(Codebook, CapIsEnforced) {
  PfrCodebook cb(kSeed, 0, 5);
  EXPECT_NO_THROW(cb.point(5));
  EXPECT_THROW(cb.point(6), BudgetError);
}

TEST(Codebook, FirstArrivalIsUnitExponential) {
  const int n = 100000;
  double sum = 0.0;
  for (int s = 0; s < n; ++s) sum += build_codebook(kSeed + s, 0).point(1).time;
  EXPECT_NEAR(sum / n, 1.0, 0.01);
}

TEST(Codebook, MarksPassKolmogorovSmirnov) {
  const int n = 100000;
  std::vector<double> marks;
  marks.reserve(n);
  for (int s = 0; s < n; ++s) marks.push_back(build_codebook(kSeed, s).point(1).mark);
  std::sort(marks.begin(), marks.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    d = std::max({d, (i + 1.0) / n - marks[i], marks[i] - static_cast<double>(i) / n});
  }
  // Asymptotic 1% critical value.
  EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST(Select, ConditionalEqualToPriorPicksFirstArrival) {
  const DiscretePrior prior(Distribution({0.2, 0.3, 0.5}));
  for (std::uint64_t s = 0; s < 200; ++s) {
    PfrCodebook cb = build_codebook(kSeed, s);
    const auto out = select(cb, prior.pmf(), prior);
    EXPECT_EQ(out.k, 1u);
    EXPECT_EQ(out.y, prior.symbol_for(cb.point(1).mark));
  }
}

TEST(Select, PointMassIndexIsGeometric) {
  const DiscretePrior prior(Distribution::uniform(2));
  const int n = 100000;
  std::vector<int> counts(6, 0);
  double mean = 0.0;
  for (int s = 0; s < n; ++s) {
    PfrCodebook cb = build_codebook(kSeed, s);
    const auto out = select(cb, Distribution::point_mass(2, 0), prior);
    ASSERT_EQ(out.y, 0u);
    EXPECT_LE(out.k, out.points_examined);
    mean += static_cast<double>(out.k) / n;
    if (out.k <= counts.size()) ++counts[out.k - 1];
  }
  EXPECT_NEAR(mean, 2.0, 0.03);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double p = std::pow(0.5, j + 1.0);
    EXPECT_NEAR(counts[j] / static_cast<double>(n), p, 4.0 * std::sqrt(p * (1 - p) / n)) << "k=" << j + 1;
  }
}

TEST(Select, ScoreMatchesWinningPoint) {
  const DiscretePrior prior(Distribution({0.5, 0.3, 0.2}));
  const Distribution cond({0.1, 0.2, 0.7});
  for (std::uint64_t s = 0; s < 500; ++s) {
    PfrCodebook cb = build_codebook(kSeed, s);
    const auto out = select(cb, cond, prior);
    EXPECT_EQ(out.score, cb.point(out.k).time * prior[out.y] / cond[out.y]);
    // Exhaustive argmin over the examined points agrees.
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 1; i <= out.points_examined; ++i) {
      const auto y = prior.symbol_for(cb.point(i).mark);
      if (cond[y] == 0.0) continue;
      const double sc = cb.point(i).time * prior[y] / cond[y];
      if (sc < best) best = sc, arg = i;
    }
    EXPECT_EQ(arg, out.k);
  }
}

TEST(Select, ChargingZeroPriorSymbolIsPrecondition) {
  PfrCodebook cb = build_codebook(kSeed, 0);
  EXPECT_THROW(select(cb, Distribution({0.5, 0.5}), DiscretePrior(Distribution({1.0, 0.0}))), PreconditionError);
}

TEST(Select, CapExhaustionIsBudgetError) {
  const DiscretePrior prior(Distribution({0.999, 0.001}));
  bool thrown = false;
  for (std::uint64_t s = 0; s < 50 && !thrown; ++s) {
    PfrCodebook c(kSeed, s, 3);
    try {
      select(c, Distribution::point_mass(2, 1), prior);
    } catch (const BudgetError&) {
      thrown = true;
    }
  }
  EXPECT_TRUE(thrown);
}

TEST(Select, ExactSimulationTotalVariation) {
  const Kernel k = Kernel::from_rows({{0.7, 0.2, 0.1}, {0.1, 0.1, 0.8}});
  const Distribution px({0.6, 0.4});
  const DiscretePrior prior(k.output_marginal(px));
  const std::size_t n = 100000;
  for (std::size_t x = 0; x < 2; ++x) {
    std::vector<std::size_t> ys;
    ys.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
      PfrCodebook cb = build_codebook(kSeed + x, s);
      ys.push_back(select(cb, k.row(x), prior).y);
    }
    EXPECT_LE(tv(empirical_law(ys, 3), k.row(x)), std::max(0.01, 3.0 * std::sqrt(3.0 / n)));
  }
}

TEST(Select, ContinuousFlatDensityReturnsFirstMark) {
  ContinuousPrior unif{[](double u) { return u; }, [](double) { return 1.0; }, 1.0};
  EXPECT_NO_THROW(check_density(unif));
  for (std::uint64_t s = 0; s < 100; ++s) {
    PfrCodebook cb = build_codebook(kSeed, s);
    const auto out = select_continuous(cb, [](double) { return 1.0; }, unif);
    EXPECT_EQ(out.k, 1u);
    EXPECT_EQ(out.y, cb.point(1).mark);
  }
}

TEST(Select, ContinuousOutputFollowsConditionalDensity) {
  ContinuousPrior unif{[](double u) { return u; }, [](double) { return 1.0; }, 2.0};
  const int n = 20000;
  double mean = 0.0;
  for (int s = 0; s < n; ++s) {
    PfrCodebook cb = build_codebook(kSeed, s);
    mean += select_continuous(cb, [](double y) { return 2.0 * y; }, unif).y / n;
  }
  EXPECT_NEAR(mean, 2.0 / 3.0, 4.0 * std::sqrt(1.0 / 18.0 / n));
}

TEST(Select, BadDensityIsRejected) {
  ContinuousPrior bad{[](double u) { return u; }, [](double) { return 2.0; }, 1.0};
  EXPECT_THROW(check_density(bad), ValidationError);
}

TEST(Collapse, AgreesWithProcessFormPerRealization) {
  std::mt19937_64 rng(5);
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto rows = sfrl::testing::random_kernel(rng, 1, 4);
    const Distribution cond(rows[0]);
    const DiscretePrior prior(Distribution(sfrl::testing::random_pmf(rng, 4)));
    PfrCodebook cb = build_codebook(kSeed, s);
    const auto z = collapse_exponentials(cb, prior);
    std::size_t arg = 0;
    for (std::size_t y = 1; y < 4; ++y) {
      if (z[y] / cond[y] < z[arg] / cond[arg]) arg = y;
    }
    PfrCodebook fresh = build_codebook(kSeed, s);
    ASSERT_EQ(select(fresh, cond, prior).y, arg) << "seed " << s;
  }
}

TEST(Collapse, CoordinatesAreUnitExponential) {
  const DiscretePrior prior(Distribution({0.7, 0.2, 0.1}));
  const int n = 100000;
  std::vector<double> mean(3, 0.0);
  for (int s = 0; s < n; ++s) {
    PfrCodebook cb = build_codebook(kSeed, s);
    const auto z = collapse_exponentials(cb, prior);
    for (int y = 0; y < 3; ++y) mean[y] += z[y] / n;
  }
  for (double m : mean) EXPECT_NEAR(m, 1.0, 0.01);
}

TEST(Collapse, ZeroMassSymbolIsInfinite) {
  PfrCodebook cb = build_codebook(kSeed, 0);
  const auto z = collapse_exponentials(cb, DiscretePrior(Distribution({0.5, 0.0, 0.5})));
  EXPECT_TRUE(std::isfinite(z[0]));
  EXPECT_TRUE(std::isinf(z[1]));
  EXPECT_TRUE(std::isfinite(z[2]));
}

TEST(InducedFunction, PriorRowsGiveConstantFunction) {
  const Distribution p({0.3, 0.7});
  const DiscretePrior prior(p);
  PfrCodebook cb = build_codebook(kSeed, 3);
  const auto f = induced_function(cb, Kernel::constant(4, p), prior);
  for (auto y : f.table) EXPECT_EQ(y, prior.symbol_for(cb.point(1).mark));
}

TEST(InducedFunction, DeterministicKernelIsReproduced) {
  const Kernel k = Kernel::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}, {0, 1, 0}});
  const DiscretePrior prior(Distribution::uniform(3));
  for (std::uint64_t s = 0; s < 50; ++s) {
    PfrCodebook cb = build_codebook(kSeed, s);
    EXPECT_EQ(induced_function(cb, k, prior).table, (std::vector<std::size_t>{1, 2, 0, 1}));
  }
}

TEST(InducedFunction, BinarySymmetricLawPerInput) {
  const Kernel k = Kernel::binary_symmetric(0.11);
  const DiscretePrior prior(Distribution::uniform(2));
  const int n = 10000;
  std::vector<std::vector<std::size_t>> ys(2);
  for (int s = 0; s < n; ++s) {
    PfrCodebook cb = build_codebook(kSeed, s);
    const auto f = induced_function(cb, k, prior);
    for (int x = 0; x < 2; ++x) ys[x].push_back(f.table[x]);
  }
  for (int x = 0; x < 2; ++x) EXPECT_LE(tv(empirical_law(ys[x], 2), k.row(x)), 0.02);
}

TEST(ConditionalSelect, IdenticalPriorsReduceToSelect) {
  const DiscretePrior prior(Distribution({0.4, 0.6}));
  const std::vector<DiscretePrior> per_u = {prior, prior};
  const Distribution cond({0.9, 0.1});
  for (std::uint64_t s = 0; s < 200; ++s) {
    PfrCodebook a = build_codebook(kSeed, s), b = build_codebook(kSeed, s);
    const auto x = conditional_select(a, 1, cond, per_u);
    const auto y = select(b, cond, prior);
    EXPECT_EQ(x.k, y.k);
    EXPECT_EQ(x.y, y.y);
  }
}

TEST(ConditionalSelect, DisjointPriorsStayInSupport) {
  const std::vector<DiscretePrior> per_u = {DiscretePrior(Distribution({0.5, 0.5, 0.0, 0.0})),
                                            DiscretePrior(Distribution({0.0, 0.0, 0.3, 0.7}))};
  for (std::uint64_t s = 0; s < 500; ++s) {
    PfrCodebook cb = build_codebook(kSeed, s);
    EXPECT_LT(conditional_select(cb, 0, Distribution({0.2, 0.8, 0.0, 0.0}), per_u).y, 2u);
    EXPECT_GE(conditional_select(cb, 1, Distribution({0.0, 0.0, 0.6, 0.4}), per_u).y, 2u);
  }
}

TEST(ConditionalSelect, LawPerCellMatchesConditional) {
  const std::vector<DiscretePrior> per_u = {DiscretePrior(Distribution({0.5, 0.3, 0.2})),
                                            DiscretePrior(Distribution({0.1, 0.1, 0.8}))};
  const std::vector<std::vector<Distribution>> cond = {
      {Distribution({0.8, 0.1, 0.1}), Distribution({0.2, 0.5, 0.3})},
      {Distribution({0.3, 0.0, 0.7}), Distribution({0.05, 0.15, 0.8})}};
  const std::size_t n = 100000;
  for (std::size_t u = 0; u < 2; ++u) {
    for (std::size_t x = 0; x < 2; ++x) {
      std::vector<std::size_t> ys;
      ys.reserve(n);
      for (std::size_t s = 0; s < n; ++s) {
        PfrCodebook cb = build_codebook(kSeed + 10 * u + x, s);
        ys.push_back(conditional_select(cb, u, cond[u][x], per_u).y);
      }
      EXPECT_LE(tv(empirical_law(ys, 3), cond[u][x]), 0.02) << u << "," << x;
    }
  }
}
