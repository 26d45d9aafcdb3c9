#include <gtest/gtest.h>

#include <cmath>

#include "sfrl/error.hpp"
#include "sfrl/lossy.hpp"
#include "sfrl/rng.hpp"
#include "test_support.hpp"

using namespace sfrl;
using sfrl::testing::ref_h2;

namespace {

constexpr std::uint64_t kSeed = 314;

double ref_bound(double r) { return r + std::log2(r + 1.0) + 6.0; }

}  // namespace

TEST(SoftLossy, LosslessDesignUsesIdentityKernel) {
  const auto code = design_soft(Distribution::uniform(2), DistortionMatrix::hamming(2), 0.0, kSeed);
  EXPECT_NEAR(code.rd.rate, 1.0, 1e-9);
  for (std::size_t x = 0; x < 2; ++x) {
    const auto e = soft_encode_detail(code, x);
    EXPECT_EQ(e.reconstruction, x);
    EXPECT_EQ(soft_decode(code, e.bits), x);
  }
}

TEST(SoftLossy, ZeroRateAlwaysSendsIndexOne) {
  const auto code = design_soft(Distribution::uniform(2), DistortionMatrix::hamming(2), 0.5, kSeed);
  EXPECT_NEAR(code.rd.rate, 0.0, 1e-9);
  EXPECT_NEAR(code.zipf.lambda(), 1.65328, 1e-4);
  for (std::size_t x = 0; x < 2; ++x) EXPECT_EQ(soft_encode_detail(code, x).k, 1u);
}

TEST(SoftLossy, RoundTripAndExactStats) {
  const Distribution src({0.5, 0.3, 0.2});
  const auto d = DistortionMatrix::hamming(3);
  const auto code = design_soft(src, d, 0.2, kSeed);
  for (std::size_t x = 0; x < 3; ++x) {
    const auto e = soft_encode_detail(code, x);
    EXPECT_EQ(soft_decode(code, e.bits), e.reconstruction);
  }
  // Enumeration over x for the design codebook.
  double el = 0.0, ed = 0.0;
  for (std::size_t x = 0; x < 3; ++x) {
    const auto e = soft_encode_detail(code, x);
    el += src[x] * code.zipf.length_of(e.k);
    ed += src[x] * d(x, e.reconstruction);
  }
  const auto stats = soft_codebook_stats(code, code.codebook_stream);
  EXPECT_NEAR(stats.expected_length, el, 1e-12);
  EXPECT_NEAR(stats.expected_distortion, ed, 1e-12);
}

TEST(SoftLossy, CodebookAverageMeetsBound) {
  const auto code = design_soft(Distribution::uniform(2), DistortionMatrix::hamming(2), 0.11, kSeed);
  const double r = 1.0 - ref_h2(0.11);
  EXPECT_NEAR(code.rd.rate, r, 1e-6);
  const LossyReport rep = evaluate_soft(code, 200);
  EXPECT_NEAR(rep.length_bound, ref_bound(r), 1e-6);
  EXPECT_LE(rep.expected_length, ref_bound(r));
  EXPECT_LE(rep.expected_distortion, 0.11 + 3.0 * rep.expected_distortion_se);
  EXPECT_TRUE(rep.pass);
}

TEST(MixtureLossy, BinarySymmetricMeetsBoundExactly) {
  const Distribution src = Distribution::uniform(2);
  const auto d = DistortionMatrix::hamming(2);
  const auto code = design_mixture(src, d, 0.11, kSeed, 2000);
  ASSERT_EQ(code.branches.size(), 2u);
  EXPECT_GE(code.lambda_mix, 0.0);
  EXPECT_LE(code.lambda_mix, 1.0);

  // Recompute design length and distortion from the branch tables.
  double el = 1.0, ed = 0.0;
  for (std::size_t q = 0; q < 2; ++q) {
    const double w = q == 1 ? code.lambda_mix : 1.0 - code.lambda_mix;
    for (std::size_t x = 0; x < 2; ++x) {
      const std::size_t y = code.branches[q].function.table[x];
      el += w * src[x] * code.branches[q].huffman.length_of(y);
      ed += w * src[x] * d(x, y);
    }
  }
  EXPECT_NEAR(code.design_length, el, 1e-12);
  EXPECT_NEAR(code.design_distortion, ed, 1e-12);
  EXPECT_LE(el, ref_bound(1.0 - ref_h2(0.11)));
  EXPECT_LE(ed, 0.11 + 1e-9);
  EXPECT_TRUE(evaluate_mixture(code).pass);
}

TEST(MixtureLossy, DeterministicKernelIsDegenerate) {
  const auto code = design_mixture(Distribution({0.6, 0.4}), DistortionMatrix::hamming(2), 0.0, kSeed, 16);
  for (const auto& b : code.branches) {
    EXPECT_EQ(b.function.table, (std::vector<std::size_t>{0, 1}));
    EXPECT_NEAR(b.distortion, 0.0, 1e-15);
  }
}

TEST(MixtureLossy, RoundTripAndEmpiricalMatchesDesign) {
  const Distribution src({0.8, 0.2});
  const auto d = DistortionMatrix::hamming(2);
  const auto code = design_mixture(src, d, 0.05, kSeed, 256);
  RngStream rng(kSeed, 99);
  const int n = 10000;
  double el = 0.0, ed = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t x = rng.next_uniform() < src[0] ? 0 : 1;
    const BitString b = mixture_encode(code, x, rng.next_uniform());
    const std::size_t y = mixture_decode(code, b);
    const double coin_free = static_cast<double>(b.size());
    el += coin_free / n;
    ed += d(x, y) / n;
    // The decoded reconstruction is one of the two deterministic encoders' outputs.
    EXPECT_TRUE(y == code.branches[0].function.table[x] || y == code.branches[1].function.table[x]);
  }
  EXPECT_NEAR(el, code.design_length, 0.1);
  EXPECT_NEAR(ed, code.design_distortion, 0.02);
}

TEST(MixtureLossy, InfeasibleTargetIsReported) {
  const auto d = DistortionMatrix::from_rows({{0.1, 1.0}, {1.0, 0.1}});
  EXPECT_THROW(design_mixture(Distribution::uniform(2), d, 0.01, kSeed, 16), InfeasibleError);
}

TEST(MixtureLossy, RegressionSuiteMeetsBound) {
  struct Case {
    Distribution src;
    DistortionMatrix d;
    double target;
  };
  const std::vector<Case> cases = {
      {Distribution({0.8, 0.2}), DistortionMatrix::hamming(2), 0.05},
      {Distribution({0.8, 0.2}), DistortionMatrix::hamming(2), 0.11},
      {Distribution::uniform(2), DistortionMatrix::hamming(2), 0.05},
      {Distribution({0.4, 0.3, 0.2, 0.1}),
       DistortionMatrix::from_rows({{0, 1, 2, 2}, {1, 0, 1, 2}, {3, 1, 0, 1}, {3, 3, 1, 0}}), 0.3},
  };
  for (const auto& c : cases) {
    const auto code = design_mixture(c.src, c.d, c.target, kSeed, 512);
    const LossyReport r = evaluate_mixture(code);
    EXPECT_LE(r.expected_length, ref_bound(r.rate));
    EXPECT_LE(r.expected_distortion, c.target + 1e-9);
    EXPECT_TRUE(r.pass);
  }
}

TEST(MixtureLossy, BlockRedundancyShrinksPerSymbol) {
  const Distribution src({0.8, 0.2});
  const double target = 0.05;
  const double r1 = ref_h2(0.2) - ref_h2(target);
  double prev_overhead = std::numeric_limits<double>::infinity();
  for (unsigned n : {1u, 2u, 4u}) {
    const auto code =
        design_mixture(power(src, n), block_distortion(DistortionMatrix::hamming(2), n), target, kSeed, 512);
    const LossyReport r = evaluate_mixture(code);
    EXPECT_NEAR(r.rate, n * r1, 1e-5);
    const double overhead = r.expected_length / n - r1;
    EXPECT_LE(overhead, (std::log2(n * r1 + 1.0) + 6.0) / n + 1e-9) << "n=" << n;
    EXPECT_LT(overhead, prev_overhead);
    prev_overhead = overhead;
  }
}
