#include <gtest/gtest.h>

#include <cmath>

#include "sfrl/chansim.hpp"
#include "sfrl/error.hpp"
#include "test_support.hpp"

using namespace sfrl;
using sfrl::testing::ref_h2;

namespace {

constexpr std::uint64_t kSeed = 77;

double ref_bound(double info) { return info + std::log2(info + 1.0) + 5.0; }

}  // namespace

TEST(ChanSim, IndependentKernelSendsIndexOne) {
  const Distribution row({0.3, 0.7});
  const auto scheme = make_source_coupled_scheme(Distribution::uniform(3), Kernel::constant(3, row), kSeed);
  EXPECT_NEAR(scheme.info_bits, 0.0, 1e-12);
  for (std::uint64_t s = 0; s < 200; ++s) {
    for (std::size_t x = 0; x < 3; ++x) {
      EXPECT_EQ(sim_select(scheme, x, s).k, 1u);
      EXPECT_EQ(sim_encode(scheme, x, s).size(), scheme.zipf.length_of(1));
    }
  }
  const SimReport r = evaluate_scheme(scheme, 1000);
  EXPECT_DOUBLE_EQ(r.expected_length, scheme.zipf.length_of(1));
  EXPECT_GE(r.length_bound, 5.0);
  EXPECT_TRUE(r.pass);
}

TEST(ChanSim, IdentityKernelIndexIsFirstMatchingMark) {
  const auto scheme = make_source_coupled_scheme(Distribution::uniform(2), Kernel::identity(2), kSeed);
  const int n = 20000;
  double mean_k = 0.0;
  for (int s = 0; s < n; ++s) {
    const std::size_t x = s % 2;
    const auto out = sim_select(scheme, x, s);
    ASSERT_EQ(out.y, x);
    ASSERT_EQ(sim_encode(scheme, x, s).size(), scheme.zipf.length_of(out.k));
    mean_k += static_cast<double>(out.k) / n;
  }
  EXPECT_NEAR(mean_k, 2.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(ChanSim, DecoderRecoversSelectedOutput) {
  const Kernel k = Kernel::from_rows({{0.6, 0.3, 0.1}, {0.2, 0.2, 0.6}, {0.1, 0.8, 0.1}});
  const auto scheme = make_source_coupled_scheme(Distribution({0.5, 0.3, 0.2}), k, kSeed);
  for (std::uint64_t s = 0; s < 100000; ++s) {
    const std::size_t x = (s * 2654435761u) % 3;
    ASSERT_EQ(sim_decode(scheme, sim_encode(scheme, x, s), s), sim_select(scheme, x, s).y);
  }
}

TEST(ChanSim, ConcatenatedSessionsStreamDecode) {
  const auto scheme = make_source_coupled_scheme(Distribution::uniform(2), Kernel::binary_symmetric(0.2), kSeed);
  BitString stream;
  std::vector<std::size_t> expected;
  for (std::uint64_t s = 0; s < 500; ++s) {
    sim_encode_to(scheme, s % 2, s, stream);
    expected.push_back(sim_select(scheme, s % 2, s).y);
  }
  BitReader r(stream);
  for (std::uint64_t s = 0; s < 500; ++s) ASSERT_EQ(sim_decode(scheme, r, s), expected[s]);
  EXPECT_TRUE(r.at_end());
}

TEST(ChanSim, TruncatedDescriptionIsFramingError) {
  const auto scheme = make_source_coupled_scheme(Distribution::uniform(2), Kernel::binary_symmetric(0.11), kSeed);
  std::uint64_t s = 0;
  while (sim_select(scheme, 0, s).k < 4) ++s;
  const std::string bits = sim_encode(scheme, 0, s).to_string();
  EXPECT_THROW(sim_decode(scheme, BitString::from_string(bits.substr(0, bits.size() - 1)), s), FramingError);
}

TEST(ChanSim, SourceCoupledPriorIsOutputMarginal) {
  const Kernel k = Kernel::from_rows({{0.9, 0.1}, {0.4, 0.6}});
  const auto scheme = make_source_coupled_scheme(Distribution({0.25, 0.75}), k, kSeed);
  EXPECT_NEAR(scheme.prior[0], 0.25 * 0.9 + 0.75 * 0.4, 1e-15);
}

TEST(ChanSim, BinarySymmetricMeetsLengthBound) {
  const auto scheme = make_source_coupled_scheme(Distribution::uniform(2), Kernel::binary_symmetric(0.11), kSeed);
  const double info = 1.0 - ref_h2(0.11);
  EXPECT_NEAR(scheme.info_bits, info, 1e-12);
  const SimReport r = evaluate_scheme(scheme, 10000);
  EXPECT_NEAR(r.length_bound, ref_bound(info), 1e-12);
  EXPECT_LE(r.expected_length, ref_bound(info) + 3.0 * r.expected_length_se);
  EXPECT_EQ(r.decode_mismatches, 0u);
  EXPECT_TRUE(r.pass);
}

TEST(ChanSim, FixedInputUsesCapacity) {
  const auto scheme = make_fixed_input_scheme(Kernel::binary_symmetric(0.11), kSeed);
  const double cap = 1.0 - ref_h2(0.11);
  EXPECT_NEAR(scheme.info_bits, cap, 1e-8);
  EXPECT_NEAR(scheme.prior[0], 0.5, 1e-6);
  const SimReport r = evaluate_scheme(scheme, 10000);
  ASSERT_EQ(r.length_per_input.size(), 2u);
  for (std::size_t x = 0; x < 2; ++x) {
    EXPECT_LE(r.length_per_input[x], ref_bound(cap) + 3.0 * r.length_se_per_input[x]);
  }
  EXPECT_TRUE(r.pass);
}

TEST(ChanSim, EvaluationIsDeterministic) {
  const auto scheme = make_source_coupled_scheme(Distribution({0.3, 0.7}), Kernel::binary_symmetric(0.3), kSeed);
  const SimReport a = evaluate_scheme(scheme, 2000, 5), b = evaluate_scheme(scheme, 2000, 5);
  EXPECT_EQ(a.expected_length, b.expected_length);
  EXPECT_EQ(a.tv_per_input, b.tv_per_input);
  EXPECT_EQ(a.mean_log2_k, b.mean_log2_k);
}
