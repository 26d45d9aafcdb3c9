#pragma once

// One-shot variable-length lossy source coding.
//
// Soft variant: one fixed Poisson codebook drawn for the rate-distortion
// optimal kernel; the encoder sends the selected index with a Zipf code.
// Mixture variant: two fixed codebook realizations z_0, z_1 chosen by a
// small LP over sampled candidates, a one-bit branch header Q and a Huffman
// code per branch for the induced reconstruction.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sfrl/bitstream.hpp"
#include "sfrl/huffman.hpp"
#include "sfrl/integer_codes.hpp"
#include "sfrl/numopt.hpp"
#include "sfrl/pfr.hpp"
#include "sfrl/probspace.hpp"

namespace sfrl {

/// Default slack added to the entropy target of candidate mixtures.
inline constexpr double kMixtureSlack = 0.05;

struct SoftLossyCode {
  Distribution source;
  DistortionMatrix distortion;
  double target_distortion;
  RdSolution rd;
  DiscretePrior prior;  // reconstruction marginal of the design joint
  std::uint64_t seed;
  std::uint64_t codebook_stream;
  ZipfCode zipf;
};

SoftLossyCode design_soft(const Distribution& source, const DistortionMatrix& d, double target,
                          std::uint64_t seed, std::uint64_t codebook_stream = 0);

struct SoftEncoding {
  std::uint64_t k;
  std::size_t reconstruction;
  BitString bits;
};

SoftEncoding soft_encode_detail(const SoftLossyCode& code, std::size_t x);
BitString soft_encode(const SoftLossyCode& code, std::size_t x);
std::size_t soft_decode(const SoftLossyCode& code, BitReader& in);
std::size_t soft_decode(const SoftLossyCode& code, const BitString& bits);

struct CodebookStats {
  double expected_length;
  double expected_distortion;
};

/// Exact E[L] and E[d] over X for the codebook with the given stream.
CodebookStats soft_codebook_stats(const SoftLossyCode& code, std::uint64_t codebook_stream);

struct LossyBranch {
  std::uint64_t codebook_stream;
  InducedFunction function;       // x -> reconstruction
  Distribution reconstruction;    // law of the reconstruction under the source
  double entropy;
  double distortion;
  HuffmanCode huffman;
};

struct MixtureLossyCode {
  Distribution source;
  DistortionMatrix distortion;
  double target_distortion;
  RdSolution rd;
  std::uint64_t seed;
  std::size_t candidates;
  std::size_t distinct_candidates;
  double eta;        // log2(I+1) + 4
  double slack;      // added to the entropy target
  std::vector<LossyBranch> branches;  // exactly two; Q = 1 selects branches[1]
  double lambda_mix;                  // P(Q = 1)
  double design_length;               // 1 + sum_q P(q) E[Huffman length | q]
  double design_distortion;
  double design_entropy;
};

/// Throws DesignError when no candidate mixture meets the targets.
MixtureLossyCode design_mixture(const Distribution& source, const DistortionMatrix& d, double target,
                                std::uint64_t seed, std::size_t candidates,
                                double slack = kMixtureSlack);

/// `coin` is uniform on [0, 1); Q = 1 iff coin < lambda_mix.
BitString mixture_encode(const MixtureLossyCode& code, std::size_t x, double coin);
std::size_t mixture_decode(const MixtureLossyCode& code, BitReader& in);
std::size_t mixture_decode(const MixtureLossyCode& code, const BitString& bits);

struct LossyReport {
  bool mixture = false;
  double rate = 0.0;                 // R(D) from Blahut-Arimoto
  double target_distortion = 0.0;
  double expected_length = 0.0;
  double expected_length_se = 0.0;   // zero for exact design values
  double expected_distortion = 0.0;
  double expected_distortion_se = 0.0;
  double length_bound = 0.0;         // R + log2(R+1) + 6
  double slack = 0.0;
  std::size_t codebooks = 0;
  bool pass = false;
};

/// Averages the exact per-codebook statistics over codebook streams
/// 0..codebooks-1.
LossyReport evaluate_soft(const SoftLossyCode& code, std::size_t codebooks);
/// Exact design-time values of a mixture code.
LossyReport evaluate_mixture(const MixtureLossyCode& code);

/// Per-letter average distortion on blocks of length n.
DistortionMatrix block_distortion(const DistortionMatrix& d, unsigned n);

}  // namespace sfrl
