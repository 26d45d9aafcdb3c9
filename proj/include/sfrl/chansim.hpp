#pragma once

// One-shot channel simulation with common randomness. Encoder and decoder
// share (master seed, session); the encoder runs the Poisson selection for
// the kernel row of its input and sends the index with a Zipf code, the
// decoder maps the index back to the codebook mark.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfrl/bitstream.hpp"
#include "sfrl/integer_codes.hpp"
#include "sfrl/pfr.hpp"
#include "sfrl/probspace.hpp"

namespace sfrl {

enum class SimMode { kSourceCoupled, kFixedInput };

std::string to_string(SimMode mode);

struct ChannelSimScheme {
  Kernel kernel;
  DiscretePrior prior;                 // P_Y used to map codebook marks
  std::uint64_t master_seed;
  double info_bits;                    // I(X;Y), or the capacity in fixed-input mode
  ZipfCode zipf;
  SimMode mode;
  std::optional<Distribution> source;  // set in source-coupled mode
};

/// Prior = output marginal of source through kernel; lambda from I(X;Y).
ChannelSimScheme make_source_coupled_scheme(const Distribution& source, const Kernel& kernel,
                                            std::uint64_t master_seed);
/// Prior = capacity-achieving output marginal; lambda from the capacity.
ChannelSimScheme make_fixed_input_scheme(const Kernel& kernel, std::uint64_t master_seed,
                                         double capacity_tol = 1e-9);

SelectionOutcome sim_select(const ChannelSimScheme& scheme, std::size_t x, std::uint64_t session);
void sim_encode_to(const ChannelSimScheme& scheme, std::size_t x, std::uint64_t session,
                   BitString& out);
BitString sim_encode(const ChannelSimScheme& scheme, std::size_t x, std::uint64_t session);
std::size_t sim_decode(const ChannelSimScheme& scheme, BitReader& in, std::uint64_t session);
std::size_t sim_decode(const ChannelSimScheme& scheme, const BitString& bits, std::uint64_t session);

/// Index-bound constant log2(e)/e + 1.
inline constexpr double kIndexBoundConstant = kLog2eOverE + 1.0;

struct SimReport {
  SimMode mode = SimMode::kSourceCoupled;
  std::size_t trials = 0;
  double info_bits = 0.0;

  // Description length: averaged over X (source-coupled) or the worst input
  // (fixed-input), with its standard error over sessions.
  double expected_length = 0.0;
  double expected_length_se = 0.0;
  double length_bound = 0.0;  // info + log2(info+1) + 5
  std::vector<double> length_per_input;
  std::vector<double> length_se_per_input;

  // Law of the decoded output per input.
  std::vector<double> tv_per_input;
  double tv_threshold = 0.0;

  // E[log2 K | X=x] against D(P_{Y|X=x} || P_Y) + kIndexBoundConstant.
  std::vector<double> mean_log2_k;
  std::vector<double> mean_log2_k_se;
  std::vector<double> kl_per_input;
  double mean_log2_k_avg = 0.0;
  double mean_log2_k_avg_se = 0.0;

  // Plug-in H(K) with X ~ P_X (source-coupled only).
  std::optional<double> entropy_k;
  double entropy_k_bound = 0.0;  // I + log2(I+1) + 4

  std::size_t decode_mismatches = 0;

  bool length_pass = false;
  bool tv_pass = false;
  bool index_pass = false;
  bool entropy_pass = false;
  bool pass = false;
};

/// Monte Carlo over sessions first_session .. first_session+trials-1, each
/// session's codebook shared by every input; expectations over X are exact.
SimReport evaluate_scheme(const ChannelSimScheme& scheme, std::size_t trials,
                          std::uint64_t first_session = 0);

}  // namespace sfrl
