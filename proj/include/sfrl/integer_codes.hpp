#pragma once

// Prefix-free codes over the positive integers. The Zipf code uses Shannon
// lengths for q(k) = c * k^-lambda with canonical codeword assignment inside
// each length class; Elias-delta is the parameter-free fallback.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sfrl/bitstream.hpp"

namespace sfrl {

class IntegerCode {
 public:
  virtual ~IntegerCode() = default;
  virtual unsigned length_of(std::uint64_t k) const = 0;
  virtual void encode_to(std::uint64_t k, BitString& out) const = 0;
  /// Throws FramingError on a truncated or invalid stream.
  virtual std::uint64_t decode(BitReader& in) const = 0;

  BitString encode(std::uint64_t k) const {
    BitString b;
    encode_to(k, b);
    return b;
  }
};

/// lambda = 1 + 1/(info_bits + log2(e)/e + 1).
double zipf_params(double info_bits);

class ZipfCode final : public IntegerCode {
 public:
  /// Upper limit on encodable indices; steep codes stop earlier (see max_index).
  static constexpr std::uint64_t kMaxIndex = std::uint64_t{1} << 32;
  /// Cut-off between the exact partial sum and the integral tail bound.
  static constexpr std::uint64_t kPartialTerms = 1'000'000;

  double lambda() const { return lambda_; }
  /// Largest encodable index: kMaxIndex, or less once codewords would exceed 64 bits.
  std::uint64_t max_index() const { return max_index_; }
  double norm_c() const { return norm_c_; }
  /// Upper minus lower bound on sum_k q(k) implied by the tail estimate.
  double normalization_gap() const { return normalization_gap_; }

  unsigned length_of(std::uint64_t k) const override;
  void encode_to(std::uint64_t k, BitString& out) const override;
  std::uint64_t decode(BitReader& in) const override;

  /// sum_{k <= partial} 2^-length(k) plus an integral bound on the rest.
  double kraft_upper_bound(std::uint64_t partial = kPartialTerms) const;

  struct LengthClass {
    unsigned length;
    std::uint64_t first_k;
    std::uint64_t last_k;
    std::uint64_t first_code;
  };
  const std::vector<LengthClass>& classes() const { return classes_; }

 private:
  friend ZipfCode zipf_build(double lambda, double tol);
  ZipfCode() = default;
  unsigned raw_length(std::uint64_t k) const;

  double lambda_ = 2.0;
  double norm_c_ = 1.0;
  double neg_log2_c_ = 0.0;
  double normalization_gap_ = 0.0;
  std::uint64_t max_index_ = 0;
  std::vector<LengthClass> classes_;
};

/// Builds the code for q(k) = c k^-lambda. Throws ValidationError for
/// lambda <= 1 (divergent series) and when the normalizer cannot be pinned
/// down within `tol`.
ZipfCode zipf_build(double lambda, double tol = 1e-6);

class EliasDeltaCode final : public IntegerCode {
 public:
  unsigned length_of(std::uint64_t k) const override;
  void encode_to(std::uint64_t k, BitString& out) const override;
  std::uint64_t decode(BitReader& in) const override;
};

}  // namespace sfrl
