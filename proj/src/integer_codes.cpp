#include "sfrl/integer_codes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "sfrl/error.hpp"
#include "sfrl/pfr.hpp"

namespace sfrl {

double zipf_params(double info_bits) {
  if (!std::isfinite(info_bits) || info_bits < 0.0) {
    throw ValidationError("zipf_params: information must be finite and nonnegative");
  }
  return 1.0 + 1.0 / (info_bits + kLog2eOverE + 1.0);
}

namespace {

// Bounds on sum_{k > n} k^-lambda from the integrals over [n, inf) and [n+1, inf).
double tail_upper(double lambda, double n) { return std::pow(n, 1.0 - lambda) / (lambda - 1.0); }

double tail_width(double lambda, double n) {
  // (n^{1-l} - (n+1)^{1-l}) / (l-1) without cancellation.
  return std::pow(n, 1.0 - lambda) * -std::expm1((1.0 - lambda) * std::log1p(1.0 / n)) /
         (lambda - 1.0);
}

}  // namespace

ZipfCode zipf_build(double lambda, double tol) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw ValidationError("zipf_build: lambda must exceed 1 for the series to converge");
  }
  ZipfCode code;
  code.lambda_ = lambda;
  const double n = static_cast<double>(ZipfCode::kPartialTerms);
  long double partial = 0.0L;
  for (std::uint64_t k = ZipfCode::kPartialTerms; k >= 1; --k) {
    partial += std::pow(static_cast<long double>(k), -static_cast<long double>(lambda));
  }
  const double total = static_cast<double>(partial) + tail_upper(lambda, n);
  code.norm_c_ = 1.0 / total;
  code.neg_log2_c_ = std::log2(total);
  code.normalization_gap_ = code.norm_c_ * tail_width(lambda, n);
  if (code.normalization_gap_ > tol) {
    throw ValidationError("zipf_build: normalizer uncertainty " +
                          std::to_string(code.normalization_gap_) + " exceeds tol");
  }

  std::uint64_t first = 1;
  while (first <= ZipfCode::kMaxIndex) {
    const unsigned len = code.raw_length(first);
    if (len > 64) break;  // steep codes stop where codewords outgrow 64 bits
    // Largest k with the same length: gallop, then bisect.
    std::uint64_t lo = first;
    std::uint64_t step = 1;
    std::uint64_t hi = first;
    while (hi < ZipfCode::kMaxIndex && code.raw_length(hi) == len) {
      lo = hi;
      hi = std::min(ZipfCode::kMaxIndex, first + step);
      step *= 2;
    }
    if (code.raw_length(hi) == len) {
      lo = hi;
    } else {
      while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (code.raw_length(mid) == len) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
    }
    ZipfCode::LengthClass cls{len, first, lo, 0};
    if (!code.classes_.empty()) {
      const auto& prev = code.classes_.back();
      cls.first_code = (prev.first_code + (prev.last_k - prev.first_k + 1)) << (len - prev.length);
    }
    const std::uint64_t count = cls.last_k - cls.first_k + 1;
    if (len < 64 && cls.first_code + count > (std::uint64_t{1} << len)) {
      throw ValidationError("zipf_build: code space exhausted (Kraft violated)");
    }
    code.classes_.push_back(cls);
    code.max_index_ = lo;
    if (lo == ZipfCode::kMaxIndex) break;
    first = lo + 1;
  }
  return code;
}

unsigned ZipfCode::raw_length(std::uint64_t k) const {
  return static_cast<unsigned>(std::ceil(lambda_ * std::log2(static_cast<double>(k)) + neg_log2_c_));
}

unsigned ZipfCode::length_of(std::uint64_t k) const {
  if (k == 0 || k > max_index_) throw DomainError("ZipfCode: index out of range");
  return raw_length(k);
}

void ZipfCode::encode_to(std::uint64_t k, BitString& out) const {
  if (k == 0 || k > max_index_) {
    throw DomainError("ZipfCode: index " + std::to_string(k) + " out of range");
  }
  auto it = std::lower_bound(classes_.begin(), classes_.end(), k,
                             [](const LengthClass& c, std::uint64_t v) { return c.last_k < v; });
  out.append(it->first_code + (k - it->first_k), it->length);
}

std::uint64_t ZipfCode::decode(BitReader& in) const {
  const std::size_t start = in.position();
  std::uint64_t v = 0;
  unsigned len = 0;
  for (const auto& cls : classes_) {
    while (len < cls.length) {
      if (in.at_end()) throw FramingError("truncated Zipf codeword", in.position());
      v = (v << 1) | static_cast<std::uint64_t>(in.read_bit());
      ++len;
    }
    const std::uint64_t count = cls.last_k - cls.first_k + 1;
    if (v - cls.first_code < count) return cls.first_k + (v - cls.first_code);
  }
  throw FramingError("invalid Zipf codeword", start);
}

double ZipfCode::kraft_upper_bound(std::uint64_t partial) const {
  partial = std::clamp<std::uint64_t>(partial, 1, max_index_);
  long double sum = 0.0L;
  for (const auto& cls : classes_) {
    if (cls.first_k > partial) break;
    const std::uint64_t last = std::min(cls.last_k, partial);
    sum += static_cast<long double>(last - cls.first_k + 1) * std::ldexp(1.0L, -static_cast<int>(cls.length));
  }
  // Each remaining codeword has 2^-length <= q(k); bound their q-mass.
  sum += static_cast<long double>(norm_c_) * tail_upper(lambda_, static_cast<double>(partial));
  return static_cast<double>(sum);
}

unsigned EliasDeltaCode::length_of(std::uint64_t k) const {
  if (k == 0) throw DomainError("Elias-delta: index must be positive");
  const unsigned n = static_cast<unsigned>(std::bit_width(k)) - 1;
  const unsigned l = static_cast<unsigned>(std::bit_width(std::uint64_t{n} + 1)) - 1;
  return n + 2 * l + 1;
}

void EliasDeltaCode::encode_to(std::uint64_t k, BitString& out) const {
  if (k == 0) throw DomainError("Elias-delta: index must be positive");
  const unsigned n = static_cast<unsigned>(std::bit_width(k)) - 1;
  const std::uint64_t n1 = std::uint64_t{n} + 1;
  const unsigned l = static_cast<unsigned>(std::bit_width(n1)) - 1;
  out.append(0, l);
  out.append(n1, l + 1);
  if (n > 0) out.append(k & ((std::uint64_t{1} << n) - 1), n);
}

std::uint64_t EliasDeltaCode::decode(BitReader& in) const {
  const std::size_t start = in.position();
  unsigned l = 0;
  while (true) {
    if (in.at_end()) throw FramingError("truncated Elias-delta codeword", in.position());
    if (in.read_bit()) break;
    if (++l > 6) throw FramingError("invalid Elias-delta codeword", start);
  }
  if (in.remaining() < l) throw FramingError("truncated Elias-delta codeword", in.position());
  const std::uint64_t n1 = (std::uint64_t{1} << l) | in.read_bits(l);
  const std::uint64_t n = n1 - 1;
  if (n > 63) throw FramingError("invalid Elias-delta codeword", start);
  if (in.remaining() < n) throw FramingError("truncated Elias-delta codeword", in.position());
  const std::uint64_t low = n > 0 ? in.read_bits(static_cast<unsigned>(n)) : 0;
  return (std::uint64_t{1} << n) | low;
}

}  // namespace sfrl
