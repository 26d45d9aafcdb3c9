#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sfrl/bitstream.hpp"
#include "sfrl/probspace.hpp"

namespace sfrl {

/// Canonical Huffman code for a finite pmf. Merges break ties by
/// (probability, lowest symbol index), so equal pmfs give equal codes.
/// Zero-mass symbols get no codeword; a pmf with a single positive symbol
/// gets the empty codeword.
class HuffmanCode {
 public:
  explicit HuffmanCode(const Distribution& pmf);

  std::size_t alphabet_size() const { return lengths_.size(); }
  bool has_codeword(std::size_t symbol) const { return present_[symbol]; }
  unsigned length_of(std::size_t symbol) const;
  BitString codeword(std::size_t symbol) const;
  const std::vector<unsigned>& lengths() const { return lengths_; }
  /// Expected length under the design pmf.
  double expected_length() const { return expected_length_; }

  /// Throws DomainError for zero-mass symbols.
  void encode_to(std::size_t symbol, BitString& out) const;
  BitString encode(std::size_t symbol) const;
  /// Throws FramingError on a truncated or invalid stream.
  std::size_t decode(BitReader& in) const;

 private:
  std::vector<unsigned> lengths_;
  std::vector<std::uint64_t> codes_;
  std::vector<bool> present_;
  // Canonical order (length, symbol) for decoding.
  std::vector<std::size_t> order_;
  double expected_length_ = 0.0;
};

HuffmanCode huffman_build(const Distribution& pmf);

}  // namespace sfrl
