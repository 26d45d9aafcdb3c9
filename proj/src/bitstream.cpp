#include "sfrl/bitstream.hpp"

#include <algorithm>

#include "sfrl/error.hpp"

namespace sfrl {

void BitString::push_back(bool bit) {
  if ((size_ & 7) == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (size_ & 7));
  ++size_;
}

void BitString::append(std::uint64_t value, unsigned nbits) {
  if (nbits > 64) throw ValidationError("BitString::append: at most 64 bits at a time");
  for (unsigned i = nbits; i-- > 0;) push_back((value >> i) & 1U);
}

void BitString::append(const BitString& other) {
  for (std::size_t i = 0; i < other.size(); ++i) push_back(other[i]);
}

BitString BitString::from_bytes(std::vector<std::uint8_t> bytes, std::size_t nbits) {
  if (bytes.size() != (nbits + 7) / 8) {
    throw ValidationError("BitString::from_bytes: byte count does not match bit length");
  }
  if (nbits % 8 != 0) {
    // Canonical form keeps padding bits zero.
    bytes.back() &= static_cast<std::uint8_t>(0xFF00U >> (nbits % 8));
  }
  BitString b;
  b.bytes_ = std::move(bytes);
  b.size_ = nbits;
  return b;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) s.push_back((*this)[i] ? '1' : '0');
  return s;
}

BitString BitString::from_string(std::string_view bits) {
  BitString b;
  for (char c : bits) {
    if (c != '0' && c != '1') throw ValidationError("BitString::from_string: expected only 0/1");
    b.push_back(c == '1');
  }
  return b;
}

bool BitString::starts_with(const BitString& prefix) const {
  if (prefix.size() > size_) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if ((*this)[i] != prefix[i]) return false;
  }
  return true;
}

bool BitReader::read_bit() {
  if (pos_ >= bits_->size()) throw FramingError("unexpected end of bit stream", pos_);
  return (*bits_)[pos_++];
}

std::uint64_t BitReader::read_bits(unsigned nbits) {
  if (nbits > 64) throw ValidationError("BitReader::read_bits: at most 64 bits at a time");
  if (remaining() < nbits) throw FramingError("unexpected end of bit stream", bits_->size());
  std::uint64_t v = 0;
  for (unsigned i = 0; i < nbits; ++i) v = (v << 1) | static_cast<std::uint64_t>(read_bit());
  return v;
}

std::vector<std::uint8_t> to_container(const BitString& bits) {
  std::vector<std::uint8_t> out = {'S', 'F', 'R', 'L', kContainerVersion};
  const std::uint64_t n = bits.size();
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(n >> shift));
  out.insert(out.end(), bits.bytes().begin(), bits.bytes().end());
  return out;
}

BitString from_container(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kHeader = 13;
  if (bytes.size() < kHeader) throw FramingError("container shorter than its header", bytes.size() * 8);
  if (bytes[0] != 'S' || bytes[1] != 'F' || bytes[2] != 'R' || bytes[3] != 'L') {
    throw FramingError("bad container magic", 0);
  }
  if (bytes[4] != kContainerVersion) throw FramingError("unsupported container version", 32);
  std::uint64_t n = 0;
  for (std::size_t i = 5; i < kHeader; ++i) n = (n << 8) | bytes[i];
  const std::size_t payload = bytes.size() - kHeader;
  if (n > payload * 8 || (n + 7) / 8 != payload) {
    throw FramingError("container bit length does not match payload size", kHeader * 8);
  }
  return BitString::from_bytes(std::vector<std::uint8_t>(bytes.begin() + kHeader, bytes.end()), n);
}

bool is_prefix_free(const std::vector<BitString>& codewords) {
  std::vector<std::string> s;
  s.reserve(codewords.size());
  for (const auto& c : codewords) s.push_back(c.to_string());
  std::sort(s.begin(), s.end());
  // After sorting, a prefix sits immediately before some string it prefixes.
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].compare(0, s[i - 1].size(), s[i - 1]) == 0) return false;
  }
  return true;
}

}  // namespace sfrl
