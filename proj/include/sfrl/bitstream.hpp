#pragma once

// Bit strings packed MSB-first, a sequential reader, and the on-disk
// container: "SFRL", a version byte, the payload bit length as a big-endian
// u64, then the payload bytes with the last byte zero-padded.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sfrl {

class BitString {
 public:
  BitString() = default;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool operator[](std::size_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1U; }

  void push_back(bool bit);
  /// Appends the low `nbits` bits of `value`, most significant first.
  void append(std::uint64_t value, unsigned nbits);
  void append(const BitString& other);

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  static BitString from_bytes(std::vector<std::uint8_t> bytes, std::size_t nbits);

  /// "0101..." rendering and its inverse.
  std::string to_string() const;
  static BitString from_string(std::string_view bits);

  bool starts_with(const BitString& prefix) const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const BitString& bits, std::size_t position = 0)
      : bits_(&bits), pos_(position) {}

  /// Throws FramingError at the end of the stream.
  bool read_bit();
  std::uint64_t read_bits(unsigned nbits);

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bits_->size() - pos_; }
  bool at_end() const { return pos_ >= bits_->size(); }

 private:
  const BitString* bits_;
  std::size_t pos_;
};

inline constexpr std::uint8_t kContainerVersion = 1;

std::vector<std::uint8_t> to_container(const BitString& bits);
/// Throws FramingError on a bad magic, version or length.
BitString from_container(std::span<const std::uint8_t> bytes);

/// True when no string in the list is a proper or equal prefix of another.
bool is_prefix_free(const std::vector<BitString>& codewords);

}  // namespace sfrl
