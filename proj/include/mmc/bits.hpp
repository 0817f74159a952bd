#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mmc {

// Growable bit sequence. Bits are stored MSB-first within each byte, which is
// also the on-disk order.
class BitVector {
 public:
  BitVector() = default;

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const noexcept {
    return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
  }

  void push_back(bool bit) {
    if ((size_ & 7) == 0) bytes_.push_back(0);
    if (bit) bytes_[size_ >> 3] |= static_cast<std::uint8_t>(0x80u >> (size_ & 7));
    ++size_;
  }

  // Appends the low `width` bits of `value`, most significant first.
  void append(std::uint64_t value, int width);
  void append(const BitVector& other, std::size_t count);
  void append(const BitVector& other) { append(other, other.size()); }

  void flip(std::size_t i) noexcept {
    bytes_[i >> 3] ^= static_cast<std::uint8_t>(0x80u >> (i & 7));
  }

  // Keeps only the first n bits.
  void truncate(std::size_t n);

  // Backing bytes; bits past size() in the last byte are zero.
  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count);

  friend bool operator==(const BitVector& a, const BitVector& b) noexcept {
    return a.size_ == b.size_ && a.bytes_ == b.bytes_;
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

// Sequential reader over a BitVector that refuses to read past `limit`.
class BitReader {
 public:
  explicit BitReader(const BitVector& bits) : BitReader(bits, 0, bits.size()) {}
  BitReader(const BitVector& bits, std::size_t start, std::size_t limit);

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return limit_ - pos_; }

  bool read_bit();
  std::uint64_t read(int width);
  BitVector read_bits(std::size_t count);

 private:
  const BitVector* bits_;
  std::size_t pos_;
  std::size_t limit_;
};

}  // namespace mmc
