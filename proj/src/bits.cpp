#include "mmc/bits.hpp"

#include <algorithm>

#include "mmc/error.hpp"

namespace mmc {

void BitVector::append(std::uint64_t value, int width) {
  for (int b = width - 1; b >= 0; --b) push_back((value >> b) & 1u);
}

void BitVector::append(const BitVector& other, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) push_back(other[i]);
}

void BitVector::truncate(std::size_t n) {
  if (n >= size_) return;
  size_ = n;
  bytes_.resize((n + 7) / 8);
  if (n & 7) bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - (n & 7)));
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
  if (bit_count > bytes.size() * 8) {
    throw Error(ErrorCode::kTruncatedStream, "bit count exceeds the supplied bytes");
  }
  BitVector out;
  out.bytes_.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>((bit_count + 7) / 8));
  out.size_ = bit_count;
  if (bit_count & 7) out.bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - (bit_count & 7)));
  return out;
}

BitReader::BitReader(const BitVector& bits, std::size_t start, std::size_t limit)
    : bits_(&bits), pos_(start), limit_(std::min(limit, bits.size())) {
  if (start > limit_) throw Error(ErrorCode::kTruncatedStream, "reader starts past its limit");
}

bool BitReader::read_bit() {
  if (pos_ >= limit_) throw Error(ErrorCode::kTruncatedStream, "read past end of bitstream");
  return (*bits_)[pos_++];
}

std::uint64_t BitReader::read(int width) {
  if (static_cast<std::size_t>(width) > remaining()) {
    throw Error(ErrorCode::kTruncatedStream, "read past end of bitstream");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>((*bits_)[pos_++]);
  return v;
}

BitVector BitReader::read_bits(std::size_t count) {
  if (count > remaining()) throw Error(ErrorCode::kTruncatedStream, "read past end of bitstream");
  BitVector out;
  for (std::size_t i = 0; i < count; ++i) out.push_back((*bits_)[pos_++]);
  return out;
}

}  // namespace mmc
