#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bellrand {

// Packed bit sequence. Bit i lives in word i / 64 at position i % 64; bits
// past size() are always zero.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t size, bool value = false);

  static BitString from_string(std::string_view digits);
  // MSB-first unpacking of the first `bit_count` bits of `bytes`.
  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool operator[](std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool value);
  void push_back(bool value);
  void append(const BitString& other);
  BitString slice(std::size_t pos, std::size_t len) const;
  BitString reversed() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::size_t popcount() const;

  // MSB-first packing; the last byte is zero padded.
  std::vector<std::uint8_t> to_bytes() const;
  std::string to_string() const;

  friend bool operator==(const BitString& a, const BitString& b) = default;
  friend BitString operator^(const BitString& a, const BitString& b);

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

}  // namespace bellrand
