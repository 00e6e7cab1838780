#include "bellrand/bits.hpp"

#include <bit>

#include "bellrand/errors.hpp"

namespace bellrand {

BitString::BitString(std::size_t size, bool value) : words_((size + 63) / 64, value ? ~0ULL : 0ULL), size_(size) {
  if (value && size % 64 != 0) words_.back() &= (1ULL << (size % 64)) - 1;
}

BitString BitString::from_string(std::string_view digits) {
  BitString b;
  for (char ch : digits) {
    if (ch != '0' && ch != '1') throw DomainError("bit string may only contain 0 and 1");
    b.push_back(ch == '1');
  }
  return b;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
  if (bit_count > bytes.size() * 8) throw DomainError("bit count exceeds byte length");
  BitString b(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i) b.set(i, (bytes[i / 8] >> (7 - i % 8)) & 1U);
  return b;
}

void BitString::set(std::size_t i, bool value) {
  const std::uint64_t mask = 1ULL << (i % 64);
  if (value)
    words_[i / 64] |= mask;
  else
    words_[i / 64] &= ~mask;
}

void BitString::push_back(bool value) {
  if (size_ % 64 == 0) words_.push_back(0);
  ++size_;
  set(size_ - 1, value);
}

void BitString::append(const BitString& other) {
  for (std::size_t i = 0; i < other.size_; ++i) push_back(other[i]);
}

BitString BitString::slice(std::size_t pos, std::size_t len) const {
  if (pos + len > size_) throw DomainError("bit slice out of range");
  BitString b(len);
  for (std::size_t i = 0; i < len; ++i) b.set(i, (*this)[pos + i]);
  return b;
}

BitString BitString::reversed() const {
  BitString b(size_);
  for (std::size_t i = 0; i < size_; ++i) b.set(i, (*this)[size_ - 1 - i]);
  return b;
}

std::size_t BitString::popcount() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::uint8_t> BitString::to_bytes() const {
  std::vector<std::uint8_t> out((size_ + 7) / 8, 0);
  for (std::size_t i = 0; i < size_; ++i)
    if ((*this)[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  return out;
}

std::string BitString::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i)
    if ((*this)[i]) s[i] = '1';
  return s;
}

BitString operator^(const BitString& a, const BitString& b) {
  if (a.size_ != b.size_) throw DimensionError("xor of bit strings of different length");
  BitString r = a;
  for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] ^= b.words_[i];
  return r;
}

}  // namespace bellrand
