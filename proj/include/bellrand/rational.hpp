#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace bellrand {

// Exact rational with a positive denominator below 2^62, always reduced.
// Used for input probabilities so that headers, p_min and the sampler
// trees are bit-exact across platforms.
class Rational {
 public:
  static constexpr std::int64_t kMaxDenominator = std::int64_t{1} << 62;

  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  // Accepts "5/8", "3", "0.125", "1e-2". Decimal forms are read exactly.
  static Rational parse(std::string_view text);
  // Exact value of the shortest decimal that round-trips `value`.
  static Rational from_double(double value);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace bellrand
