#include "bellrand/rational.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "bellrand/errors.hpp"

namespace bellrand {
namespace {

using Wide = __int128;

Wide gcd_wide(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Wide pow10_wide(int e) {
  Wide r = 1;
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  *this = from_wide(num, den);
}

Rational Rational::from_wide(Wide num, Wide den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = gcd_wide(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (den >= kMaxDenominator) throw DomainError("rational denominator out of range");
  const Wide lim = Wide{INT64_MAX};
  if (num > lim || num < -lim) throw DomainError("rational numerator out of range");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational { throw DomainError("not a rational: '" + std::string(text) + "'"); };
  if (text.empty()) return fail();
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    std::int64_t n = 0, d = 0;
    auto lhs = text.substr(0, slash), rhs = text.substr(slash + 1);
    auto r1 = std::from_chars(lhs.data(), lhs.data() + lhs.size(), n);
    auto r2 = std::from_chars(rhs.data(), rhs.data() + rhs.size(), d);
    if (r1.ec != std::errc{} || r1.ptr != lhs.data() + lhs.size() || r2.ec != std::errc{} ||
        r2.ptr != rhs.data() + rhs.size() || d <= 0)
      return fail();
    return Rational(n, d);
  }
  // Decimal: [-]digits[.digits][e[+-]digits]
  std::size_t i = 0;
  bool neg = false;
  if (text[i] == '-' || text[i] == '+') neg = text[i++] == '-';
  Wide mant = 0;
  int frac_digits = 0;
  bool any = false, dot = false;
  for (; i < text.size(); ++i) {
    char ch = text[i];
    if (ch >= '0' && ch <= '9') {
      if (mant > Wide{1} << 100) return fail();
      mant = mant * 10 + (ch - '0');
      if (dot) ++frac_digits;
      any = true;
    } else if (ch == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) return fail();
  int exp10 = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') return fail();
    ++i;
    auto rest = text.substr(i);
    if (!rest.empty() && rest[0] == '+') rest.remove_prefix(1);
    auto r = std::from_chars(rest.data(), rest.data() + rest.size(), exp10);
    if (r.ec != std::errc{} || r.ptr != rest.data() + rest.size()) return fail();
  }
  int e = exp10 - frac_digits;
  if (e > 30 || e < -30) return fail();
  Wide num = neg ? -mant : mant;
  if (e >= 0) return from_wide(num * pow10_wide(e), 1);
  return from_wide(num, pow10_wide(-e));
}

Rational Rational::from_double(double value) {
  if (!std::isfinite(value)) throw DomainError("rational from non-finite value");
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, value);
  return parse(std::string_view(buf, static_cast<std::size_t>(r.ptr - buf)));
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::from_wide(Wide{a.num_} * b.den_ + Wide{b.num_} * a.den_, Wide{a.den_} * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) {
  return Rational::from_wide(Wide{a.num_} * b.den_ - Wide{b.num_} * a.den_, Wide{a.den_} * b.den_);
}
Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(Wide{a.num_} * b.num_, Wide{a.den_} * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw DomainError("rational division by zero");
  return Rational::from_wide(Wide{a.num_} * b.den_, Wide{a.den_} * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Wide l = Wide{a.num_} * b.den_, r = Wide{b.num_} * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace bellrand
