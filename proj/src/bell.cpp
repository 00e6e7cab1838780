#include "bellrand/bell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bellrand/errors.hpp"
#include "bellrand/qmath.hpp"
#include "bellrand/simd/kernels.hpp"

namespace bellrand {
namespace {

void check_alphabets(const Alphabets& al) {
  if (al.a <= 0 || al.b <= 0 || al.x <= 0 || al.y <= 0) throw DimensionError("alphabet sizes must be positive");
}

}  // namespace

BellCoefficients::BellCoefficients(std::string id, Alphabets alphabets, std::vector<double> table, double i0,
                                   double i_max)
    : id_(std::move(id)), alphabets_(alphabets), table_(std::move(table)), i0_(i0), i_max_(i_max) {
  check_alphabets(alphabets_);
  if (table_.size() != alphabets_.table_size()) throw DimensionError("coefficient table has the wrong size");
  for (double v : table_)
    if (!std::isfinite(v)) throw DomainError("coefficient table has a non-finite entry");
  if (!(i0_ <= i_max_)) throw DomainError("classical bound exceeds quantum maximum");
  c_max_ = *std::max_element(table_.begin(), table_.end());
}

BellCoefficients chsh() {
  Alphabets al;
  std::vector<double> t(al.table_size());
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) t[al.index(a, b, x, y)] = ((x & y) ? -1.0 : 1.0) * ((a ^ b) ? -1.0 : 1.0);
  return BellCoefficients("chsh", al, std::move(t), 2.0, 2.0 * std::sqrt(2.0));
}

ConditionalDistribution::ConditionalDistribution(Alphabets alphabets, std::vector<double> table)
    : alphabets_(alphabets), table_(std::move(table)) {
  check_alphabets(alphabets_);
  if (table_.size() != alphabets_.table_size()) throw DimensionError("conditional distribution has the wrong size");
  const std::size_t slice = static_cast<std::size_t>(alphabets_.a * alphabets_.b);
  for (std::size_t s = 0; s < table_.size(); s += slice) {
    double sum = 0.0;
    for (std::size_t i = s; i < s + slice; ++i) {
      if (!(table_[i] >= -tol::kProb && table_[i] <= 1.0 + tol::kProb))
        throw DomainError("conditional probability outside [0, 1]");
      sum += table_[i];
    }
    if (std::abs(sum - 1.0) > tol::kProb) throw DomainError("conditional distribution slice does not sum to 1");
  }
}

InputDistribution::InputDistribution(int x_size, int y_size, std::vector<Rational> probabilities)
    : x_size_(x_size), y_size_(y_size), exact_(std::move(probabilities)) {
  if (x_size <= 0 || y_size <= 0) throw DimensionError("input alphabet sizes must be positive");
  if (exact_.size() != static_cast<std::size_t>(x_size * y_size)) throw DimensionError("input distribution has the wrong size");
  Rational sum(0);
  p_min_ = exact_.front();
  for (const auto& p : exact_) {
    if (p < Rational(0)) throw DomainError("negative input probability");
    sum = sum + p;
    p_min_ = std::min(p_min_, p);
    values_.push_back(p.to_double());
  }
  if (sum != Rational(1)) throw DomainError("input distribution sums to " + sum.to_string() + ", not 1");
}

InputDistribution InputDistribution::uniform(int x_size, int y_size) {
  return InputDistribution(x_size, y_size,
                           std::vector<Rational>(static_cast<std::size_t>(x_size * y_size), Rational(1, x_size * y_size)));
}

void Transcript::validate() const {
  check_alphabets(alphabets);
  if (rounds.empty()) throw DomainError("empty transcript");
  if (input_dist.x_size() != alphabets.x || input_dist.y_size() != alphabets.y)
    throw DimensionError("input distribution does not match the input alphabets");
  for (std::size_t j = 0; j < rounds.size(); ++j) {
    const auto& r = rounds[j];
    if (r.x < 0 || r.x >= alphabets.x || r.y < 0 || r.y >= alphabets.y || r.a < 0 || r.a >= alphabets.a || r.b < 0 ||
        r.b >= alphabets.b)
      throw DomainError("symbol out of range in round " + std::to_string(j + 1));
  }
}

double bell_value(const ConditionalDistribution& p, const BellCoefficients& c) {
  if (!(p.alphabets() == c.alphabets())) throw DimensionError("distribution and coefficients use different alphabets");
  return simd::dot(p.table(), c.table());
}

double classical_max(const BellCoefficients& c) {
  const Alphabets& al = c.alphabets();
  const double fa = std::pow(static_cast<double>(al.a), al.x), gb = std::pow(static_cast<double>(al.b), al.y);
  if (fa * gb > 1e6) throw EnumerationLimit("too many deterministic strategies to enumerate");
  const auto nf = static_cast<long>(fa), ng = static_cast<long>(gb);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> f(static_cast<std::size_t>(al.x)), g(static_cast<std::size_t>(al.y));
  for (long fi = 0; fi < nf; ++fi) {
    long t = fi;
    for (auto& v : f) v = static_cast<int>(t % al.a), t /= al.a;
    for (long gi = 0; gi < ng; ++gi) {
      long u = gi;
      for (auto& v : g) v = static_cast<int>(u % al.b), u /= al.b;
      double s = 0.0;
      for (int x = 0; x < al.x; ++x)
        for (int y = 0; y < al.y; ++y) s += c.c(f[static_cast<std::size_t>(x)], g[static_cast<std::size_t>(y)], x, y);
      best = std::max(best, s);
    }
  }
  return best;
}

double estimate_ihat(const Transcript& t, const BellCoefficients& c) {
  t.validate();
  if (!(t.alphabets == c.alphabets())) throw DimensionError("transcript and coefficients use different alphabets");
  if (t.input_dist.p_min() <= Rational(0)) throw DomainError("input distribution must have full support");
  double sum = 0.0;
  for (const auto& r : t.rounds) sum += c.c(r.a, r.b, r.x, r.y) / t.input_dist.p(r.x, r.y);
  return sum / static_cast<double>(t.n());
}

double concentration_const(double p_min, const BellCoefficients& c) {
  if (!(p_min > 0.0 && p_min <= 1.0)) throw DomainError("p_min must lie in (0, 1]");
  return (std::log(2.0) / 2.0) / (c.c_max() / p_min + c.i_max());
}

double tail_bound(double eps, std::size_t n, double p_min, const BellCoefficients& c) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (n == 0) throw DomainError("n must be positive");
  const double e = concentration_const(p_min, c) * eps * eps * static_cast<double>(n);
  return std::min(1.0, std::exp2(-e));
}

}  // namespace bellrand
