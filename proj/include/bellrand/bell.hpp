#pragma once

// Bell coefficients, Bell values, the data-driven estimator of the average
// Bell value and its concentration bound.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bellrand/rational.hpp"

namespace bellrand {

struct Alphabets {
  int a = 2;
  int b = 2;
  int x = 2;
  int y = 2;

  std::size_t table_size() const { return static_cast<std::size_t>(a * b * x * y); }
  // Tables are laid out with (x, y) slices contiguous.
  std::size_t index(int ai, int bi, int xi, int yi) const {
    return static_cast<std::size_t>(((xi * y + yi) * a + ai) * b + bi);
  }
  friend bool operator==(const Alphabets&, const Alphabets&) = default;
};

class BellCoefficients {
 public:
  // `table` uses Alphabets::index. i0 must not exceed i_max.
  BellCoefficients(std::string id, Alphabets alphabets, std::vector<double> table, double i0,
                   double i_max);

  const std::string& id() const { return id_; }
  const Alphabets& alphabets() const { return alphabets_; }
  std::span<const double> table() const { return table_; }
  double c(int a, int b, int x, int y) const { return table_[alphabets_.index(a, b, x, y)]; }
  double i0() const { return i0_; }
  double i_max() const { return i_max_; }
  // Signed maximum over the raw coefficients.
  double c_max() const { return c_max_; }

 private:
  std::string id_;
  Alphabets alphabets_;
  std::vector<double> table_;
  double i0_;
  double i_max_;
  double c_max_;
};

// c_abxy = (-1)^(xy) (-1)^(a xor b); I0 = 2, Imax = 2 sqrt 2.
BellCoefficients chsh();

class ConditionalDistribution {
 public:
  // Validates: entries in [0,1] and every (x,y) slice sums to 1 (tol::kProb).
  ConditionalDistribution(Alphabets alphabets, std::vector<double> table);

  const Alphabets& alphabets() const { return alphabets_; }
  std::span<const double> table() const { return table_; }
  double p(int a, int b, int x, int y) const { return table_[alphabets_.index(a, b, x, y)]; }

 private:
  Alphabets alphabets_;
  std::vector<double> table_;
};

class InputDistribution {
 public:
  // probabilities[x * |Y| + y]; must sum to exactly 1.
  InputDistribution(int x_size, int y_size, std::vector<Rational> probabilities);
  static InputDistribution uniform(int x_size, int y_size);

  int x_size() const { return x_size_; }
  int y_size() const { return y_size_; }
  const Rational& exact(int x, int y) const { return exact_[static_cast<std::size_t>(x * y_size_ + y)]; }
  double p(int x, int y) const { return values_[static_cast<std::size_t>(x * y_size_ + y)]; }
  std::span<const Rational> exact_table() const { return exact_; }
  // Smallest entry; may be zero, in which case estimate/certify refuse.
  const Rational& p_min() const { return p_min_; }

  friend bool operator==(const InputDistribution& a, const InputDistribution& b) {
    return a.x_size_ == b.x_size_ && a.y_size_ == b.y_size_ && a.exact_ == b.exact_;
  }

 private:
  int x_size_;
  int y_size_;
  std::vector<Rational> exact_;
  std::vector<double> values_;
  Rational p_min_;
};

struct RoundRecord {
  int x = 0;
  int y = 0;
  int a = 0;
  int b = 0;
  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct Transcript {
  Alphabets alphabets;
  std::vector<RoundRecord> rounds;
  InputDistribution input_dist = InputDistribution::uniform(2, 2);
  std::string coefficients_id = "chsh";
  std::uint64_t seed = 0;

  std::size_t n() const { return rounds.size(); }
  // Throws DomainError on symbols outside the alphabets or an empty transcript.
  void validate() const;
};

double bell_value(const ConditionalDistribution& p, const BellCoefficients& c);

// Maximum Bell value over deterministic local strategies a = f(x), b = g(y).
// Throws EnumerationLimit if |A|^|X| * |B|^|Y| exceeds 10^6.
double classical_max(const BellCoefficients& c);

// (1/n) sum_j c(a_j, b_j, x_j, y_j) / P_XY(x_j, y_j).
double estimate_ihat(const Transcript& t, const BellCoefficients& c);

// (ln 2 / 2) / (c_max / p_min + I_max).
double concentration_const(double p_min, const BellCoefficients& c);

// min(1, 2^(-c(p_min) eps^2 n)).
double tail_bound(double eps, std::size_t n, double p_min, const BellCoefficients& c);

}  // namespace bellrand
