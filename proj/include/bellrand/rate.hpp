#pragma once

// Rate functions (certified bits per round as a function of the Bell
// value), interval partitions and the min-entropy certifier.

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bellrand/bell.hpp"
#include "bellrand/rational.hpp"

namespace bellrand {

class RateFunction {
 public:
  // Checks nonnegativity and monotonicity on a dense grid, and midpoint
  // convexity when `convex` is set; throws DomainError otherwise.
  RateFunction(std::string name, std::function<double(double)> evaluator, double lo, double hi,
               bool convex);

  const std::string& name() const { return name_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool convex() const { return convex_; }

  // Below the domain the rate is 0; above hi (beyond 1e-9) is a DomainError.
  double operator()(double bell_value) const;

 private:
  std::string name_;
  std::function<double(double)> evaluator_;
  double lo_;
  double hi_;
  bool convex_;
};

// I -> max(0, 1 - log2(1 + sqrt(2 - I^2 / 4))) on [2, 2 sqrt 2]; convex.
RateFunction chsh_analytic_rate();

struct EnvelopeGrid {
  int state_weights = 21;  // w in {0, 1/20, ..., 1}: sqrt(w)|singlet> + sqrt(1-w)|00>
  int angle_steps = 24;    // projective measurements in the x-z plane, 2 pi / 24 apart
  int bell_points = 1001;  // evaluation grid on [2, 2 sqrt 2]
};

// Grid sample of the single-round worst-case min-entropy. An upper bound on
// h at each grid point, not a certified computation.
struct RateEnvelope {
  std::vector<double> bell;   // ascending grid
  std::vector<double> hmin;   // hmin[k] = min over configs with Bell >= bell[k]
  std::size_t configurations = 0;
};

RateEnvelope brute_force_envelope(std::pair<int, int> dims, const EnvelopeGrid& grid = {});
// Envelope as a (non-convex) RateFunction named "brute-force-envelope".
RateFunction brute_force_rate(std::pair<int, int> dims, const EnvelopeGrid& grid = {});

// Piecewise-linear rate through (I, bits) rows, sorted by I. The convexity
// flag is set only if the slopes are nondecreasing.
RateFunction rate_from_table(std::string name, std::vector<std::pair<double, double>> rows);
// Reads tab-separated "I<TAB>bits" rows ('#' comments allowed).
RateFunction load_rate_table(const std::string& path);

// Names: "chsh-analytic", "brute-force-envelope", "table:<path>".
RateFunction rate_by_name(const std::string& name);

class IntervalPartition {
 public:
  // boundaries J_0 <= ... <= J_{m-1}; J_0 == i0 and J_{m-1} <= i_max.
  IntervalPartition(std::vector<double> boundaries, double i0, double i_max);
  static IntervalPartition chsh_default();  // {2, 2.2, 2.4, 2.6}

  std::size_t m() const { return boundaries_.size(); }
  double boundary(std::size_t ell) const { return boundaries_[ell]; }
  const std::vector<double>& boundaries() const { return boundaries_; }
  double i0() const { return boundaries_.front(); }
  double i_max() const { return i_max_; }

 private:
  std::vector<double> boundaries_;
  double i_max_;
};

// The ell with i_hat - eps in block ell; 0 below the range, m-1 above.
std::size_t assign_interval(double i_hat, double eps, const IntervalPartition& p);

struct CertificationParams {
  double eps = 0.05;
  double delta = 0.01;

  void validate() const;
};

struct CertificationReport {
  std::size_t n = 0;
  double i_hat = 0.0;
  std::size_t ell = 0;
  std::vector<double> partition;
  double eps = 0.0;
  double delta = 0.0;
  Rational p_min;
  std::string rate_name;
  double rate_at_boundary = 0.0;  // f(J_ell)
  double minentropy_bound = 0.0;  // n f(J_ell) - delta n - 1
  double failure_prob_bound = 1.0;
  bool vacuous = true;            // minentropy_bound <= 0
};

// Requires a convex rate and full-support iid inputs.
CertificationReport certify(const Transcript& t, const BellCoefficients& c, const RateFunction& rate,
                            const IntervalPartition& p, const CertificationParams& params);

// min(1, m 2^(-delta n) + 3 2^(-c(p_min) eps^2 n)).
double certification_failure_bound(std::size_t m, std::size_t n, double p_min, double eps,
                                   double delta, const BellCoefficients& c);

}  // namespace bellrand
