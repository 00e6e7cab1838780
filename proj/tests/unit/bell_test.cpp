#include <doctest.h>

#include <cmath>
#include <random>

#include "bellrand/bell.hpp"
#include "bellrand/device.hpp"
#include "bellrand/errors.hpp"
#include "frozen_values.hpp"

using namespace bellrand;

namespace {

const Alphabets kChsh{};

ConditionalDistribution random_distribution(std::mt19937_64& g) {
  std::gamma_distribution<double> gd(1.0);
  std::vector<double> t(kChsh.table_size());
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      double s = 0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s += t[kChsh.index(a, b, x, y)] = gd(g);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) t[kChsh.index(a, b, x, y)] /= s;
    }
  return ConditionalDistribution(kChsh, t);
}

InputDistribution random_inputs(std::mt19937_64& g) {
  std::uniform_int_distribution<int> d(1, 40);
  std::vector<std::int64_t> w{d(g), d(g), d(g), d(g)};
  const std::int64_t s = w[0] + w[1] + w[2] + w[3];
  return InputDistribution(2, 2, {Rational(w[0], s), Rational(w[1], s), Rational(w[2], s), Rational(w[3], s)});
}

double expected_round_estimate(const ConditionalDistribution& q, const InputDistribution& in, const BellCoefficients& c) {
  double e = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) e += in.p(x, y) * q.p(a, b, x, y) * c.c(a, b, x, y) / in.p(x, y);
  return e;
}

Transcript transcript_of(std::vector<RoundRecord> rounds) {
  Transcript t;
  t.rounds = std::move(rounds);
  return t;
}

}  // namespace

TEST_SUITE("bell") {

TEST_CASE("chsh coefficients") {
  const BellCoefficients c = chsh();
  CHECK(c.c(0, 0, 0, 0) == 1.0);
  CHECK(c.c(1, 0, 1, 1) == 1.0);
  CHECK(c.c(0, 0, 1, 1) == -1.0);
  CHECK(c.c(1, 0, 0, 0) == -1.0);
  CHECK(c.i0() == 2.0);
  CHECK(c.i_max() == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(c.c_max() == 1.0);
}

TEST_CASE("bell values of reference distributions") {
  const BellCoefficients c = chsh();
  InteractionEngine honest(strategy_honest_chsh(), 1);
  CHECK(bell_value(honest.round_distribution(), c) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-12));

  std::vector<double> zero(16, 0.0), unif(16, 0.25);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) zero[kChsh.index(0, 0, x, y)] = 1.0;
  CHECK(bell_value(ConditionalDistribution(kChsh, zero), c) == 2.0);
  CHECK(bell_value(ConditionalDistribution(kChsh, unif), c) == 0.0);
}

TEST_CASE("conditional distributions are validated") {
  std::vector<double> t(16, 0.25);
  t[0] = 0.5;
  CHECK_THROWS_AS(ConditionalDistribution(kChsh, t), DomainError);
  CHECK_THROWS_AS(ConditionalDistribution(kChsh, std::vector<double>(15, 0.25)), DimensionError);
}

TEST_CASE("classical maximum by enumeration") {
  CHECK(classical_max(chsh()) == 2.0);
  const Alphabets one{1, 1, 1, 1};
  CHECK(classical_max(BellCoefficients("ones", one, {1.0}, 1.0, 1.0)) == 1.0);
  const Alphabets two{1, 1, 2, 3};
  CHECK(classical_max(BellCoefficients("ones6", two, std::vector<double>(6, 1.0), 6.0, 6.0)) == 6.0);

  // Every deterministic strategy, and the a = x restriction in particular.
  const BellCoefficients c = chsh();
  double best_ax = -10;
  for (int f = 0; f < 4; ++f)
    for (int g = 0; g < 4; ++g) {
      std::vector<double> t(16, 0.0);
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) t[kChsh.index((f >> x) & 1, (g >> y) & 1, x, y)] = 1.0;
      const double v = bell_value(ConditionalDistribution(kChsh, t), c);
      CHECK(v <= 2.0);
      if (f == 0b10) best_ax = std::max(best_ax, v);
    }
  CHECK(best_ax <= 2.0);
}

TEST_CASE("estimator examples") {
  const BellCoefficients c = chsh();
  CHECK(estimate_ihat(transcript_of({{0, 0, 0, 0}}), c) == 4.0);
  CHECK(estimate_ihat(transcript_of({{0, 0, 0, 0}, {1, 1, 0, 0}}), c) == 0.0);
  Transcript zero_support = transcript_of({{0, 0, 0, 0}});
  zero_support.input_dist = InputDistribution(2, 2, {Rational(1), Rational(0), Rational(0), Rational(0)});
  CHECK_THROWS_AS(estimate_ihat(zero_support, c), DomainError);
}

TEST_CASE("honest estimator concentrates near the maximal violation") {
  const BellCoefficients c = chsh();
  const InputDistribution uniform = InputDistribution::uniform(2, 2);
  int close = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 g(seed);
    std::vector<std::pair<int, int>> inputs(100000);
    for (auto& in : inputs) in = {static_cast<int>(g() & 1), static_cast<int>((g() >> 1) & 1)};
    RunResult r = run(strategy_honest_chsh(), inputs, uniform, c, seed);
    if (std::abs(estimate_ihat(r.transcript, c) - 2 * std::sqrt(2.0)) <= 0.05) ++close;
  }
  CHECK(close >= 99);
}

TEST_CASE("estimator is unbiased per round by exact summation") {
  std::mt19937_64 g(2024);
  const BellCoefficients c = chsh();
  for (int i = 0; i < 5; ++i) {
    InputDistribution in = random_inputs(g);
    for (int k = 0; k < 20; ++k) {
      ConditionalDistribution q = random_distribution(g);
      CHECK(std::abs(expected_round_estimate(q, in, c) - bell_value(q, c)) <= 1e-12);
    }
  }
}

TEST_CASE("bell value is linear in the distribution") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0, 1);
  const BellCoefficients c = chsh();
  for (int k = 0; k < 50; ++k) {
    ConditionalDistribution p = random_distribution(g), q = random_distribution(g);
    const double lam = u(g);
    std::vector<double> mix(16);
    for (std::size_t i = 0; i < 16; ++i) mix[i] = lam * p.table()[i] + (1 - lam) * q.table()[i];
    CHECK(bell_value(ConditionalDistribution(kChsh, mix), c) ==
          doctest::Approx(lam * bell_value(p, c) + (1 - lam) * bell_value(q, c)).epsilon(1e-12));
  }
}

TEST_CASE("concentration constants") {
  const BellCoefficients c = chsh();
  CHECK(concentration_const(0.25, c) == doctest::Approx(frozen::kConcentrationQuarter).epsilon(1e-12));
  CHECK(concentration_const(0.125, c) == doctest::Approx(frozen::kConcentrationEighth).epsilon(1e-12));
  double prev = concentration_const(0.25, c);
  for (double p = 0.1; p > 1e-9; p /= 10) {
    const double v = concentration_const(p, c);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-9);
  CHECK_THROWS_AS(concentration_const(0.0, c), DomainError);
}

TEST_CASE("tail bound") {
  const BellCoefficients c = chsh();
  CHECK(-std::log2(tail_bound(0.05, 1000000, 0.25, c)) == doctest::Approx(frozen::kTailExponent).epsilon(1e-10));
  CHECK(tail_bound(1e-6, 1, 0.25, c) <= 1.0);
  CHECK(tail_bound(1e-6, 1, 0.25, c) > 0.99);
  CHECK_THROWS_AS(tail_bound(0.05, 0, 0.25, c), DomainError);
}

TEST_CASE("transcript validation") {
  CHECK_THROWS_AS(transcript_of({}).validate(), DomainError);
  CHECK_THROWS_AS(transcript_of({{2, 0, 0, 0}}).validate(), DomainError);
  CHECK_NOTHROW(transcript_of({{1, 1, 1, 1}}).validate());
}

}  // TEST_SUITE
