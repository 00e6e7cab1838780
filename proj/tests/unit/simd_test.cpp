#include <doctest.h>

#include <bit>
#include <cstring>
#include <random>

#include "bellrand/errors.hpp"
#include "bellrand/simd/kernels.hpp"

using namespace bellrand;

namespace {

std::uint64_t bits_of(double v) { return std::bit_cast<std::uint64_t>(v); }

bool reference_parity(const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& src, std::size_t offset) {
  unsigned acc = 0;
  for (std::size_t i = 0; i < x.size() * 64; ++i) {
    const std::size_t s = offset + i;
    const bool wb = (src[s / 64] >> (s % 64)) & 1U;
    const bool xb = (x[i / 64] >> (i % 64)) & 1U;
    acc ^= wb & xb;
  }
  return acc;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar kernels") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
  CHECK(simd::scalar::dot(a, b) == 35.0);
  CHECK_THROWS_AS(simd::dot(a, std::vector<double>{1.0}), DimensionError);
  std::mt19937_64 g(1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t words = 1 + g() % 5, offset = g() % 300;
    std::vector<std::uint64_t> x(words), src(offset / 64 + words + 1);
    for (auto& w : x) w = g();
    for (auto& w : src) w = g();
    CHECK(simd::scalar::gf2_window_parity(x, src, offset) == reference_parity(x, src, offset));
  }
}

TEST_CASE("levels") {
  CHECK(simd::level_supported(simd::Level::kScalar));
  CHECK(simd::level_name(simd::Level::kScalar) == "scalar");
  const simd::Level before = simd::active_level();
  simd::set_level(simd::Level::kScalar);
  CHECK(simd::active_level() == simd::Level::kScalar);
  simd::set_level(before);
  if (!simd::level_supported(simd::Level::kAvx2)) CHECK_THROWS_AS(simd::set_level(simd::Level::kAvx2), DomainError);
}

#if defined(BELLRAND_HAVE_AVX2)
TEST_CASE("vector kernels agree bit for bit with the scalar ones") {
  if (!simd::level_supported(simd::Level::kAvx2)) return;
  std::mt19937_64 g(2);
  std::normal_distribution<double> nd;
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 16u, 31u, 32u, 33u, 256u, 1001u}) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = nd(g) * 1e3, b[i] = nd(g);
    CHECK(bits_of(simd::avx2::dot(a, b)) == bits_of(simd::scalar::dot(a, b)));
  }
  for (int t = 0; t < 2000; ++t) {
    const std::size_t words = 1 + g() % 12, offset = g() % 1000;
    std::vector<std::uint64_t> x(words), src(offset / 64 + words + 1);
    for (auto& w : x) w = g();
    for (auto& w : src) w = g();
    CHECK(simd::avx2::gf2_window_parity(x, src, offset) == simd::scalar::gf2_window_parity(x, src, offset));
  }
}
#endif

}  // TEST_SUITE
