#include <immintrin.h>

#include <bit>

#include "bellrand/simd/kernels.hpp"

namespace bellrand::simd::avx2 {

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  for (int l = 0; i < n; ++i, ++l) s[l] += a[i] * b[i];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

bool gf2_window_parity(std::span<const std::uint64_t> x, std::span<const std::uint64_t> src,
                       std::size_t offset) {
  const std::size_t base = offset / 64;
  const unsigned r = offset % 64;
  // Shift counts of 64 give zero, which is exactly the r == 0 case.
  const __m128i lo = _mm_cvtsi32_si128(static_cast<int>(r));
  const __m128i hi = _mm_cvtsi32_si128(static_cast<int>(64 - r));
  __m256i acc = _mm256_setzero_si256();
  std::size_t k = 0;
  for (; k + 4 <= x.size(); k += 4) {
    const auto* p = reinterpret_cast<const __m256i*>(src.data() + base + k);
    const auto* q = reinterpret_cast<const __m256i*>(src.data() + base + k + 1);
    __m256i w = _mm256_or_si256(_mm256_srl_epi64(_mm256_loadu_si256(p), lo),
                                _mm256_sll_epi64(_mm256_loadu_si256(q), hi));
    __m256i xv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x.data() + k));
    acc = _mm256_xor_si256(acc, _mm256_and_si256(xv, w));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::uint64_t t = lanes[0] ^ lanes[1] ^ lanes[2] ^ lanes[3];
  for (; k < x.size(); ++k) {
    std::uint64_t w = src[base + k] >> r;
    if (r != 0) w |= src[base + k + 1] << (64 - r);
    t ^= x[k] & w;
  }
  return std::popcount(t) & 1;
}

}  // namespace bellrand::simd::avx2
