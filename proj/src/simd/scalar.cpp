#include <bit>

#include "bellrand/simd/kernels.hpp"

namespace bellrand::simd::scalar {

// Four interleaved partial sums, combined as (s0 + s1) + (s2 + s3). The
// vector variants accumulate in the same order so results match bit for bit.
double dot(std::span<const double> a, std::span<const double> b) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) s[l] += a[i + l] * b[i + l];
  for (int l = 0; i < n; ++i, ++l) s[l] += a[i] * b[i];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

bool gf2_window_parity(std::span<const std::uint64_t> x, std::span<const std::uint64_t> src,
                       std::size_t offset) {
  const std::size_t base = offset / 64;
  const unsigned r = offset % 64;
  std::uint64_t acc = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::uint64_t w = src[base + k] >> r;
    if (r != 0) w |= src[base + k + 1] << (64 - r);
    acc ^= x[k] & w;
  }
  return std::popcount(acc) & 1;
}

}  // namespace bellrand::simd::scalar
