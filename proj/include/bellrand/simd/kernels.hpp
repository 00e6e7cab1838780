#pragma once

// Data-parallel inner loops. Every kernel has a portable scalar reference in
// namespace `scalar`; vector variants live in their own namespaces and are
// only compiled when the toolchain can target them. The unqualified entry
// points dispatch on the level chosen at startup (or forced via set_level).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace bellrand::simd {

enum class Level { kScalar, kAvx2 };

std::string_view level_name(Level level);

// Best level this CPU and build support.
Level detected_level();
Level active_level();
// Throws DomainError if the level is not supported here.
void set_level(Level level);
bool level_supported(Level level);

// Sum of a[i] * b[i]. a.size() == b.size().
double dot(std::span<const double> a, std::span<const double> b);

// Parity of popcount(x & W) where W is the |x|*64-bit window of `src`
// starting at bit `offset`. `src` must hold at least offset/64 + |x| + 1
// words; bits of x beyond the logical length must be zero.
bool gf2_window_parity(std::span<const std::uint64_t> x, std::span<const std::uint64_t> src,
                       std::size_t offset);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
bool gf2_window_parity(std::span<const std::uint64_t> x, std::span<const std::uint64_t> src,
                       std::size_t offset);
}  // namespace scalar

#if defined(BELLRAND_HAVE_AVX2)
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
bool gf2_window_parity(std::span<const std::uint64_t> x, std::span<const std::uint64_t> src,
                       std::size_t offset);
}  // namespace avx2
#endif

}  // namespace bellrand::simd
