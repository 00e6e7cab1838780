#include <atomic>

#include "bellrand/errors.hpp"
#include "bellrand/simd/kernels.hpp"

namespace bellrand::simd {
namespace {

bool cpu_has_avx2() {
#if defined(BELLRAND_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<Level>& active() {
  static std::atomic<Level> level{detected_level()};
  return level;
}

}  // namespace

std::string_view level_name(Level level) {
  switch (level) {
    case Level::kScalar: return "scalar";
    case Level::kAvx2: return "avx2";
  }
  return "unknown";
}

bool level_supported(Level level) { return level == Level::kScalar || cpu_has_avx2(); }

Level detected_level() { return cpu_has_avx2() ? Level::kAvx2 : Level::kScalar; }

Level active_level() { return active().load(std::memory_order_relaxed); }

void set_level(Level level) {
  if (!level_supported(level)) throw DomainError("SIMD level not supported: " + std::string(level_name(level)));
  active().store(level, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot of spans of different length");
#if defined(BELLRAND_HAVE_AVX2)
  if (active_level() == Level::kAvx2) return avx2::dot(a, b);
#endif
  return scalar::dot(a, b);
}

bool gf2_window_parity(std::span<const std::uint64_t> x, std::span<const std::uint64_t> src,
                       std::size_t offset) {
  if (src.size() < offset / 64 + x.size() + 1) throw DimensionError("gf2 window exceeds source");
#if defined(BELLRAND_HAVE_AVX2)
  if (active_level() == Level::kAvx2) return avx2::gf2_window_parity(x, src, offset);
#endif
  return scalar::gf2_window_parity(x, src, offset);
}

}  // namespace bellrand::simd
