#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bellrand {

std::uint64_t splitmix64(std::uint64_t x);

// Labeled derivation of independent per-component seeds from one global seed.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view label);

// Deterministic stream. mt19937_64 is fully specified by the standard, and
// the conversion to doubles is done here rather than by a std distribution,
// so the stream is identical on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on {0, ..., bound - 1}; bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace bellrand
