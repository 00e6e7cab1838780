#pragma once

// Seeded strong extractor by Toeplitz hashing over GF(2).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bellrand/bell.hpp"
#include "bellrand/bits.hpp"

namespace bellrand {

struct ExtractorParams {
  std::size_t n_in = 0;
  std::size_t xi = 0;
  double eps_ext = 1e-6;

  std::size_t seed_length() const { return xi == 0 ? 0 : n_in + xi - 1; }
  void validate() const;
};

// k = xi + 2 log2(1 / eps_ext); 0 < eps_ext < 1.
double required_entropy(std::size_t xi, double eps_ext);
// max(0, floor(bound - 2 log2(1 / eps_ext))).
std::size_t output_length(double minentropy_bound, double eps_ext);

// out_i = XOR_j T(i, j) x_j with T(i, j) = seed[i - j + n_in - 1].
BitString toeplitz_extract(const BitString& x, const BitString& seed, const ExtractorParams& p);

// Classical joint distribution of an xi-bit output Z and side information E
// (seed and anything else), prob[z * side_size + e].
struct OutputJoint {
  std::size_t xi = 0;
  std::size_t side_size = 0;
  std::vector<double> prob;
};

// 1/2 sum_{z,e} |P(z,e) - 2^-xi P(e)|. Supports are capped at 2^16 each.
double exact_distance_to_uniform(const OutputJoint& joint);

struct LeftoverHashResult {
  std::size_t n_in = 0, xi = 0, k = 0;
  std::size_t sources_checked = 0;
  bool exhaustive = false;
  double worst_distance = 0.0;  // seed-averaged, over the checked sources
  double bound = 0.0;           // sqrt(2^(xi - k)) / 2
  bool holds() const { return worst_distance <= bound * (1.0 + 1e-12); }
};

// Exact seed-averaged distance of Toeplitz hashing from uniform for flat
// sources of 2^k points in {0,1}^n_in, n_in <= 6. Every such source is
// checked when there are at most 2^20 of them; otherwise all affine
// subspaces of dimension k plus `random_sources` random subsets.
LeftoverHashResult leftover_hash_check(std::size_t n_in, std::size_t xi, std::size_t k,
                                       std::size_t random_sources = 20000, std::uint64_t seed = 1);

// a_1 b_1 a_2 b_2 ..., each symbol in ceil(log2 |alphabet|) bits, MSB first.
BitString encode_outputs(const Transcript& t);

}  // namespace bellrand
