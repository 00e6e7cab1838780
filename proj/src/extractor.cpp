#include "bellrand/extractor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <set>
#include <string>

#include "bellrand/errors.hpp"
#include "bellrand/rng.hpp"
#include "bellrand/simd/kernels.hpp"

namespace bellrand {

void ExtractorParams::validate() const {
  if (n_in == 0) throw DomainError("extractor input length must be positive");
  if (xi > n_in) throw DomainError("extractor output longer than its input");
  if (!(eps_ext > 0.0 && eps_ext < 1.0)) throw DomainError("eps_ext must lie in (0, 1)");
}

double required_entropy(std::size_t xi, double eps_ext) {
  if (!(eps_ext > 0.0 && eps_ext < 1.0)) throw DomainError("eps_ext must lie in (0, 1)");
  return static_cast<double>(xi) + 2.0 * std::log2(1.0 / eps_ext);
}

std::size_t output_length(double minentropy_bound, double eps_ext) {
  if (!(eps_ext > 0.0 && eps_ext < 1.0)) throw DomainError("eps_ext must lie in (0, 1)");
  if (std::isnan(minentropy_bound)) throw DomainError("min-entropy bound is NaN");
  const double v = std::floor(minentropy_bound - 2.0 * std::log2(1.0 / eps_ext));
  return v > 0.0 ? static_cast<std::size_t>(v) : 0;
}

BitString toeplitz_extract(const BitString& x, const BitString& seed, const ExtractorParams& p) {
  p.validate();
  if (x.size() != p.n_in) throw DimensionError("extractor input has length " + std::to_string(x.size()));
  if (seed.size() != p.seed_length()) throw DimensionError("extractor seed has length " + std::to_string(seed.size()));
  BitString out(p.xi);
  if (p.xi == 0) return out;
  // Row i of T read left to right is the reversed seed starting at xi-1-i.
  const BitString r = seed.reversed();
  std::vector<std::uint64_t> src(r.words().begin(), r.words().end());
  src.resize(src.size() + 2, 0);
  const auto xw = x.words();
  for (std::size_t i = 0; i < p.xi; ++i) out.set(i, simd::gf2_window_parity(xw, src, p.xi - 1 - i));
  return out;
}

double exact_distance_to_uniform(const OutputJoint& joint) {
  if (joint.xi > 16 || joint.side_size > (std::size_t{1} << 16) || joint.side_size == 0)
    throw EnumerationLimit("distance computation is capped at 2^16 outputs and side values");
  const std::size_t nz = std::size_t{1} << joint.xi;
  if (joint.prob.size() != nz * joint.side_size) throw DimensionError("joint table has the wrong size");
  std::vector<double> pe(joint.side_size, 0.0);
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t e = 0; e < joint.side_size; ++e) pe[e] += joint.prob[z * joint.side_size + e];
  const double u = 1.0 / static_cast<double>(nz);
  double d = 0.0;
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t e = 0; e < joint.side_size; ++e) d += std::abs(joint.prob[z * joint.side_size + e] - u * pe[e]);
  return d / 2.0;
}

BitString encode_outputs(const Transcript& t) {
  auto width = [](int size) {
    int w = 0;
    while ((1 << w) < size) ++w;
    return w;
  };
  const int wa = width(t.alphabets.a), wb = width(t.alphabets.b);
  BitString out;
  for (const auto& r : t.rounds) {
    for (int k = wa - 1; k >= 0; --k) out.push_back((r.a >> k) & 1);
    for (int k = wb - 1; k >= 0; --k) out.push_back((r.b >> k) & 1);
  }
  return out;
}

}  // namespace bellrand

namespace bellrand {
namespace {

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Seed-averaged distance for the flat source on the set bits of `mask`.
double flat_source_distance(std::uint64_t mask, const ExtractorParams& p, const std::vector<std::vector<std::uint32_t>>& hash) {
  const std::size_t seeds = std::size_t{1} << p.seed_length();
  const std::size_t nz = std::size_t{1} << p.xi;
  OutputJoint j;
  j.xi = p.xi;
  j.side_size = seeds;
  j.prob.assign(nz * seeds, 0.0);
  const double w = 1.0 / static_cast<double>(std::popcount(mask)) / static_cast<double>(seeds);
  for (std::size_t x = 0; x < (std::size_t{1} << p.n_in); ++x) {
    if (!((mask >> x) & 1U)) continue;
    for (std::size_t s = 0; s < seeds; ++s) j.prob[hash[s][x] * seeds + s] += w;
  }
  return exact_distance_to_uniform(j);
}

}  // namespace

LeftoverHashResult leftover_hash_check(std::size_t n_in, std::size_t xi, std::size_t k, std::size_t random_sources,
                                       std::uint64_t seed) {
  if (n_in == 0 || n_in > 6) throw EnumerationLimit("leftover-hash check supports 1 <= n_in <= 6");
  if (xi == 0 || xi > n_in || k > n_in) throw DomainError("leftover-hash check needs 0 < xi <= n_in and k <= n_in");
  ExtractorParams p{n_in, xi, 0.5};
  const std::size_t points = std::size_t{1} << n_in, seeds = std::size_t{1} << p.seed_length();
  const std::size_t size = std::size_t{1} << k;

  // hash[s][x]: output of seed s on input x, as an integer with bit i = out_i.
  std::vector<std::vector<std::uint32_t>> hash(seeds, std::vector<std::uint32_t>(points));
  for (std::size_t s = 0; s < seeds; ++s) {
    BitString sb(p.seed_length());
    for (std::size_t i = 0; i < p.seed_length(); ++i) sb.set(i, (s >> i) & 1U);
    for (std::size_t x = 0; x < points; ++x) {
      BitString xb(n_in);
      for (std::size_t i = 0; i < n_in; ++i) xb.set(i, (x >> i) & 1U);
      const BitString z = toeplitz_extract(xb, sb, p);
      std::uint32_t v = 0;
      for (std::size_t i = 0; i < xi; ++i) v |= static_cast<std::uint32_t>(z[i]) << i;
      hash[s][x] = v;
    }
  }

  LeftoverHashResult r;
  r.n_in = n_in;
  r.xi = xi;
  r.k = k;
  r.bound = 0.5 * std::sqrt(std::exp2(static_cast<double>(xi) - static_cast<double>(k)));
  auto check = [&](std::uint64_t mask) {
    ++r.sources_checked;
    r.worst_distance = std::max(r.worst_distance, flat_source_distance(mask, p, hash));
  };

  if (binomial(points, size) <= static_cast<double>(std::size_t{1} << 20)) {
    r.exhaustive = true;
    // Gosper's hack over all masks with `size` bits out of `points`.
    std::uint64_t m = size == 64 ? ~0ULL : (1ULL << size) - 1;
    for (;;) {
      check(m);
      if (size == points) break;
      const std::uint64_t c = m & (~m + 1), next = m + c;
      if (next == 0) break;
      m = (((next ^ m) >> 2) / c) | next;
      if (points < 64 && (m >> points) != 0) break;
    }
    return r;
  }

  // Affine subspaces of dimension k: spans of k independent vectors, then cosets.
  std::set<std::uint64_t> linear, affine;
  std::vector<std::size_t> pick(k);
  auto span_mask = [&](const std::vector<std::size_t>& basis) {
    std::vector<std::size_t> elems{0};
    for (auto v : basis) {
      const std::size_t cnt = elems.size();
      for (std::size_t i = 0; i < cnt; ++i) elems.push_back(elems[i] ^ v);
    }
    std::uint64_t mask = 0;
    for (auto e : elems) mask |= 1ULL << e;
    return mask;
  };
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t from) {
    if (depth == k) {
      const std::uint64_t m = span_mask(pick);
      if (static_cast<std::size_t>(std::popcount(m)) == size) linear.insert(m);
      return;
    }
    for (std::size_t v = from; v < points; ++v) {
      pick[depth] = v;
      rec(depth + 1, v + 1);
    }
  };
  rec(0, 1);
  for (auto m : linear)
    for (std::size_t t = 0; t < points; ++t) {
      std::uint64_t shifted = 0;
      for (std::size_t e = 0; e < points; ++e)
        if ((m >> e) & 1U) shifted |= 1ULL << (e ^ t);
      affine.insert(shifted);
    }
  for (auto m : affine) check(m);

  Rng rng(seed);
  std::vector<std::size_t> perm(points);
  for (std::size_t i = 0; i < random_sources; ++i) {
    for (std::size_t e = 0; e < points; ++e) perm[e] = e;
    std::uint64_t mask = 0;
    for (std::size_t e = 0; e < size; ++e) {
      const auto j = e + static_cast<std::size_t>(rng.below(points - e));
      std::swap(perm[e], perm[j]);
      mask |= 1ULL << perm[e];
    }
    check(mask);
  }
  return r;
}

}  // namespace bellrand
