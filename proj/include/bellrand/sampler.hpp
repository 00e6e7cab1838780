#pragma once

// Knuth-Yao sampling of q-biased iid inputs from a stream of fair bits,
// with exact accounting of every bit drawn.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "bellrand/bell.hpp"
#include "bellrand/bits.hpp"
#include "bellrand/rational.hpp"
#include "bellrand/rng.hpp"

namespace bellrand {

class BitSource {
 public:
  virtual ~BitSource() = default;

  // Throws SourceExhausted once the underlying bits run out.
  int next_bit();
  std::uint64_t consumed() const { return consumed_; }

 protected:
  // Returns 0/1, or -1 when exhausted.
  virtual int produce() = 0;

 private:
  std::uint64_t consumed_ = 0;
};

// Unbounded deterministic bits (MSB-first from mt19937_64 words).
class SeededBitSource final : public BitSource {
 public:
  explicit SeededBitSource(std::uint64_t seed) : rng_(seed) {}

 protected:
  int produce() override;

 private:
  Rng rng_;
  std::uint64_t word_ = 0;
  int left_ = 0;
};

// Finite source over a fixed bit string.
class BitStringSource final : public BitSource {
 public:
  explicit BitStringSource(BitString bits) : bits_(std::move(bits)) {}
  static BitStringSource from_bytes(std::span<const std::uint8_t> bytes);

  std::size_t remaining() const { return bits_.size() - pos_; }

 protected:
  int produce() override;

 private:
  BitString bits_;
  std::size_t pos_ = 0;
};

// Discrete distribution generating tree. Leaves at depth k are the outcomes
// whose probability has bit k set, ordered by outcome index; bit 0 selects
// the left child. Probabilities are given as 64-bit fixed point, so the
// tree is truncated at depth 64; nodes still internal there become leaves
// for outcome 0.
class DdgTree {
 public:
  static constexpr int kMaxDepth = 64;

  // mass[i] = floor(p_i 2^64); sum(mass) <= 2^64.
  static DdgTree from_fixed_point(std::vector<std::uint64_t> mass);
  // Exact probabilities summing to 1.
  static DdgTree from_rationals(std::span<const Rational> probs);

  struct Draw {
    std::size_t outcome;
    int depth;
  };
  Draw sample(BitSource& src) const;

  std::size_t outcomes() const { return outcomes_; }
  double expected_depth() const;
  // Total leaf mass of one outcome.
  double leaf_mass(std::size_t outcome) const;
  // Leaves at depth k (1-based), in left-to-right order.
  const std::vector<std::uint32_t>& leaves_at(int depth) const {
    return leaves_[static_cast<std::size_t>(depth - 1)];
  }
  // Nodes left internal after the last level.
  std::uint64_t residual_nodes() const { return residual_; }

 private:
  std::size_t outcomes_ = 0;
  std::vector<std::vector<std::uint32_t>> leaves_;
  std::uint64_t residual_ = 0;
  // Set when one outcome has probability 1; sampling then reads no bits.
  bool certain_ = false;
  std::size_t certain_outcome_ = 0;
};

class QBiasedDistribution {
 public:
  // P(0,0) = 1 - 3q and q elsewhere; 0 < q <= 1/4.
  explicit QBiasedDistribution(Rational q);

  const Rational& q() const { return q_; }
  // Lexicographic (0,0), (0,1), (1,0), (1,1).
  const std::array<Rational, 4>& table() const { return table_; }
  double p_min() const { return p_min_.to_double(); }
  const Rational& p_min_exact() const { return p_min_; }
  InputDistribution input_distribution() const;
  const DdgTree& symbol_tree() const { return *symbol_tree_; }

 private:
  Rational q_;
  std::array<Rational, 4> table_;
  Rational p_min_;
  std::shared_ptr<const DdgTree> symbol_tree_;
};

QBiasedDistribution q_biased(Rational q);
QBiasedDistribution q_biased(double q);

std::pair<int, int> ky_sample(const QBiasedDistribution& d, BitSource& src);
// Exact expected bits per ky_sample call.
double expected_bits(const QBiasedDistribution& d);
// Shannon entropy of the input table in bits.
double entropy_bits(const QBiasedDistribution& d);

// Knuth-Yao over run-length symbols: (g, l) stands for g rounds of (0,0)
// followed by the l-th of the other three inputs, with probability
// (1-3q)^g q for g < cap; the extra symbol stands for cap rounds of (0,0).
// Because the gap is geometric, the decoded rounds are iid q-biased.
class RunLengthCode {
 public:
  static constexpr int kMaxCap = 4096;

  explicit RunLengthCode(const QBiasedDistribution& d);

  int cap() const { return cap_; }
  const DdgTree& tree() const { return tree_; }
  std::size_t overflow_symbol() const { return static_cast<std::size_t>(3 * cap_); }
  // Long-run bits per decoded round.
  double expected_bits_per_round() const { return bits_per_round_; }

 private:
  int cap_;
  DdgTree tree_;
  double bits_per_round_;
};

enum class SamplingScheme { kPerSymbol, kRunLength };

// The cheaper of the two exact schemes by expected bits per round; ties go
// to per-symbol sampling.
SamplingScheme choose_scheme(const QBiasedDistribution& d);
double expected_bits_per_round(const QBiasedDistribution& d);

struct SampledInputs {
  std::vector<std::pair<int, int>> inputs;
  std::uint64_t bits_consumed = 0;
  int worst_depth = 0;
  SamplingScheme scheme = SamplingScheme::kPerSymbol;
};

// n iid inputs. On exhaustion throws SourceExhausted carrying the bits
// consumed and the number of complete rounds.
SampledInputs sample_inputs(std::size_t n, const QBiasedDistribution& d, BitSource& src);

}  // namespace bellrand
