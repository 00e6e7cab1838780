#pragma once

// Exhaustive small-n oracles: chain-rule path enumeration, guessing
// probabilities, the per-path bound P(a,b|x,y) <= 2^(-n f(Ibar)), and the
// explicit good event behind the conditional min-entropy bound.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "bellrand/bell.hpp"
#include "bellrand/device.hpp"
#include "bellrand/rate.hpp"

namespace bellrand {

// Every (input sequence, outcome sequence) of a device over n rounds.
// Sequence codes are little-endian in round order: round j contributes
// digit j of base |X||Y| (inputs, digit = x|Y| + y) or |A||B| (outcomes).
struct PathEnumeration {
  int n = 0;
  Alphabets alphabets;
  std::size_t input_codes = 0;
  std::size_t outcome_codes = 0;
  std::vector<double> prob;  // [input_code * outcome_codes + outcome_code]
  std::vector<double> ibar;  // NaN where prob == 0

  double path_prob(std::size_t input_code, std::size_t outcome_code) const {
    return prob[input_code * outcome_codes + outcome_code];
  }
  double path_ibar(std::size_t input_code, std::size_t outcome_code) const {
    return ibar[input_code * outcome_codes + outcome_code];
  }
  // Decodes one path into rounds.
  std::vector<RoundRecord> rounds(std::size_t input_code, std::size_t outcome_code) const;
};

inline constexpr std::size_t kMaxEnumeratedPaths = std::size_t{1} << 20;

// Throws EnumerationLimit beyond kMaxEnumeratedPaths paths.
PathEnumeration enumerate_paths(const std::shared_ptr<const DeviceStrategy>& s, int n,
                                const BellCoefficients& c);

// P(a, b | x, y) over all outcome sequences, for fixed input sequences.
struct SequenceDistribution {
  std::vector<std::pair<int, int>> inputs;
  Alphabets alphabets;
  std::vector<double> prob;  // by outcome code

  std::vector<RoundRecord> rounds(std::size_t outcome_code) const;
};

SequenceDistribution sequence_distribution(const std::shared_ptr<const DeviceStrategy>& s,
                                           std::span<const std::pair<int, int>> inputs);

using SequencePredicate = std::function<bool(std::span<const RoundRecord>)>;

// max over outcome sequences of P(a, b | x, y, event). Throws
// ZeroProbability if the event is impossible for these inputs, and
// EnumerationLimit beyond 4096 outcome sequences.
double oracle_guessing(const SequenceDistribution& d, const SequencePredicate& condition = {});
double min_entropy_from_guess(double guess);

struct GoodEventCell {
  std::size_t input_code;
  std::size_t ell;
  double prob_given_input;  // P[L = ell, G | x, y]
  double guess;             // max_ab P(a, b | x, y, L = ell, G)
  double bound;             // 2^(-n f(J_ell) + delta n + 1)
};

// The bad events B^guess, B1, B2 and the good event G of the proof,
// constructed exactly over all paths.
struct GoodEventModel {
  int n = 0;
  std::size_t m = 0;
  double p_bad_guess = 0.0;                      // P[Ibar <= Ihat - eps]
  std::vector<double> p_bad_guess_given_input;   // by input code
  std::vector<char> in_b1;                       // by input code
  std::vector<double> p_ell_given_input_gguess;  // [input_code * m + ell]
  std::vector<char> in_b2;                       // [input_code * m + ell]
  std::vector<char> in_good;                     // [input_code * outcome_codes + outcome_code]
  std::vector<double> p_input;                   // P_XY over input sequences
  double p_good = 0.0;
  double required_p_good = 0.0;  // 1 - m 2^(-delta n) - 3 2^(-c eps^2 n)
  std::vector<GoodEventCell> cells;

  bool probability_bound_holds() const;
  bool guessing_bound_holds() const;
};

GoodEventModel oracle_good_event(const std::shared_ptr<const DeviceStrategy>& s,
                                 const InputDistribution& input_dist, int n,
                                 const IntervalPartition& p, const CertificationParams& params,
                                 const RateFunction& rate, const BellCoefficients& c);

struct PathBoundResult {
  bool holds = true;
  std::size_t paths_checked = 0;
  double worst_ratio = 0.0;  // max of P / 2^(-n f(Ibar)) over positive paths
};

PathBoundResult check_path_bound(const std::shared_ptr<const DeviceStrategy>& s, int n, const RateFunction& rate,
                    const BellCoefficients& c);
bool verify_path_bound(const std::shared_ptr<const DeviceStrategy>& s, int n, const RateFunction& rate,
                const BellCoefficients& c);

inline constexpr int kMaxOracleRounds = 4;

}  // namespace bellrand
