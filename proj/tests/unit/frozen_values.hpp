#pragma once

// Reference values recomputed by tests/oracle/derive_values.py (numpy and
// exact fractions, no shared code with the library) and frozen here.

namespace frozen {

inline constexpr double kHonestSame = 0.42677669529663675;  // (1 + 1/sqrt 2) / 4
inline constexpr double kHonestDiff = 0.07322330470336308;  // (1 - 1/sqrt 2) / 4
inline constexpr double kHonestWin = 0.8535533905932737;
inline constexpr double kHonestHmin = 1.2284466968363885;

// partial(2.4) after round 1 = (x, y, a, b) = (0, 0, 0, 0)
inline constexpr double kPartialWeight = 0.4828427124746188;
inline constexpr double kPartialPosterior = 0.2849272359420192;
inline constexpr double kPartialRound2P0000 = 0.8366730682133209;
inline constexpr double kPartialRound2P1101 = 0.12160030415534005;
inline constexpr double kPartialRound2Bell = 2.2360414508333264;

inline constexpr double kConcentrationQuarter = 0.050754527206417925;
inline constexpr double kConcentrationEighth = 0.03200590319234346;
inline constexpr double kTailExponent = 126.88631801604483;  // eps 0.05, n 1e6, p_min 1/4

inline constexpr double kRate24 = 0.19402125944147164;
inline constexpr double kRate26 = 0.3614382215585079;
inline constexpr double kBound1e4 = 3513.382215585079;
inline constexpr int kOutput1e4 = 3473;
inline constexpr int kOutput1e3 = 310;

inline constexpr double kEnvelope24 = 0.2525587191629984;
inline constexpr double kEnvelope26 = 0.45182768332112105;
inline constexpr double kEnvelopeMax = 1.2284466968363874;

inline constexpr double kEntropyEighth = 1.5487949406953985;
inline constexpr double kEntropySixteenth = 0.9933927290103626;
// Run-length code: (cap, long-run bits per round)
inline constexpr int kRunCapEighth = 6;
inline constexpr double kRunBitsEighth = 1.827132999890475;
inline constexpr int kRunCapHundredth = 92;
inline constexpr double kRunBitsHundredth = 0.27726573215368183;
inline constexpr int kRunCap5e3 = 184;
inline constexpr double kRunBits5e3 = 0.15390795953911215;

// Worst seed-averaged distance over flat sources.
inline constexpr double kLhl413 = 0.125;
inline constexpr double kLhl423 = 0.2265625;
inline constexpr double kLhl624Affine = 0.087890625;
inline constexpr int kAffineSubspaces624 = 2604;

}  // namespace frozen
