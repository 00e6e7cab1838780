#pragma once

// Single-device expansion runs and the alternating two-device composition.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bellrand/bits.hpp"
#include "bellrand/device.hpp"
#include "bellrand/rate.hpp"
#include "bellrand/rational.hpp"
#include "bellrand/sampler.hpp"

namespace bellrand {

struct ExpansionConfig {
  std::size_t n = 10000;
  Rational q{1, 4};
  IntervalPartition partition = IntervalPartition::chsh_default();
  CertificationParams params;
  double eps_ext = 1e-6;
  std::string rate = "chsh-analytic";
  std::size_t abort_threshold_ell = 3;

  void validate() const;
};

struct Ledger {
  std::uint64_t bits_in_inputs = 0;
  std::uint64_t bits_in_seed = 0;
  std::uint64_t bits_out = 0;
  std::uint64_t worst_sample_depth = 0;

  // bits_out / bits_in_inputs; extractor seeds are not charged.
  double expansion_factor_inputs() const;
  // bits_out / (bits_in_inputs + bits_in_seed).
  double expansion_factor_full() const;

  Ledger& operator+=(const Ledger& other);
};

enum class RunStatus {
  kSuccess,
  kAbortCertification,  // ell below threshold or vacuous bound
  kAbortExhausted,      // input source ran dry mid-sampling
  kAbortUnfunded,       // pre-flight: source smaller than expected input cost
};

const char* status_name(RunStatus s);

struct ExpansionResult {
  RunStatus status = RunStatus::kAbortCertification;
  BitString output;  // empty unless kSuccess
  std::optional<CertificationReport> report;
  Ledger ledger;
  Transcript transcript;
  SamplingScheme scheme = SamplingScheme::kPerSymbol;
  std::string reason;

  bool ok() const { return status == RunStatus::kSuccess; }
};

// Samples inputs from `input_src`, runs them on `engine`, certifies and, if
// certified at or above the threshold, extracts with a seed drawn from
// `seed_src`. Abort is a status, not an exception; bits drawn before an
// abort are still charged to the ledger.
ExpansionResult expand_once(InteractionEngine& engine, const ExpansionConfig& cfg,
                            BitSource& input_src, BitSource& seed_src);
// Fresh engine with `device_seed`; inputs and seed drawn from the same source.
ExpansionResult expand_once(std::shared_ptr<const DeviceStrategy> s, const ExpansionConfig& cfg,
                            BitSource& src, std::uint64_t device_seed);

enum class ReleasePolicy { kReleaseEach, kReleaseLast };

struct ComposeConfig {
  std::shared_ptr<const DeviceStrategy> strategy_a;
  std::shared_ptr<const DeviceStrategy> strategy_b;
  std::size_t iterations = 2;
  // Activation i uses activations[min(i, size - 1)].
  std::vector<ExpansionConfig> activations{ExpansionConfig{}};
  ReleasePolicy policy = ReleasePolicy::kReleaseLast;
  std::uint64_t device_seed_a = 1;
  std::uint64_t device_seed_b = 2;
  // When set, activations after the first replace their q by the largest
  // k / q_grid the previous output can fund.
  bool fund_q_from_output = false;
  std::int64_t q_grid = 1000;
  // Share of the previous output that the chosen q is planned against; the
  // rest absorbs the spread of the actual consumption.
  double fund_margin = 0.8;

  const ExpansionConfig& activation(std::size_t i) const;
  void validate() const;
};

struct ComposeResult {
  RunStatus status = RunStatus::kSuccess;
  std::size_t completed = 0;              // successful activations
  std::vector<ExpansionResult> runs;      // one per attempted activation
  std::vector<BitString> outputs;         // per successful activation
  BitString released;
  Ledger ledger;                          // inputs, seeds, released bits
  std::string reason;

  bool ok() const { return status == RunStatus::kSuccess; }
};

// Activation 1 runs device A on bits from `initial_src`; activation k+1 runs
// the other device on activation k's output, never on its own. Extractor
// seeds come from `seed_src`. Any abort ends the composition.
ComposeResult compose(const ComposeConfig& cfg, BitSource& initial_src, BitSource& seed_src);

BitString release_policy(const std::vector<RunStatus>& statuses, const std::vector<BitString>& outputs,
                         ReleasePolicy policy);

// Largest q = k / grid (k >= 1) whose expected input cost for n rounds fits
// in `budget_bits`; nullopt if even 1 / grid does not.
std::optional<Rational> largest_fundable_q(std::size_t n, double budget_bits, std::int64_t grid = 1000);

}  // namespace bellrand
