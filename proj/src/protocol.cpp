#include "bellrand/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bellrand/errors.hpp"
#include "bellrand/extractor.hpp"

namespace bellrand {

void ExpansionConfig::validate() const {
  if (n == 0) throw DomainError("n must be positive");
  QBiasedDistribution check(q);
  params.validate();
  if (!(eps_ext > 0.0 && eps_ext < 1.0)) throw DomainError("eps_ext must lie in (0, 1)");
  if (abort_threshold_ell >= partition.m()) throw DomainError("abort threshold beyond the last interval");
  if (rate.empty()) throw DomainError("rate function name is empty");
}

namespace {

double ratio(std::uint64_t out, std::uint64_t in) {
  if (in == 0) return out == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(out) / static_cast<double>(in);
}

}  // namespace

double Ledger::expansion_factor_inputs() const { return ratio(bits_out, bits_in_inputs); }
double Ledger::expansion_factor_full() const { return ratio(bits_out, bits_in_inputs + bits_in_seed); }

Ledger& Ledger::operator+=(const Ledger& other) {
  bits_in_inputs += other.bits_in_inputs;
  bits_in_seed += other.bits_in_seed;
  bits_out += other.bits_out;
  worst_sample_depth = std::max(worst_sample_depth, other.worst_sample_depth);
  return *this;
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::kSuccess: return "success";
    case RunStatus::kAbortCertification: return "abort-certification";
    case RunStatus::kAbortExhausted: return "abort-exhausted";
    case RunStatus::kAbortUnfunded: return "abort-unfunded";
  }
  return "unknown";
}

ExpansionResult expand_once(InteractionEngine& engine, const ExpansionConfig& cfg, BitSource& input_src,
                            BitSource& seed_src) {
  cfg.validate();
  const QBiasedDistribution d(cfg.q);
  const BellCoefficients c = chsh();
  const RateFunction rate = rate_by_name(cfg.rate);
  ExpansionResult res;
  res.scheme = choose_scheme(d);

  SampledInputs in;
  try {
    in = sample_inputs(cfg.n, d, input_src);
  } catch (const SourceExhausted& e) {
    res.status = RunStatus::kAbortExhausted;
    res.ledger.bits_in_inputs = e.bits_consumed();
    res.reason = e.what();
    return res;
  }
  res.ledger.bits_in_inputs = in.bits_consumed;
  res.ledger.worst_sample_depth = static_cast<std::uint64_t>(in.worst_depth);

  res.transcript = run(engine, in.inputs, d.input_distribution(), c).transcript;
  res.report = certify(res.transcript, c, rate, cfg.partition, cfg.params);
  const CertificationReport& rep = *res.report;
  if (rep.vacuous) {
    res.status = RunStatus::kAbortCertification;
    res.reason = "certified bound is vacuous";
    return res;
  }
  if (rep.ell < cfg.abort_threshold_ell) {
    res.status = RunStatus::kAbortCertification;
    res.reason = "interval " + std::to_string(rep.ell) + " below threshold " + std::to_string(cfg.abort_threshold_ell);
    return res;
  }

  const BitString raw = encode_outputs(res.transcript);
  ExtractorParams xp;
  xp.n_in = raw.size();
  xp.eps_ext = cfg.eps_ext;
  xp.xi = std::min(output_length(rep.minentropy_bound, cfg.eps_ext), raw.size());
  if (xp.xi == 0) {
    res.status = RunStatus::kAbortCertification;
    res.reason = "certified bound leaves nothing to extract";
    return res;
  }
  BitString seed;
  try {
    for (std::size_t i = 0; i < xp.seed_length(); ++i) seed.push_back(seed_src.next_bit() != 0);
  } catch (const SourceExhausted&) {
    res.status = RunStatus::kAbortExhausted;
    res.ledger.bits_in_seed = seed.size();
    res.reason = "seed source exhausted";
    return res;
  }
  res.ledger.bits_in_seed = seed.size();
  res.output = toeplitz_extract(raw, seed, xp);
  res.ledger.bits_out = res.output.size();
  res.status = RunStatus::kSuccess;
  return res;
}

ExpansionResult expand_once(std::shared_ptr<const DeviceStrategy> s, const ExpansionConfig& cfg, BitSource& src,
                            std::uint64_t device_seed) {
  InteractionEngine engine(std::move(s), device_seed);
  return expand_once(engine, cfg, src, src);
}

const ExpansionConfig& ComposeConfig::activation(std::size_t i) const {
  if (activations.empty()) throw DomainError("composition has no activation config");
  if (!(fund_margin > 0.0 && fund_margin <= 1.0)) throw DomainError("fund margin must be in (0, 1]");
  return activations[std::min(i, activations.size() - 1)];
}

void ComposeConfig::validate() const {
  if (!strategy_a || !strategy_b) throw DomainError("composition needs two devices");
  if (iterations == 0) throw DomainError("iterations must be at least 1");
  if (activations.empty()) throw DomainError("composition has no activation config");
  if (!(fund_margin > 0.0 && fund_margin <= 1.0)) throw DomainError("fund margin must be in (0, 1]");
  for (const auto& a : activations) a.validate();
}

BitString release_policy(const std::vector<RunStatus>& statuses, const std::vector<BitString>& outputs,
                         ReleasePolicy policy) {
  BitString out;
  if (policy == ReleasePolicy::kReleaseLast) {
    if (statuses.empty() || outputs.size() != statuses.size()) return out;
    for (auto s : statuses)
      if (s != RunStatus::kSuccess) return out;
    return outputs.back();
  }
  for (std::size_t i = 0; i < statuses.size() && i < outputs.size(); ++i)
    if (statuses[i] == RunStatus::kSuccess) out.append(outputs[i]);
  return out;
}

ComposeResult compose(const ComposeConfig& cfg, BitSource& initial_src, BitSource& seed_src) {
  cfg.validate();
  // Two engines, never sharing state; activation i uses engine i % 2.
  InteractionEngine engines[2] = {InteractionEngine(cfg.strategy_a, cfg.device_seed_a),
                                  InteractionEngine(cfg.strategy_b, cfg.device_seed_b)};
  ComposeResult res;
  std::vector<RunStatus> statuses;
  std::vector<BitString> outs;
  for (std::size_t i = 0; i < cfg.iterations; ++i) {
    ExpansionConfig ac = cfg.activation(i);
    InteractionEngine& engine = engines[i % 2];
    ExpansionResult r;
    if (i == 0) {
      r = expand_once(engine, ac, initial_src, seed_src);
      res.ledger.bits_in_inputs += r.ledger.bits_in_inputs;
    } else {
      // Funded only by the other device's output.
      const BitString& funds = outs.back();
      if (cfg.fund_q_from_output)
        if (auto q = largest_fundable_q(ac.n, cfg.fund_margin * static_cast<double>(funds.size()), cfg.q_grid)) ac.q = *q;
      const double need = expected_bits_per_round(QBiasedDistribution(ac.q)) * static_cast<double>(ac.n);
      if (static_cast<double>(funds.size()) < need) {
        r.status = RunStatus::kAbortUnfunded;
        r.reason = "previous output has " + std::to_string(funds.size()) + " bits, expected input cost is " +
                   std::to_string(static_cast<std::uint64_t>(std::ceil(need)));
      } else {
        BitStringSource src(funds);
        r = expand_once(engine, ac, src, seed_src);
      }
    }
    res.ledger.bits_in_seed += r.ledger.bits_in_seed;
    res.ledger.worst_sample_depth = std::max(res.ledger.worst_sample_depth, r.ledger.worst_sample_depth);
    statuses.push_back(r.status);
    outs.push_back(r.output);
    const bool ok = r.ok();
    if (!ok) {
      res.status = r.status;
      res.reason = "activation " + std::to_string(i + 1) + ": " + r.reason;
    }
    res.runs.push_back(std::move(r));
    if (!ok) break;
    ++res.completed;
    res.outputs.push_back(outs.back());
  }
  res.released = release_policy(statuses, outs, cfg.policy);
  res.ledger.bits_out = res.released.size();
  return res;
}

std::optional<Rational> largest_fundable_q(std::size_t n, double budget_bits, std::int64_t grid) {
  if (grid < 4) throw DomainError("q grid must have at least 4 steps");
  for (std::int64_t k = grid / 4; k >= 1; --k) {
    const Rational q(k, grid);
    if (expected_bits_per_round(QBiasedDistribution(q)) * static_cast<double>(n) <= budget_bits) return q;
  }
  return std::nullopt;
}

}  // namespace bellrand
