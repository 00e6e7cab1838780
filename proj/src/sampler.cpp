#include "bellrand/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bellrand/errors.hpp"

namespace bellrand {
namespace {

using U128 = unsigned __int128;
constexpr U128 kOne = U128{1} << 64;

U128 check_total(const std::vector<std::uint64_t>& mass) {
  U128 total = 0;
  for (auto v : mass) total += v;
  if (total > kOne) throw DomainError("probabilities sum to more than 1");
  return total;
}

}  // namespace

int BitSource::next_bit() {
  const int b = produce();
  if (b < 0) throw SourceExhausted("bit source exhausted after " + std::to_string(consumed_) + " bits", consumed_);
  ++consumed_;
  return b;
}

int SeededBitSource::produce() {
  if (left_ == 0) {
    word_ = rng_.next_u64();
    left_ = 64;
  }
  const int b = static_cast<int>(word_ >> 63);
  word_ <<= 1;
  --left_;
  return b;
}

BitStringSource BitStringSource::from_bytes(std::span<const std::uint8_t> bytes) {
  return BitStringSource(BitString::from_bytes(bytes, bytes.size() * 8));
}

int BitStringSource::produce() {
  if (pos_ >= bits_.size()) return -1;
  return bits_[pos_++] ? 1 : 0;
}

DdgTree DdgTree::from_fixed_point(std::vector<std::uint64_t> mass) {
  if (mass.empty()) throw DomainError("distribution with no outcomes");
  check_total(mass);
  DdgTree t;
  t.outcomes_ = mass.size();
  t.leaves_.resize(kMaxDepth);
  U128 internal = 1;
  for (int k = 1; k <= kMaxDepth; ++k) {
    auto& lv = t.leaves_[static_cast<std::size_t>(k - 1)];
    for (std::size_t i = 0; i < mass.size(); ++i)
      if ((mass[i] >> (kMaxDepth - k)) & 1U) lv.push_back(static_cast<std::uint32_t>(i));
    // The sum constraint guarantees 2 * internal >= leaves here.
    internal = 2 * internal - lv.size();
  }
  t.residual_ = static_cast<std::uint64_t>(internal);
  return t;
}

DdgTree DdgTree::from_rationals(std::span<const Rational> probs) {
  if (probs.empty()) throw DomainError("distribution with no outcomes");
  Rational sum(0);
  for (const auto& p : probs) {
    if (p < Rational(0)) throw DomainError("negative probability");
    sum = sum + p;
  }
  if (sum != Rational(1)) throw DomainError("probabilities sum to " + sum.to_string() + ", not 1");
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (probs[i] == Rational(1)) {
      DdgTree t;
      t.outcomes_ = probs.size();
      t.leaves_.resize(kMaxDepth);
      t.certain_ = true;
      t.certain_outcome_ = i;
      return t;
    }
  std::vector<std::uint64_t> mass;
  for (const auto& p : probs)
    mass.push_back(static_cast<std::uint64_t>((static_cast<U128>(p.num()) << 64) / static_cast<U128>(p.den())));
  return from_fixed_point(std::move(mass));
}

DdgTree::Draw DdgTree::sample(BitSource& src) const {
  if (certain_) return {certain_outcome_, 0};
  std::uint64_t node = 0;
  for (int k = 1; k <= kMaxDepth; ++k) {
    const auto& lv = leaves_[static_cast<std::size_t>(k - 1)];
    const std::uint64_t idx = 2 * node + static_cast<std::uint64_t>(src.next_bit());
    if (idx < lv.size()) return {lv[idx], k};
    node = idx - lv.size();
  }
  return {0, kMaxDepth};
}

double DdgTree::expected_depth() const {
  if (certain_) return 0.0;
  double e = 0.0;
  for (int k = 1; k <= kMaxDepth; ++k)
    e += k * static_cast<double>(leaves_[static_cast<std::size_t>(k - 1)].size()) * std::ldexp(1.0, -k);
  return e + kMaxDepth * std::ldexp(static_cast<double>(residual_), -kMaxDepth);
}

double DdgTree::leaf_mass(std::size_t outcome) const {
  if (certain_) return outcome == certain_outcome_ ? 1.0 : 0.0;
  double m = 0.0;
  for (int k = 1; k <= kMaxDepth; ++k)
    m += static_cast<double>(std::count(leaves_[static_cast<std::size_t>(k - 1)].begin(),
                                        leaves_[static_cast<std::size_t>(k - 1)].end(), outcome)) *
         std::ldexp(1.0, -k);
  if (outcome == 0) m += std::ldexp(static_cast<double>(residual_), -kMaxDepth);
  return m;
}

QBiasedDistribution::QBiasedDistribution(Rational q) : q_(q) {
  if (!(q > Rational(0) && q <= Rational(1, 4))) throw DomainError("q must lie in (0, 1/4], got " + q.to_string());
  table_ = {Rational(1) - Rational(3) * q, q, q, q};
  p_min_ = std::min(q, table_[0]);
  symbol_tree_ = std::make_shared<const DdgTree>(DdgTree::from_rationals(table_));
}

InputDistribution QBiasedDistribution::input_distribution() const {
  return InputDistribution(2, 2, std::vector<Rational>(table_.begin(), table_.end()));
}

QBiasedDistribution q_biased(Rational q) { return QBiasedDistribution(q); }
QBiasedDistribution q_biased(double q) {
  if (!std::isfinite(q)) throw DomainError("q must be finite");
  return QBiasedDistribution(Rational::from_double(q));
}

std::pair<int, int> ky_sample(const QBiasedDistribution& d, BitSource& src) {
  const auto s = static_cast<int>(d.symbol_tree().sample(src).outcome);
  return {s / 2, s % 2};
}

double expected_bits(const QBiasedDistribution& d) { return d.symbol_tree().expected_depth(); }

double entropy_bits(const QBiasedDistribution& d) {
  double h = 0.0;
  for (const auto& p : d.table()) {
    const double v = p.to_double();
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

RunLengthCode::RunLengthCode(const QBiasedDistribution& d) : cap_(0), bits_per_round_(0.0) {
  const U128 num = static_cast<U128>(d.q().num()), den = static_cast<U128>(d.q().den());
  const U128 keep = den - 3 * num;  // (1 - 3q) * den
  // v_g = floor(2^64 (1 - 3q)^g), computed incrementally with floors.
  std::vector<U128> v{kOne};
  while (cap_ < kMaxCap && v.back() > kOne / 16) {
    v.push_back(v.back() * keep / den);
    ++cap_;
  }
  if (cap_ == 0) cap_ = 1, v.push_back(v.back() * keep / den);
  std::vector<std::uint64_t> mass;
  mass.reserve(static_cast<std::size_t>(3 * cap_ + 1));
  for (int g = 0; g < cap_; ++g) {
    const auto m = static_cast<std::uint64_t>(v[static_cast<std::size_t>(g)] * num / den);
    mass.insert(mass.end(), 3, m);
  }
  mass.push_back(static_cast<std::uint64_t>(v[static_cast<std::size_t>(cap_)]));
  tree_ = DdgTree::from_fixed_point(std::move(mass));
  const double q = d.q().to_double(), r = 1.0 - 3.0 * q;
  const double rounds_per_symbol = (1.0 - std::pow(r, cap_)) / (3.0 * q);
  bits_per_round_ = tree_.expected_depth() / rounds_per_symbol;
}

SamplingScheme choose_scheme(const QBiasedDistribution& d) {
  return RunLengthCode(d).expected_bits_per_round() < expected_bits(d) - 1e-12 ? SamplingScheme::kRunLength
                                                                                : SamplingScheme::kPerSymbol;
}

double expected_bits_per_round(const QBiasedDistribution& d) {
  return choose_scheme(d) == SamplingScheme::kRunLength ? RunLengthCode(d).expected_bits_per_round()
                                                        : expected_bits(d);
}

SampledInputs sample_inputs(std::size_t n, const QBiasedDistribution& d, BitSource& src) {
  SampledInputs out;
  out.scheme = choose_scheme(d);
  out.inputs.reserve(n);
  const std::uint64_t start = src.consumed();
  try {
    if (out.scheme == SamplingScheme::kPerSymbol) {
      const DdgTree& t = d.symbol_tree();
      while (out.inputs.size() < n) {
        auto draw = t.sample(src);
        out.worst_depth = std::max(out.worst_depth, draw.depth);
        const auto s = static_cast<int>(draw.outcome);
        out.inputs.emplace_back(s / 2, s % 2);
      }
    } else {
      static constexpr std::pair<int, int> kLabels[3] = {{0, 1}, {1, 0}, {1, 1}};
      const RunLengthCode code(d);
      while (out.inputs.size() < n) {
        auto draw = code.tree().sample(src);
        out.worst_depth = std::max(out.worst_depth, draw.depth);
        const bool overflow = draw.outcome == code.overflow_symbol();
        const std::size_t zeros = overflow ? static_cast<std::size_t>(code.cap()) : draw.outcome / 3;
        for (std::size_t i = 0; i < zeros && out.inputs.size() < n; ++i) out.inputs.emplace_back(0, 0);
        if (!overflow && out.inputs.size() < n) out.inputs.push_back(kLabels[draw.outcome % 3]);
      }
    }
  } catch (const SourceExhausted&) {
    throw SourceExhausted("input source exhausted after " + std::to_string(out.inputs.size()) + " of " +
                              std::to_string(n) + " rounds",
                          src.consumed() - start, out.inputs.size());
  }
  out.bits_consumed = src.consumed() - start;
  return out;
}

}  // namespace bellrand
