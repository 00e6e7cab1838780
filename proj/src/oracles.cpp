#include "bellrand/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bellrand/errors.hpp"
#include "bellrand/qmath.hpp"

namespace bellrand {
namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

std::vector<RoundRecord> decode(const Alphabets& al, int n, std::size_t in_code, std::size_t out_code) {
  std::vector<RoundRecord> r(static_cast<std::size_t>(n));
  const auto bi = static_cast<std::size_t>(al.x * al.y), bo = static_cast<std::size_t>(al.a * al.b);
  for (auto& rec : r) {
    auto di = static_cast<int>(in_code % bi), d_o = static_cast<int>(out_code % bo);
    in_code /= bi;
    out_code /= bo;
    rec = {di / al.y, di % al.y, d_o / al.b, d_o % al.b};
  }
  return r;
}

struct Walker {
  const BellCoefficients& c;
  PathEnumeration& out;
  std::vector<std::size_t> pow_in, pow_out;

  void visit(const InteractionEngine& e, int depth, std::size_t in_code, std::size_t out_code, double prob,
             double bell_sum) {
    const Alphabets& al = out.alphabets;
    const ConditionalDistribution dist = e.round_distribution();
    const double ij = bell_value(dist, c);
    const auto d = static_cast<std::size_t>(depth);
    for (int x = 0; x < al.x; ++x)
      for (int y = 0; y < al.y; ++y)
        for (int a = 0; a < al.a; ++a)
          for (int b = 0; b < al.b; ++b) {
            const double p = dist.p(a, b, x, y);
            if (p <= kImpossible) continue;  // whole subtree stays at probability 0
            const std::size_t ic = in_code + static_cast<std::size_t>(x * al.y + y) * pow_in[d];
            const std::size_t oc = out_code + static_cast<std::size_t>(a * al.b + b) * pow_out[d];
            if (depth + 1 == out.n) {
              out.prob[ic * out.outcome_codes + oc] = prob * p;
              out.ibar[ic * out.outcome_codes + oc] = (bell_sum + ij) / out.n;
            } else {
              InteractionEngine child = e;
              child.advance(x, y, a, b);
              visit(child, depth + 1, ic, oc, prob * p, bell_sum + ij);
            }
          }
  }
};

}  // namespace

std::vector<RoundRecord> PathEnumeration::rounds(std::size_t input_code, std::size_t outcome_code) const {
  return decode(alphabets, n, input_code, outcome_code);
}

PathEnumeration enumerate_paths(const std::shared_ptr<const DeviceStrategy>& s, int n, const BellCoefficients& c) {
  if (n < 1) throw DomainError("path enumeration needs n >= 1");
  const Alphabets al = s->alphabets();
  if (!(al == c.alphabets())) throw DimensionError("device and coefficients use different alphabets");
  const double total = std::pow(static_cast<double>(al.table_size()), n);
  if (total > static_cast<double>(kMaxEnumeratedPaths))
    throw EnumerationLimit("path enumeration over " + std::to_string(n) + " rounds exceeds the cap");
  PathEnumeration pe;
  pe.n = n;
  pe.alphabets = al;
  pe.input_codes = ipow(static_cast<std::size_t>(al.x * al.y), n);
  pe.outcome_codes = ipow(static_cast<std::size_t>(al.a * al.b), n);
  pe.prob.assign(pe.input_codes * pe.outcome_codes, 0.0);
  pe.ibar.assign(pe.prob.size(), std::numeric_limits<double>::quiet_NaN());
  Walker w{c, pe, {}, {}};
  for (int j = 0; j < n; ++j) {
    w.pow_in.push_back(ipow(static_cast<std::size_t>(al.x * al.y), j));
    w.pow_out.push_back(ipow(static_cast<std::size_t>(al.a * al.b), j));
  }
  w.visit(InteractionEngine(s, 0), 0, 0, 0, 1.0, 0.0);
  return pe;
}

std::vector<RoundRecord> SequenceDistribution::rounds(std::size_t outcome_code) const {
  std::size_t in_code = 0, mul = 1;
  for (const auto& [x, y] : inputs) {
    in_code += static_cast<std::size_t>(x * alphabets.y + y) * mul;
    mul *= static_cast<std::size_t>(alphabets.x * alphabets.y);
  }
  return decode(alphabets, static_cast<int>(inputs.size()), in_code, outcome_code);
}

SequenceDistribution sequence_distribution(const std::shared_ptr<const DeviceStrategy>& s,
                                           std::span<const std::pair<int, int>> inputs) {
  SequenceDistribution d;
  d.inputs.assign(inputs.begin(), inputs.end());
  d.alphabets = s->alphabets();
  const auto bo = static_cast<std::size_t>(d.alphabets.a * d.alphabets.b);
  const double total = std::pow(static_cast<double>(bo), static_cast<double>(inputs.size()));
  if (total > static_cast<double>(kMaxEnumeratedPaths)) throw EnumerationLimit("too many outcome sequences");
  d.prob.assign(static_cast<std::size_t>(total), 0.0);
  struct Rec {
    SequenceDistribution& d;
    std::size_t bo;
    void go(const InteractionEngine& e, std::size_t j, std::size_t code, std::size_t mul, double prob) {
      if (j == d.inputs.size()) {
        d.prob[code] = prob;
        return;
      }
      const auto [x, y] = d.inputs[j];
      for (int a = 0; a < d.alphabets.a; ++a)
        for (int b = 0; b < d.alphabets.b; ++b) {
          double p = e.outcome_probability(x, y, a, b);
          if (p <= kImpossible) continue;
          InteractionEngine child = e;
          child.advance(x, y, a, b);
          go(child, j + 1, code + static_cast<std::size_t>(a * d.alphabets.b + b) * mul, mul * bo, prob * p);
        }
    }
  };
  Rec{d, bo}.go(InteractionEngine(s, 0), 0, 0, 1, 1.0);
  return d;
}

double oracle_guessing(const SequenceDistribution& d, const SequencePredicate& condition) {
  if (d.prob.size() > 4096) throw EnumerationLimit("guessing oracle is capped at 4096 outcome sequences");
  double mass = 0.0, best = 0.0;
  for (std::size_t k = 0; k < d.prob.size(); ++k) {
    if (d.prob[k] <= 0.0) continue;
    if (condition) {
      auto r = d.rounds(k);
      if (!condition(r)) continue;
    }
    mass += d.prob[k];
    best = std::max(best, d.prob[k]);
  }
  if (mass <= kImpossible) throw ZeroProbability("conditioning event has probability zero");
  return best / mass;
}

double min_entropy_from_guess(double guess) {
  if (!(guess > 0.0 && guess <= 1.0 + 1e-12)) throw DomainError("guessing probability must lie in (0, 1]");
  return -std::log2(std::min(guess, 1.0));
}

bool GoodEventModel::probability_bound_holds() const { return required_p_good <= 0.0 || p_good >= required_p_good - 1e-12; }

bool GoodEventModel::guessing_bound_holds() const {
  return std::all_of(cells.begin(), cells.end(), [](const GoodEventCell& c) { return c.guess <= c.bound * (1.0 + 1e-9); });
}

GoodEventModel oracle_good_event(const std::shared_ptr<const DeviceStrategy>& s, const InputDistribution& input_dist,
                                 int n, const IntervalPartition& p, const CertificationParams& params,
                                 const RateFunction& rate, const BellCoefficients& c) {
  params.validate();
  if (input_dist.p_min() <= Rational(0)) throw DomainError("input distribution must have full support");
  const PathEnumeration pe = enumerate_paths(s, n, c);
  const std::size_t m = p.m(), ni = pe.input_codes, no = pe.outcome_codes;
  GoodEventModel g;
  g.n = n;
  g.m = m;
  g.p_input.assign(ni, 1.0);
  g.p_bad_guess_given_input.assign(ni, 0.0);
  g.in_b1.assign(ni, 0);
  g.p_ell_given_input_gguess.assign(ni * m, 0.0);
  g.in_b2.assign(ni * m, 0);
  g.in_good.assign(ni * no, 0);

  std::vector<std::size_t> ell(ni * no, 0);
  std::vector<char> bad(ni * no, 0);
  for (std::size_t ic = 0; ic < ni; ++ic) {
    for (const auto& r : pe.rounds(ic, 0)) g.p_input[ic] *= input_dist.p(r.x, r.y);
    std::vector<double> mass_ell(m, 0.0);
    double mass_good_guess = 0.0;
    for (std::size_t oc = 0; oc < no; ++oc) {
      const std::size_t k = ic * no + oc;
      const double pr = pe.prob[k];
      if (pr <= 0.0) continue;
      Transcript t;
      t.alphabets = pe.alphabets;
      t.input_dist = input_dist;
      t.rounds = pe.rounds(ic, oc);
      const double ihat = estimate_ihat(t, c);
      ell[k] = assign_interval(ihat, params.eps, p);
      bad[k] = pe.ibar[k] <= ihat - params.eps;
      if (bad[k]) {
        g.p_bad_guess_given_input[ic] += pr;
      } else {
        mass_ell[ell[k]] += pr;
        mass_good_guess += pr;
      }
    }
    g.p_bad_guess += g.p_input[ic] * g.p_bad_guess_given_input[ic];
    g.in_b1[ic] = g.p_bad_guess_given_input[ic] >= 0.5;
    for (std::size_t l = 0; l < m; ++l) {
      const double v = mass_good_guess > 0.0 ? mass_ell[l] / mass_good_guess : 0.0;
      g.p_ell_given_input_gguess[ic * m + l] = v;
      g.in_b2[ic * m + l] = v <= std::exp2(-params.delta * n);
    }
  }

  for (std::size_t ic = 0; ic < ni; ++ic) {
    std::vector<double> mass(m, 0.0), best(m, 0.0);
    for (std::size_t oc = 0; oc < no; ++oc) {
      const std::size_t k = ic * no + oc;
      const double pr = pe.prob[k];
      if (pr <= 0.0 || bad[k] || g.in_b1[ic] || g.in_b2[ic * m + ell[k]]) continue;
      g.in_good[k] = 1;
      g.p_good += g.p_input[ic] * pr;
      mass[ell[k]] += pr;
      best[ell[k]] = std::max(best[ell[k]], pr);
    }
    for (std::size_t l = 0; l < m; ++l) {
      if (mass[l] <= 0.0) continue;
      g.cells.push_back({ic, l, mass[l], best[l] / mass[l],
                         std::exp2(-n * rate(p.boundary(l)) + params.delta * n + 1.0)});
    }
  }
  g.required_p_good = 1.0 - static_cast<double>(m) * std::exp2(-params.delta * n) -
                      3.0 * std::exp2(-concentration_const(input_dist.p_min().to_double(), c) * params.eps *
                                      params.eps * n);
  return g;
}

PathBoundResult check_path_bound(const std::shared_ptr<const DeviceStrategy>& s, int n, const RateFunction& rate,
                    const BellCoefficients& c) {
  if (n > kMaxOracleRounds) throw EnumerationLimit("path-bound oracle is capped at 4 rounds");
  const PathEnumeration pe = enumerate_paths(s, n, c);
  PathBoundResult r;
  for (std::size_t k = 0; k < pe.prob.size(); ++k) {
    const double pr = pe.prob[k];
    if (pr <= 0.0) continue;
    ++r.paths_checked;
    const double bound = std::exp2(-n * rate(pe.ibar[k]));
    r.worst_ratio = std::max(r.worst_ratio, pr / bound);
    if (pr > bound * (1.0 + 1e-9)) r.holds = false;
  }
  return r;
}

bool verify_path_bound(const std::shared_ptr<const DeviceStrategy>& s, int n, const RateFunction& rate,
                const BellCoefficients& c) {
  return check_path_bound(s, n, rate, c).holds;
}

}  // namespace bellrand
