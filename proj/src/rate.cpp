#include "bellrand/rate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "bellrand/errors.hpp"

namespace bellrand {
namespace {

constexpr int kCheckPoints = 1001;
constexpr double kShapeTol = 1e-9;

double imax_chsh() { return 2.0 * std::numbers::sqrt2; }

}  // namespace

RateFunction::RateFunction(std::string name, std::function<double(double)> evaluator, double lo, double hi,
                           bool convex)
    : name_(std::move(name)), evaluator_(std::move(evaluator)), lo_(lo), hi_(hi), convex_(convex) {
  if (!evaluator_) throw DomainError("rate function without an evaluator");
  if (!(lo_ < hi_)) throw DomainError("rate function domain is empty");
  std::vector<double> v(kCheckPoints);
  for (int k = 0; k < kCheckPoints; ++k) {
    v[static_cast<std::size_t>(k)] = evaluator_(lo_ + (hi_ - lo_) * k / (kCheckPoints - 1));
    double f = v[static_cast<std::size_t>(k)];
    if (!std::isfinite(f) || f < -kShapeTol) throw DomainError("rate function '" + name_ + "' is negative or not finite");
    if (k > 0 && f < v[static_cast<std::size_t>(k - 1)] - kShapeTol)
      throw DomainError("rate function '" + name_ + "' is not monotone");
  }
  if (convex_)
    for (std::size_t k = 1; k + 1 < v.size(); ++k)
      if (v[k - 1] - 2 * v[k] + v[k + 1] < -kShapeTol) throw DomainError("rate function '" + name_ + "' is not convex");
}

double RateFunction::operator()(double bell_value) const {
  if (std::isnan(bell_value)) throw DomainError("rate of NaN");
  if (bell_value < lo_) return 0.0;
  if (bell_value > hi_ + kShapeTol) throw DomainError("Bell value above the rate function's domain");
  return std::max(0.0, evaluator_(std::min(bell_value, hi_)));
}

RateFunction chsh_analytic_rate() {
  return RateFunction(
      "chsh-analytic",
      [](double i) { return std::max(0.0, 1.0 - std::log2(1.0 + std::sqrt(std::max(0.0, 2.0 - i * i / 4.0)))); }, 2.0,
      imax_chsh(), true);
}

RateEnvelope brute_force_envelope(std::pair<int, int> dims, const EnvelopeGrid& grid) {
  if (dims.first < 2 || dims.second < 2) throw DomainError("envelope needs component dimension at least 2");
  if (dims.first > 2 || dims.second > 2) throw EnumerationLimit("envelope enumeration is limited to qubit pairs");
  if (grid.state_weights < 2 || grid.angle_steps < 1 || grid.bell_points < 2) throw DomainError("degenerate envelope grid");
  const int steps = grid.angle_steps;
  const double i0 = 2.0, imax = imax_chsh(), step = (imax - i0) / (grid.bell_points - 1);

  // Real projectors in the x-z plane.
  std::vector<std::array<double, 4>> proj(static_cast<std::size_t>(steps));  // [a * 2 + i]
  for (int t = 0; t < steps; ++t) {
    double th = 2.0 * std::numbers::pi * t / steps;
    proj[static_cast<std::size_t>(t)] = {std::cos(th / 2), std::sin(th / 2), -std::sin(th / 2), std::cos(th / 2)};
  }

  std::vector<double> best(static_cast<std::size_t>(grid.bell_points), 0.0);  // max guess per bin
  const std::size_t s2 = static_cast<std::size_t>(steps) * static_cast<std::size_t>(steps);
  std::vector<double> corr(s2), guess(s2);
  RateEnvelope env;
  for (int wi = 0; wi < grid.state_weights; ++wi) {
    const double w = static_cast<double>(wi) / (grid.state_weights - 1);
    // psi[i * 2 + j] = sqrt(w) singlet + sqrt(1 - w) |00>
    const double r = std::sqrt(w / 2.0);
    const double psi[4] = {std::sqrt(1.0 - w), r, -r, 0.0};
    for (int ta = 0; ta < steps; ++ta)
      for (int tb = 0; tb < steps; ++tb) {
        const auto& pa = proj[static_cast<std::size_t>(ta)];
        const auto& pb = proj[static_cast<std::size_t>(tb)];
        double e = 0.0, g = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            double amp = 0.0;
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 2; ++j) amp += pa[a * 2 + i] * pb[b * 2 + j] * psi[i * 2 + j];
            double p = amp * amp;
            e += (a ^ b) ? -p : p;
            g = std::max(g, p);
          }
        std::size_t k = static_cast<std::size_t>(ta) * steps + static_cast<std::size_t>(tb);
        corr[k] = e;
        guess[k] = g;
      }
    for (int a0 = 0; a0 < steps; ++a0)
      for (int a1 = 0; a1 < steps; ++a1)
        for (int b0 = 0; b0 < steps; ++b0)
          for (int b1 = 0; b1 < steps; ++b1) {
            ++env.configurations;
            auto at = [&](int ta, int tb) { return static_cast<std::size_t>(ta) * steps + static_cast<std::size_t>(tb); };
            double bell = corr[at(a0, b0)] + corr[at(a0, b1)] + corr[at(a1, b0)] - corr[at(a1, b1)];
            if (bell + kShapeTol < i0) continue;
            double g = std::max(std::max(guess[at(a0, b0)], guess[at(a0, b1)]),
                                std::max(guess[at(a1, b0)], guess[at(a1, b1)]));
            auto bin = static_cast<long>(std::floor((bell - i0) / step + kShapeTol));
            bin = std::clamp(bin, 0L, static_cast<long>(grid.bell_points - 1));
            best[static_cast<std::size_t>(bin)] = std::max(best[static_cast<std::size_t>(bin)], g);
          }
  }
  env.bell.resize(best.size());
  env.hmin.resize(best.size());
  double suffix = 0.0;
  for (std::size_t k = best.size(); k-- > 0;) {
    suffix = std::max(suffix, best[k]);
    env.bell[k] = i0 + step * static_cast<double>(k);
    env.hmin[k] = suffix > 0.0 ? -std::log2(suffix) : std::numeric_limits<double>::quiet_NaN();
  }
  // Grid points above every sampled configuration inherit the nearest
  // sampled value from below.
  for (std::size_t k = best.size(); k-- > 0;)
    if (std::isnan(env.hmin[k])) {
      std::size_t j = k;
      while (j > 0 && std::isnan(env.hmin[j])) --j;
      env.hmin[k] = std::isnan(env.hmin[j]) ? 0.0 : env.hmin[j];
    }
  return env;
}

RateFunction brute_force_rate(std::pair<int, int> dims, const EnvelopeGrid& grid) {
  auto env = std::make_shared<const RateEnvelope>(brute_force_envelope(dims, grid));
  const double i0 = env->bell.front(), imax = env->bell.back();
  const double step = (imax - i0) / static_cast<double>(env->bell.size() - 1);
  return RateFunction(
      "brute-force-envelope",
      [env, i0, step](double i) {
        auto k = static_cast<long>(std::ceil((i - i0) / step - kShapeTol));
        k = std::clamp(k, 0L, static_cast<long>(env->bell.size() - 1));
        return env->hmin[static_cast<std::size_t>(k)];
      },
      i0, imax, false);
}

RateFunction rate_from_table(std::string name, std::vector<std::pair<double, double>> rows) {
  if (rows.size() < 2) throw DomainError("rate table needs at least two rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!std::isfinite(rows[i].first) || !std::isfinite(rows[i].second)) throw DomainError("rate table has a non-finite entry");
    if (i > 0 && !(rows[i].first > rows[i - 1].first)) throw DomainError("rate table rows must be strictly increasing in I");
  }
  bool convex = true;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    double s0 = (rows[i].second - rows[i - 1].second) / (rows[i].first - rows[i - 1].first);
    double s1 = (rows[i + 1].second - rows[i].second) / (rows[i + 1].first - rows[i].first);
    if (s1 < s0 - 1e-12) convex = false;
  }
  auto data = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(rows));
  const double lo = data->front().first, hi = data->back().first;
  return RateFunction(
      std::move(name),
      [data](double i) {
        const auto& r = *data;
        auto it = std::upper_bound(r.begin(), r.end(), i, [](double v, const auto& row) { return v < row.first; });
        if (it == r.begin()) return r.front().second;
        if (it == r.end()) return r.back().second;
        const auto& [x1, y1] = *it;
        const auto& [x0, y0] = *(it - 1);
        return y0 + (y1 - y0) * (i - x0) / (x1 - x0);
      },
      lo, hi, convex);
}

RateFunction load_rate_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rate table '" + path + "'");
  std::vector<std::pair<double, double>> rows;
  std::string line;
  for (std::size_t ln = 1; std::getline(in, line); ++ln) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string a, b, extra;
    if (!std::getline(ss, a, '\t') || !std::getline(ss, b, '\t') || std::getline(ss, extra, '\t'))
      throw ParseError(path, ln, "expected two tab-separated fields");
    try {
      std::size_t pa = 0, pb = 0;
      double x = std::stod(a, &pa), y = std::stod(b, &pb);
      if (pa != a.size() || pb != b.size()) throw std::invalid_argument("trailing characters");
      rows.emplace_back(x, y);
    } catch (const std::logic_error&) {
      throw ParseError(path, ln, "not a number");
    }
  }
  return rate_from_table("table:" + path, std::move(rows));
}

RateFunction rate_by_name(const std::string& name) {
  if (name == "chsh-analytic") return chsh_analytic_rate();
  if (name == "brute-force-envelope") return brute_force_rate({2, 2});
  if (name.rfind("table:", 0) == 0) return load_rate_table(name.substr(6));
  throw DomainError("unknown rate function '" + name + "'");
}

IntervalPartition::IntervalPartition(std::vector<double> boundaries, double i0, double i_max)
    : boundaries_(std::move(boundaries)), i_max_(i_max) {
  if (boundaries_.empty()) throw DomainError("partition needs at least one boundary");
  if (std::abs(boundaries_.front() - i0) > 1e-12) throw DomainError("partition must start at the classical bound");
  for (std::size_t i = 1; i < boundaries_.size(); ++i)
    if (!(boundaries_[i] > boundaries_[i - 1])) throw DomainError("partition boundaries must be strictly increasing");
  if (boundaries_.back() > i_max_ + 1e-12) throw DomainError("partition boundary above the quantum maximum");
}

IntervalPartition IntervalPartition::chsh_default() { return IntervalPartition({2.0, 2.2, 2.4, 2.6}, 2.0, imax_chsh()); }

std::size_t assign_interval(double i_hat, double eps, const IntervalPartition& p) {
  if (std::isnan(i_hat)) throw DomainError("Bell estimate is NaN");
  const double t = i_hat - eps;
  const auto& b = p.boundaries();
  auto it = std::upper_bound(b.begin(), b.end(), t);
  if (it == b.begin()) return 0;
  return static_cast<std::size_t>(it - b.begin()) - 1;
}

void CertificationParams::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("eps must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("delta must be positive");
}

double certification_failure_bound(std::size_t m, std::size_t n, double p_min, double eps, double delta,
                                   const BellCoefficients& c) {
  const double nn = static_cast<double>(n);
  double f = static_cast<double>(m) * std::exp2(-delta * nn) +
             3.0 * std::exp2(-concentration_const(p_min, c) * eps * eps * nn);
  return std::min(1.0, f);
}

CertificationReport certify(const Transcript& t, const BellCoefficients& c, const RateFunction& rate,
                            const IntervalPartition& p, const CertificationParams& params) {
  params.validate();
  if (!rate.convex()) throw DomainError("certification needs a convex rate function; '" + rate.name() + "' is not");
  t.validate();
  if (t.coefficients_id != c.id()) throw DomainError("transcript uses coefficients '" + t.coefficients_id + "'");
  CertificationReport r;
  r.n = t.n();
  r.i_hat = estimate_ihat(t, c);
  r.ell = assign_interval(r.i_hat, params.eps, p);
  r.partition = p.boundaries();
  r.eps = params.eps;
  r.delta = params.delta;
  r.p_min = t.input_dist.p_min();
  r.rate_name = rate.name();
  r.rate_at_boundary = rate(p.boundary(r.ell));
  const double n = static_cast<double>(r.n);
  r.minentropy_bound = n * r.rate_at_boundary - params.delta * n - 1.0;
  r.failure_prob_bound = certification_failure_bound(p.m(), r.n, r.p_min.to_double(), params.eps, params.delta, c);
  r.vacuous = !(r.minentropy_bound > 0.0);
  return r;
}

}  // namespace bellrand
