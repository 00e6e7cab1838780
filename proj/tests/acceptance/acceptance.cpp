// One PASS/FAIL line per acceptance criterion. The optional first argument is
// the path of the command-line tool, used by the reproducibility check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bellrand/bell.hpp"
#include "bellrand/device.hpp"
#include "bellrand/extractor.hpp"
#include "bellrand/oracles.hpp"
#include "bellrand/protocol.hpp"
#include "bellrand/rate.hpp"
#include "bellrand/sampler.hpp"

using namespace bellrand;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr double kBellTol = 1e-9;
constexpr double kRateTopTol = 1e-12;
constexpr double kRate26Target = 0.3615;
constexpr double kRate26Tol = 5e-4;
constexpr double kConvexTol = 1e-9;
constexpr double kHminTarget = 1.2284;
constexpr double kHminTol = 1e-3;
constexpr double kEstimatorTol = 1e-12;
constexpr double kTailSigmas = 3.0;
constexpr double kFreqSigmas = 3.0;
constexpr double kFundBudgetFraction = 0.165;  // of n; the expected output is about 0.347 n

const double kImax = 2 * std::sqrt(2.0);

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = o.pass;
  std::ostringstream extra;
  if (budget_s > 0 && secs >= budget_s) {
    pass = false;
    extra << " over the " << budget_s << " s budget";
  }
  if (!pass) ++failures;
  std::printf("criterion %d: %s  %s [%.2f s%s]\n", id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs, extra.str().c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome chsh_constants() {
  const BellCoefficients c = chsh();
  const ConditionalDistribution d = InteractionEngine(strategy_honest_chsh(), 1).round_distribution();
  const double bell = bell_value(d, c);
  const double cmax = classical_max(c);
  double win = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == (x & y)) win += d.p(a, b, x, y) / 4;
  const double target = std::cos(M_PI / 8) * std::cos(M_PI / 8);
  const bool ok = std::abs(bell - kImax) <= kBellTol && cmax == 2.0 && std::abs(win - target) <= kBellTol;
  return {ok, fmt("I=%.12f classical_max=%.17g win=%.12f", bell, cmax, win)};
}

Outcome rate_function() {
  const RateFunction f = chsh_analytic_rate();
  const double top = f(kImax), bottom = f(2.0), mid = f(2.6);
  const int pts = 1000;
  std::vector<double> v(pts);
  for (int k = 0; k < pts; ++k) v[k] = f(2.0 + (kImax - 2.0) * k / (pts - 1));
  double worst_convex = 0;
  for (int k = 1; k + 1 < pts; ++k) worst_convex = std::min(worst_convex, v[k - 1] + v[k + 1] - 2 * v[k]);
  const std::pair<int, int> in[] = {{0, 0}};
  const double hmin = min_entropy_from_guess(oracle_guessing(sequence_distribution(strategy_honest_chsh(), in)));
  const RateEnvelope env = brute_force_envelope({2, 2});
  bool below = true;
  for (std::size_t k = 0; k < env.bell.size(); ++k) below &= f(env.bell[k]) <= env.hmin[k] + 1e-6;
  const bool ok = std::abs(top - 1.0) <= kRateTopTol && bottom == 0.0 && std::abs(mid - kRate26Target) <= kRate26Tol &&
                  worst_convex >= -kConvexTol && std::abs(hmin - kHminTarget) <= kHminTol && below;
  return {ok, fmt("f(2sqrt2)=%.15f f(2)=%g f(2.6)=%.7f convexity_min=%.3g hmin=%.6f envelope(2sqrt2)=%.6f", top, bottom,
                  mid, worst_convex, hmin, env.hmin.back())};
}

Outcome path_bound() {
  const RateFunction f = chsh_analytic_rate();
  std::size_t paths = 0, checks = 0;
  double worst = 0;
  bool ok = true;
  for (const auto& s : strategy_library(2))
    for (int n = 1; n <= 4; ++n) {
      const PathBoundResult r = check_path_bound(s, n, f, chsh());
      ok &= r.holds;
      paths += r.paths_checked;
      worst = std::max(worst, r.worst_ratio);
      ++checks;
    }
  return {ok, fmt("%zu strategy/n pairs, %zu paths, worst P/bound=%.6f", checks, paths, worst)};
}

Outcome good_event() {
  bool ok = true;
  std::size_t cases = 0, cells = 0, prob_checked = 0;
  for (const auto& s : strategy_library(2))
    for (int n : {2, 3})
      for (double eps : {0.05, 0.3})
        for (double delta : {0.1, 0.3}) {
          const GoodEventModel g = oracle_good_event(s, InputDistribution::uniform(2, 2), n, IntervalPartition::chsh_default(),
                                                     {eps, delta}, chsh_analytic_rate(), chsh());
          ok &= g.probability_bound_holds() && g.guessing_bound_holds();
          if (g.required_p_good > 0) ++prob_checked;
          cells += g.cells.size();
          ++cases;
        }
  return {ok, fmt("%zu cases, %zu (x,y,ell) cells, %zu with a non-trivial probability bound", cases, cells, prob_checked)};
}

Outcome empirical_tail() {
  const BellCoefficients c = chsh();
  const std::size_t n = 200, runs = 10000;
  const double eps = 0.3;
  const double bound = tail_bound(eps, n, 0.25, c);
  const double limit = bound + kTailSigmas * std::sqrt(bound * (1 - bound) / runs);
  bool ok = true;
  std::string detail = fmt("bound=%.4f limit=%.4f", bound, limit);
  for (const auto& s : {strategy_memory_cheater(100), strategy_honest_chsh()}) {
    std::size_t hits = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      std::mt19937_64 g(derive_seed(r, "tail-inputs"));
      std::vector<std::pair<int, int>> inputs(n);
      for (auto& in : inputs) in = {static_cast<int>(g() & 1), static_cast<int>((g() >> 1) & 1)};
      const RunResult rr = run(s, inputs, InputDistribution::uniform(2, 2), c, derive_seed(r, "tail-device"));
      if (rr.trace.average <= estimate_ihat(rr.transcript, c) - eps) ++hits;
    }
    const double freq = static_cast<double>(hits) / runs;
    ok &= freq <= limit;
    detail += fmt(" %s=%.4f", s->name().c_str(), freq);
  }
  return {ok, detail};
}

Outcome estimator_exactness() {
  std::mt19937_64 g(6);
  std::gamma_distribution<double> gd(1.0);
  std::uniform_int_distribution<int> wd(1, 50);
  const BellCoefficients c = chsh();
  const Alphabets al;
  double worst = 0;
  for (int i = 0; i < 5; ++i) {
    std::vector<std::int64_t> w{wd(g), wd(g), wd(g), wd(g)};
    const std::int64_t s = w[0] + w[1] + w[2] + w[3];
    const InputDistribution in(2, 2, {Rational(w[0], s), Rational(w[1], s), Rational(w[2], s), Rational(w[3], s)});
    for (int k = 0; k < 20; ++k) {
      std::vector<double> t(16);
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          double z = 0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) z += t[al.index(a, b, x, y)] = gd(g);
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) t[al.index(a, b, x, y)] /= z;
        }
      const ConditionalDistribution q(al, t);
      double e = 0;
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) e += in.p(x, y) * q.p(a, b, x, y) * c.c(a, b, x, y) / in.p(x, y);
      worst = std::max(worst, std::abs(e - bell_value(q, c)));
    }
  }
  return {worst <= kEstimatorTol, fmt("100 (Q, P_XY) pairs, worst |E - I|=%.3g", worst)};
}

Outcome extractor() {
  bool ok = true;
  std::string detail;
  for (auto [n_in, xi, k] : {std::tuple<std::size_t, std::size_t, std::size_t>{4, 1, 3}, {4, 2, 3}, {6, 2, 4}}) {
    const LeftoverHashResult r = leftover_hash_check(n_in, xi, k);
    ok &= r.holds();
    detail += fmt("(%zu,%zu,%zu): %zu sources %s worst=%.6f bound=%.6f; ", n_in, xi, k, r.sources_checked,
                  r.exhaustive ? "exhaustive" : "structured+random", r.worst_distance, r.bound);
  }
  const bool g1 = toeplitz_extract(BitString::from_string("10"), BitString::from_string("10"), {2, 1}).to_string() == "0";
  const bool g2 = toeplitz_extract(BitString::from_string("1101000011"), BitString::from_string("01000011010001"), {10, 5})
                      .to_string() == "11011";
  ok &= g1 && g2;
  detail += fmt("golden vectors %s", g1 && g2 ? "ok" : "mismatch");
  return {ok, detail};
}

Outcome sampler() {
  bool ok = true;
  SeededBitSource src(1);
  const SampledInputs u = sample_inputs(10000, q_biased(Rational(1, 4)), src);
  const bool two_bits = u.bits_consumed == 20000 && u.worst_depth == 2;
  const double eighth = expected_bits(q_biased(Rational(1, 8)));
  bool grid = true;
  double worst_gap = 1e9;
  for (int k = 1; k <= 25; ++k) {
    const QBiasedDistribution d = q_biased(Rational(k, 100));
    grid &= expected_bits(d) <= entropy_bits(d) + 2.0;
    worst_gap = std::min(worst_gap, entropy_bits(d) + 2.0 - expected_bits(d));
  }
  const QBiasedDistribution e = q_biased(Rational(1, 8));
  SeededBitSource s8(2);
  const std::size_t n = 100000;
  const SampledInputs draws = sample_inputs(n, e, s8);
  std::array<double, 4> counts{};
  for (auto [x, y] : draws.inputs) counts[static_cast<std::size_t>(x * 2 + y)] += 1;
  double worst_z = 0;
  for (int k = 0; k < 4; ++k) {
    const double p = e.table()[k].to_double();
    worst_z = std::max(worst_z, std::abs(counts[k] - n * p) / std::sqrt(n * p * (1 - p)));
  }
  ok = two_bits && eighth == 2.0 && grid && worst_z <= kFreqSigmas;
  return {ok, fmt("q=1/4 %s, E[bits](1/8)=%.17g, min(H+2-E) over grid=%.4f, worst |z| at 1/8=%.3f",
                  two_bits ? "2 bits/sample" : "wrong cost", eighth, worst_gap, worst_z)};
}

Outcome expansion_accounting() {
  ExpansionConfig cfg;
  const auto q = largest_fundable_q(cfg.n, kFundBudgetFraction * cfg.n);
  if (!q) return {false, "no fundable q"};
  cfg.q = *q;
  const double expected_cost = expected_bits_per_round(q_biased(cfg.q)) * cfg.n;
  auto attempt = [&](std::uint64_t seed) {
    InteractionEngine engine(strategy_honest_chsh(), derive_seed(seed, "device"));
    SeededBitSource in(derive_seed(seed, "inputs")), sd(derive_seed(seed, "extractor-seed"));
    return expand_once(engine, cfg, in, sd);
  };
  const ExpansionResult r = attempt(1);
  const bool ok = expected_cost < cfg.n / 4.0 && r.ok() && r.report->minentropy_bound > cfg.n / 3.0 &&
                  r.ledger.expansion_factor_inputs() >= 2.0;
  int wins = 0;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const ExpansionResult x = attempt(s);
    wins += x.ok() && x.report->minentropy_bound > cfg.n / 3.0 && x.ledger.expansion_factor_inputs() >= 2.0;
  }
  return {ok, fmt("q=%s expected_cost=%.1f seed 1: %s i_hat=%.4f bound=%.1f inputs=%llu out=%llu factor=%.3f; "
                  "seeds 1..100 meeting both: %d",
                  cfg.q.to_string().c_str(), expected_cost, status_name(r.status), r.report ? r.report->i_hat : 0.0,
                  r.report ? r.report->minentropy_bound : 0.0, (unsigned long long)r.ledger.bits_in_inputs,
                  (unsigned long long)r.ledger.bits_out, r.ledger.expansion_factor_inputs(), wins)};
}

Outcome composability() {
  auto make = [](std::shared_ptr<const DeviceStrategy> b, std::uint64_t seed) {
    ComposeConfig cfg;
    cfg.strategy_a = strategy_honest_chsh();
    cfg.strategy_b = std::move(b);
    cfg.iterations = 2;
    cfg.activations[0].n = 1000;
    cfg.fund_q_from_output = true;
    cfg.device_seed_a = derive_seed(seed, "device-a");
    cfg.device_seed_b = derive_seed(seed, "device-b");
    return cfg;
  };
  int honest_ok = 0, classical_ok = 0;
  int first_fail = 0, second_cert = 0, second_exhausted = 0;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    SeededBitSource in(derive_seed(s, "inputs")), sd(derive_seed(s, "extractor-seed"));
    const ComposeResult h = compose(make(strategy_honest_chsh(), s), in, sd);
    const std::size_t top = h.runs.empty() ? 0 : h.runs[0].report ? h.runs[0].report->partition.size() - 1 : 0;
    bool both = h.ok() && h.runs.size() == 2;
    for (const auto& r : h.runs) both &= r.report.has_value() && r.report->ell == top;
    honest_ok += both;
    if (!h.runs.empty() && !h.runs[0].ok()) ++first_fail;
    if (h.runs.size() == 2 && h.runs[1].status == RunStatus::kAbortCertification) ++second_cert;
    if (h.runs.size() == 2 && h.runs[1].status == RunStatus::kAbortExhausted) ++second_exhausted;

    SeededBitSource in2(derive_seed(s, "inputs")), sd2(derive_seed(s, "extractor-seed"));
    const ComposeResult c = compose(make(strategy_deterministic({0, 0}, {0, 0}), s), in2, sd2);
    classical_ok += c.runs.size() == 2 && c.runs[0].ok() && !c.runs[1].ok() && c.released.empty();
  }
  const bool ok = honest_ok >= 98 && classical_ok >= 99;
  return {ok, fmt("honest+honest complete at top interval: %d/100 (activation 1 aborts %d, activation 2 "
                  "certification aborts %d, exhausted %d); honest+classical abort at 2 with nothing released: %d/100",
                  honest_ok, first_fail, second_cert, second_exhausted, classical_ok)};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome reproducibility(const std::string& tool) {
  if (tool.empty()) return {false, "no command-line tool given"};
  const fs::path root = fs::temp_directory_path() / "bellrand_acceptance_repro";
  fs::remove_all(root);
  // Each command writes into the run directory; its stdout and files are compared across runs.
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "simulate --strategy honest --n 100 --seed 1 --out t.tsv"},
      {"simulate-biased", "simulate --strategy partial:2.6 --n 3000 --q 1/100 --seed 4 --out tb.tsv"},
      {"certify", "certify t.tsv --out r.tsv"},
      {"certify-biased", "certify tb.tsv --out rb.tsv"},
      {"simulate-large", "simulate --strategy honest --n 10000 --seed 1 --out tl.tsv"},
      {"certify-large", "certify tl.tsv --out rl.tsv"},
      {"extract", "extract --transcript tl.tsv --report rl.tsv --seed 5 --out x.bin"},
      {"expand", "expand --strategy honest --n 10000 --q 1/200 --seed 2 --out e.bin --report e.tsv"},
      {"compose", "compose --strategy honest --strategy-b honest --n 10000 --seed 3 --out c.bin --report c.tsv"},
      {"compose-abort", "compose --strategy honest --strategy-b deterministic:00:00 --n 1000 --seed 3 --out ca.bin"},
      {"oracle", "oracle all --max-n 2"},
  };
  std::vector<std::string> snapshots[2];
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = root / std::to_string(pass);
    fs::create_directories(dir);
    for (const auto& [name, args] : commands) {
      const std::string out = (dir / (name + ".stdout")).string();
      const std::string cmd = "cd '" + dir.string() + "' && '" + tool + "' " + args + " > '" + out + "' 2>&1";
      std::string code = std::to_string(std::system(cmd.c_str()));
      snapshots[pass].push_back(name + "\texit " + code);
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) snapshots[pass].push_back(f.filename().string() + "\n" + slurp(f));
  }
  std::size_t differing = 0;
  std::string first;
  const std::size_t count = std::min(snapshots[0].size(), snapshots[1].size());
  for (std::size_t i = 0; i < count; ++i)
    if (snapshots[0][i] != snapshots[1][i]) {
      if (first.empty()) first = snapshots[0][i].substr(0, snapshots[0][i].find('\n'));
      ++differing;
    }
  const bool ok = differing == 0 && snapshots[0].size() == snapshots[1].size();
  return {ok, fmt("%zu commands, %zu artifacts compared, %zu differ%s%s", commands.size(), count, differing,
                  first.empty() ? "" : ", first: ", first.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string tool = argc > 1 ? fs::absolute(argv[1]).string() : "";
  criterion(1, 1.0, chsh_constants);
  criterion(2, 10.0, rate_function);
  criterion(3, 60.0, path_bound);
  criterion(4, 300.0, good_event);
  criterion(5, 120.0, empirical_tail);
  criterion(6, 0.0, estimator_exactness);
  criterion(7, 30.0, extractor);
  criterion(8, 0.0, sampler);
  criterion(9, 30.0, expansion_accounting);
  criterion(10, 300.0, composability);
  criterion(11, 0.0, [&] { return reproducibility(tool); });
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
