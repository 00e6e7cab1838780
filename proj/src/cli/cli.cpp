#include "bellrand/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "bellrand/errors.hpp"
#include "bellrand/extractor.hpp"
#include "bellrand/formats.hpp"
#include "bellrand/oracles.hpp"
#include "bellrand/protocol.hpp"
#include "bellrand/rng.hpp"
#include "bellrand/sampler.hpp"

namespace bellrand::cli {
namespace {

// A bad value, reported together with where it came from.
class FieldError : public Error {
 public:
  using Error::Error;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "strategy", "strategy_b", "n",     "q",        "q_next",    "partition", "eps",  "delta",  "eps_ext",
      "rate",     "seed",       "abort_ell", "iterations", "policy", "input_bits", "seed_bits", "out", "report",
      "transcript", "params_from", "max_n"};
  return keys;
}

// Settings from flags, then from the config file, which wins.
class Settings {
 public:
  void set(const std::string& key, std::string value, std::string origin) { values_[key] = {std::move(value), std::move(origin)}; }

  void load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path + "'");
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      auto f = split_tabs(line);
      if (f.size() < 2) throw ParseError(path, ln, "field '" + f[0] + "' has no value");
      if (!known_keys().count(f[0])) throw ParseError(path, ln, "unknown field '" + f[0] + "'");
      std::string v = f[1];
      for (std::size_t i = 2; i < f.size(); ++i) v += "," + f[i];
      set(f[0], v, path + ":" + std::to_string(ln));
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second.first;
  }

  std::string required(const std::string& key) const {
    if (!has(key)) throw FieldError("field '" + key + "': required");
    return values_.at(key).first;
  }

  // Runs `f` on the value, prefixing any error with the field and origin.
  template <class T, class F>
  T parse(const std::string& key, const std::string& fallback, F&& f) const {
    const std::string value = str(key, fallback);
    try {
      return f(value);
    } catch (const std::exception& e) {
      auto it = values_.find(key);
      const std::string origin = it == values_.end() ? "default" : it->second.second;
      throw FieldError(origin + ": field '" + key + "': " + e.what());
    }
  }

  std::size_t count(const std::string& key, const std::string& fallback) const {
    return parse<std::size_t>(key, fallback, [](const std::string& v) {
      auto x = parse_int(v);
      if (x < 0) throw DomainError("must be nonnegative");
      return static_cast<std::size_t>(x);
    });
  }
  std::uint64_t u64(const std::string& key, const std::string& fallback) const {
    return parse<std::uint64_t>(key, fallback, [](const std::string& v) {
      std::uint64_t x = 0;
      auto r = std::from_chars(v.data(), v.data() + v.size(), x);
      if (v.empty() || r.ec != std::errc{} || r.ptr != v.data() + v.size()) throw DomainError("not an unsigned integer: '" + v + "'");
      return x;
    });
  }
  double real(const std::string& key, const std::string& fallback) const {
    return parse<double>(key, fallback, [](const std::string& v) { return parse_real(v); });
  }
  Rational rational(const std::string& key, const std::string& fallback) const {
    return parse<Rational>(key, fallback, [](const std::string& v) { return Rational::parse(v); });
  }
  std::vector<double> reals(const std::string& key, const std::string& fallback) const {
    return parse<std::vector<double>>(key, fallback, [](const std::string& v) {
      std::vector<double> out;
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
      return out;
    });
  }

 private:
  std::map<std::string, std::pair<std::string, std::string>> values_;
};

constexpr const char* kDefaultPartition = "2,2.2,2.4,2.6";

std::shared_ptr<const DeviceStrategy> strategy_field(const Settings& s, const std::string& key) {
  return s.parse<std::shared_ptr<const DeviceStrategy>>(key, "honest", strategy_from_descriptor);
}

QBiasedDistribution q_field(const Settings& s, const std::string& key, const std::string& fallback) {
  return s.parse<QBiasedDistribution>(key, fallback, [](const std::string& v) { return q_biased(Rational::parse(v)); });
}

IntervalPartition partition_field(const Settings& s, const BellCoefficients& c) {
  auto b = s.reals("partition", kDefaultPartition);
  return s.parse<IntervalPartition>("partition", kDefaultPartition,
                                    [&](const std::string&) { return IntervalPartition(b, c.i0(), c.i_max()); });
}

CertificationParams params_field(const Settings& s) {
  CertificationParams p;
  p.eps = s.real("eps", "0.05");
  p.delta = s.real("delta", "0.01");
  s.parse<int>("eps", "0.05", [&](const std::string&) { return p.validate(), 0; });
  return p;
}

RateFunction rate_field(const Settings& s) { return s.parse<RateFunction>("rate", "chsh-analytic", rate_by_name); }

ExpansionConfig expansion_field(const Settings& s, const std::string& q_key, const std::string& q_fallback) {
  const BellCoefficients c = chsh();
  ExpansionConfig cfg;
  cfg.n = s.count("n", "1000");
  cfg.q = q_field(s, q_key, q_fallback).q();
  cfg.partition = partition_field(s, c);
  cfg.params = params_field(s);
  cfg.eps_ext = s.real("eps_ext", "1e-6");
  cfg.rate = s.str("rate", "chsh-analytic");
  s.parse<int>("rate", "chsh-analytic", [](const std::string& v) { return (void)rate_by_name(v), 0; });
  cfg.abort_threshold_ell = s.count("abort_ell", std::to_string(cfg.partition.m() - 1));
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw FieldError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

std::unique_ptr<BitSource> source_field(const Settings& s, const std::string& file_key, std::uint64_t seed,
                                        const char* label) {
  if (s.has(file_key)) {
    const std::string path = s.required(file_key);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FieldError("field '" + file_key + "': cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return std::make_unique<BitStringSource>(BitString::from_bytes(bytes, bytes.size() * 8));
  }
  return std::make_unique<SeededBitSource>(derive_seed(seed, label));
}

void print_ledger(std::ostream& out, const Ledger& l) {
  out << "bits_in_inputs\t" << l.bits_in_inputs << '\n'
      << "bits_in_seed\t" << l.bits_in_seed << '\n'
      << "bits_out\t" << l.bits_out << '\n'
      << "expansion_factor_inputs\t" << format_real(l.expansion_factor_inputs()) << '\n'
      << "expansion_factor_full\t" << format_real(l.expansion_factor_full()) << '\n'
      << "worst_sample_depth\t" << l.worst_sample_depth << '\n';
}

template <class F>
void with_output(const Settings& s, const std::string& key, std::ostream& fallback, F&& f) {
  if (!s.has(key)) return f(fallback);
  std::ofstream os(s.required(key), std::ios::binary | std::ios::trunc);
  if (!os) throw FieldError("field '" + key + "': cannot write '" + s.required(key) + "'");
  f(os);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Settings& s, std::ostream& out) {
  const auto strategy = strategy_field(s, "strategy");
  const std::size_t n = s.count("n", "1000");
  if (n == 0) throw FieldError("field 'n': must be positive");
  const auto d = q_field(s, "q", "1/4");
  const std::uint64_t seed = s.u64("seed", "1");
  const std::string path = s.required("out");
  auto src = source_field(s, "input_bits", seed, "inputs");
  SampledInputs in = sample_inputs(n, d, *src);
  RunResult r = run(strategy, in.inputs, d.input_distribution(), chsh(), derive_seed(seed, "device"));
  r.transcript.seed = seed;
  save_transcript(path, r.transcript);
  out << "strategy\t" << strategy->name() << '\n'
      << "n\t" << n << '\n'
      << "input_bits\t" << in.bits_consumed << '\n'
      << "ibar\t" << format_real(r.trace.average) << '\n';
  return kExitSuccess;
}

int cmd_certify(const Settings& s, std::ostream& out) {
  Settings eff = s;
  if (s.has("params_from")) {
    const ReportFile rf = load_report(s.required("params_from"));
    std::string part;
    for (double b : rf.report.partition) part += (part.empty() ? "" : ",") + format_real(b);
    const std::string origin = s.required("params_from");
    eff.set("eps", format_real(rf.report.eps), origin);
    eff.set("delta", format_real(rf.report.delta), origin);
    eff.set("partition", part, origin);
    eff.set("rate", rf.report.rate_name, origin);
  }
  const Transcript t = load_transcript(eff.required("transcript"));
  const BellCoefficients c = coefficients_by_id(t.coefficients_id);
  const CertificationReport r = certify(t, c, rate_field(eff), partition_field(eff, c), params_field(eff));
  with_output(eff, "out", out, [&](std::ostream& os) { write_report(os, r); });
  return r.vacuous ? kExitAbort : kExitSuccess;
}

int cmd_extract(const Settings& s, std::ostream& out, std::ostream& err) {
  const Transcript t = load_transcript(s.required("transcript"));
  const ReportFile rf = load_report(s.required("report"));
  const CertificationReport& r = rf.report;
  if (r.n != t.n() || estimate_ihat(t, coefficients_by_id(t.coefficients_id)) != r.i_hat) {
    throw Error("report does not belong to this transcript");
  }
  if (r.vacuous) {
    err << "refusing to extract: certified min-entropy bound " << format_real(r.minentropy_bound)
        << " is not positive\n";
    return kExitAbort;
  }
  const double eps_ext = s.real("eps_ext", "1e-6");
  const BitString raw = encode_outputs(t);
  ExtractorParams p;
  p.n_in = raw.size();
  p.eps_ext = eps_ext;
  p.xi = std::min(s.parse<std::size_t>("eps_ext", "1e-6", [&](const std::string&) { return output_length(r.minentropy_bound, eps_ext); }),
                  raw.size());
  if (p.xi == 0) {
    err << "refusing to extract: bound " << format_real(r.minentropy_bound) << " leaves no output at eps_ext "
        << format_real(eps_ext) << '\n';
    return kExitAbort;
  }
  const std::uint64_t seed = s.u64("seed", "1");
  auto src = source_field(s, "seed_bits", seed, "extractor-seed");
  BitString key;
  for (std::size_t i = 0; i < p.seed_length(); ++i) key.push_back(src->next_bit() != 0);
  const BitString z = toeplitz_extract(raw, key, p);
  write_bits(s.required("out"), z);
  out << "bits\t" << z.size() << '\n' << "bytes\t" << (z.size() + 7) / 8 << '\n' << "seed_bits\t" << key.size() << '\n';
  return kExitSuccess;
}

int cmd_expand(const Settings& s, std::ostream& out) {
  const auto strategy = strategy_field(s, "strategy");
  const ExpansionConfig cfg = expansion_field(s, "q", "1/4");
  const std::uint64_t seed = s.u64("seed", "1");
  auto in_src = source_field(s, "input_bits", seed, "inputs");
  auto seed_src = source_field(s, "seed_bits", seed, "extractor-seed");
  InteractionEngine engine(strategy, derive_seed(seed, "device"));
  const ExpansionResult r = expand_once(engine, cfg, *in_src, *seed_src);
  const std::string status = status_name(r.status);
  if (s.has("report")) {
    with_output(s, "report", out, [&](std::ostream& os) {
      if (r.report)
        write_report(os, *r.report, &r.ledger, &status);
      else
        os << "#bellrand-report\t" << kFormatVersion << "\nstatus\t" << status << '\n';
    });
  }
  if (r.ok() && s.has("out")) write_bits(s.required("out"), r.output);
  out << "status\t" << status << '\n';
  if (!r.reason.empty()) out << "reason\t" << r.reason << '\n';
  if (r.report) out << "i_hat\t" << format_real(r.report->i_hat) << '\n' << "ell\t" << r.report->ell << '\n';
  print_ledger(out, r.ledger);
  return r.ok() ? kExitSuccess : kExitAbort;
}

int cmd_compose(const Settings& s, std::ostream& out) {
  ComposeConfig cfg;
  cfg.strategy_a = strategy_field(s, "strategy");
  cfg.strategy_b = strategy_field(s, "strategy_b");
  cfg.iterations = s.count("iterations", "2");
  const std::uint64_t seed = s.u64("seed", "1");
  cfg.device_seed_a = derive_seed(seed, "device-a");
  cfg.device_seed_b = derive_seed(seed, "device-b");
  const std::string policy = s.str("policy", "release-last");
  if (policy == "release-last")
    cfg.policy = ReleasePolicy::kReleaseLast;
  else if (policy == "release-each")
    cfg.policy = ReleasePolicy::kReleaseEach;
  else
    throw FieldError("field 'policy': expected release-last or release-each, got '" + policy + "'");
  const ExpansionConfig first = expansion_field(s, "q", "1/4");
  const std::string q_next = s.str("q_next", "auto");
  cfg.fund_q_from_output = q_next == "auto";
  ExpansionConfig later = expansion_field(s, "q_next", cfg.fund_q_from_output ? "1/4" : q_next);
  cfg.activations = {first, later};
  if (cfg.iterations == 0) throw FieldError("field 'iterations': must be at least 1");
  auto in_src = source_field(s, "input_bits", seed, "inputs");
  auto seed_src = source_field(s, "seed_bits", seed, "extractor-seed");
  const ComposeResult r = compose(cfg, *in_src, *seed_src);

  auto write = [&](std::ostream& os) {
    os << "#bellrand-compose\t" << kFormatVersion << '\n'
       << "status\t" << status_name(r.status) << '\n'
       << "completed\t" << r.completed << '\n'
       << "iterations\t" << cfg.iterations << '\n'
       << "policy\t" << policy << '\n';
    if (!r.reason.empty()) os << "reason\t" << r.reason << '\n';
    print_ledger(os, r.ledger);
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      const auto& run = r.runs[i];
      os << "begin\tactivation\t" << i + 1 << '\t' << (i % 2 == 0 ? "A" : "B") << '\t' << status_name(run.status) << '\n';
      if (run.report) {
        std::ostringstream rep;
        const std::string st = status_name(run.status);
        write_report(rep, *run.report, &run.ledger, &st);
        std::string body = rep.str();
        os << body.substr(body.find('\n') + 1);
      } else {
        print_ledger(os, run.ledger);
      }
      os << "end\tactivation\t" << i + 1 << '\n';
    }
  };
  if (s.has("report")) with_output(s, "report", out, write);
  if (s.has("out") && !r.released.empty()) write_bits(s.required("out"), r.released);
  write(out);
  out << "released_bits\t" << r.released.size() << '\n';
  return r.ok() ? kExitSuccess : kExitAbort;
}

int cmd_oracle(const Settings& s, const std::string& suite, std::ostream& out) {
  const BellCoefficients c = chsh();
  const RateFunction rate = chsh_analytic_rate();
  int pass = 0, fail = 0;
  auto line = [&](bool ok, const std::string& text) {
    (ok ? pass : fail)++;
    out << (ok ? "PASS" : "FAIL") << '\t' << text << '\n';
  };
  const bool all = suite == "all";
  if (!all && suite != "path-bound" && suite != "good-event" && suite != "extractor")
    throw FieldError("suite: expected path-bound, good-event, extractor or all, got '" + suite + "'");
  auto cap = [&](std::size_t n) {
    if (n > static_cast<std::size_t>(kMaxOracleRounds))
      throw EnumerationLimit("field 'max_n': " + std::to_string(n) + " exceeds the enumeration cap of " +
                             std::to_string(kMaxOracleRounds) + " rounds");
    if (n == 0) throw FieldError("field 'max_n': must be positive");
    return static_cast<int>(n);
  };
  if (all || suite == "path-bound") {
    const int max_n = cap(s.count("max_n", "3"));
    for (int n = 1; n <= max_n; ++n)
      for (const auto& st : strategy_library(n / 2)) {
        auto r = check_path_bound(st, n, rate, c);
        line(r.holds, "path-bound\t" + st->name() + "\tn=" + std::to_string(n) + "\tpaths=" +
                          std::to_string(r.paths_checked) + "\tworst_ratio=" + format_real(r.worst_ratio));
      }
  }
  if (all || suite == "good-event") {
    const int max_n = cap(s.count("max_n", "2"));
    const auto uniform = InputDistribution::uniform(2, 2);
    const auto part = IntervalPartition::chsh_default();
    for (int n = 2; n <= max_n; ++n)
      for (double eps : {0.05, 0.3})
        for (double delta : {0.1, 0.3})
          for (const auto& st : strategy_library(n / 2)) {
            auto g = oracle_good_event(st, uniform, n, part, {eps, delta}, rate, c);
            const std::string tag = "good-event\t" + st->name() + "\tn=" + std::to_string(n) + "\teps=" +
                                    format_real(eps) + "\tdelta=" + format_real(delta);
            line(g.probability_bound_holds(), tag + "\tp_good=" + format_real(g.p_good) + "\trequired=" +
                                                  format_real(g.required_p_good));
            line(g.guessing_bound_holds(), tag + "\tcells=" + std::to_string(g.cells.size()));
          }
  }
  if (all || suite == "extractor") {
    const std::uint64_t seed = s.u64("seed", "1");
    for (auto [n_in, xi, k] : {std::array<std::size_t, 3>{4, 1, 3}, {4, 2, 3}, {6, 2, 4}}) {
      auto r = leftover_hash_check(n_in, xi, k, 20000, seed);
      line(r.holds(), "extractor\tn_in=" + std::to_string(n_in) + "\txi=" + std::to_string(xi) + "\tk=" +
                          std::to_string(k) + "\tsources=" + std::to_string(r.sources_checked) +
                          (r.exhaustive ? "\texhaustive" : "\tstructured") + "\tworst=" + format_real(r.worst_distance) +
                          "\tbound=" + format_real(r.bound));
    }
  }
  out << "summary\t" << pass << " passed\t" << fail << " failed\n";
  return fail == 0 ? kExitSuccess : kExitError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomness expansion from sequential Bell experiments", "bellrand"};
  app.require_subcommand(1);
  std::map<std::string, std::string> flags;
  std::string config_path, suite, positional;

  // Options shared by every subcommand (only the relevant ones are read).
  auto add = [&](CLI::App* sub, const std::string& key, const std::string& help) {
    std::string flag = "--" + key;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    sub->add_option_function<std::string>(flag, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  auto common = [&](CLI::App* sub) { sub->add_option("--config", config_path, "tab-separated key/value file; overrides flags"); };
  auto expansion = [&](CLI::App* sub) {
    add(sub, "n", "rounds");
    add(sub, "q", "input bias, exact rational or decimal in (0, 1/4]");
    add(sub, "partition", "comma-separated interval boundaries");
    add(sub, "eps", "estimator tolerance");
    add(sub, "delta", "entropy slack per round");
    add(sub, "eps_ext", "extractor error");
    add(sub, "rate", "chsh-analytic, brute-force-envelope or table:<path>");
    add(sub, "abort_ell", "lowest accepted interval index");
    add(sub, "seed", "global seed");
    add(sub, "input_bits", "raw file of input-sampling bits");
    add(sub, "seed_bits", "raw file of extractor seed bits");
  };

  auto* sim = app.add_subcommand("simulate", "run a device and write a transcript");
  common(sim);
  add(sim, "strategy", "device descriptor");
  add(sim, "n", "rounds");
  add(sim, "q", "input bias");
  add(sim, "seed", "global seed");
  add(sim, "input_bits", "raw file of input-sampling bits");
  add(sim, "out", "transcript path");

  auto* cer = app.add_subcommand("certify", "certify a transcript");
  common(cer);
  cer->add_option("transcript", positional, "transcript path")->required();
  add(cer, "eps", "estimator tolerance");
  add(cer, "delta", "entropy slack per round");
  add(cer, "partition", "comma-separated interval boundaries");
  add(cer, "rate", "rate function name");
  add(cer, "params_from", "take eps, delta, partition and rate from this report");
  add(cer, "out", "report path (default stdout)");

  auto* ext = app.add_subcommand("extract", "extract bits from a certified transcript");
  common(ext);
  add(ext, "transcript", "transcript path");
  add(ext, "report", "report path");
  add(ext, "eps_ext", "extractor error");
  add(ext, "seed", "global seed");
  add(ext, "seed_bits", "raw file of extractor seed bits");
  add(ext, "out", "output path (bytes, plus .meta)");

  auto* exp = app.add_subcommand("expand", "one expansion run on one device");
  common(exp);
  expansion(exp);
  add(exp, "strategy", "device descriptor");
  add(exp, "out", "output bits path");
  add(exp, "report", "report path");

  auto* cmp = app.add_subcommand("compose", "alternate two devices");
  common(cmp);
  expansion(cmp);
  add(cmp, "strategy", "device A descriptor");
  add(cmp, "strategy_b", "device B descriptor");
  add(cmp, "iterations", "activations");
  add(cmp, "q_next", "q for later activations, or auto");
  add(cmp, "policy", "release-last or release-each");
  add(cmp, "out", "released bits path");
  add(cmp, "report", "report path");

  auto* orc = app.add_subcommand("oracle", "exhaustive checks");
  common(orc);
  orc->add_option("suite", suite, "path-bound, good-event, extractor or all")->required();
  add(orc, "max_n", "largest n enumerated");
  add(orc, "seed", "seed for sampled extractor sources");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    Settings s;
    for (const auto& [k, v] : flags) {
      std::string flag = "--" + k;
      for (auto& ch : flag)
        if (ch == '_') ch = '-';
      s.set(k, v, flag);
    }
    if (!config_path.empty()) s.load_config(config_path);
    if (cer->parsed()) {
      if (!s.has("transcript")) s.set("transcript", positional, "argument");
      return cmd_certify(s, out);
    }
    if (sim->parsed()) return cmd_simulate(s, out);
    if (ext->parsed()) return cmd_extract(s, out, err);
    if (exp->parsed()) return cmd_expand(s, out);
    if (cmp->parsed()) return cmd_compose(s, out);
    if (orc->parsed()) return cmd_oracle(s, suite, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace bellrand::cli
