#include "bellrand/formats.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "bellrand/errors.hpp"

namespace bellrand {
namespace {

std::string header(const char* kind) { return std::string("#bellrand-") + kind; }

// Reads the version line; throws on other kinds or versions.
void expect_header(std::istream& is, const char* kind, const std::string& source, std::size_t& ln) {
  std::string line;
  ++ln;
  if (!std::getline(is, line)) throw ParseError(source, ln, "empty file");
  auto f = split_tabs(line);
  if (f.size() != 2 || f[0] != header(kind)) throw ParseError(source, ln, "expected '" + header(kind) + "' header");
  std::int64_t v = 0;
  try {
    v = parse_int(f[1]);
  } catch (const Error&) {
    throw ParseError(source, ln, "bad format version");
  }
  if (v != kFormatVersion) throw ParseError(source, ln, "unsupported format version " + f[1]);
}

template <class F>
auto at_line(const std::string& source, std::size_t ln, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source, ln, e.what());
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_real(const std::string& s) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw DomainError("not a number: '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s) {
  std::int64_t v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw DomainError("not an integer: '" + s + "'");
  return v;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> f;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    f.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (!f.empty() && !f.back().empty() && f.back().back() == '\r') f.back().pop_back();
  return f;
}

BellCoefficients coefficients_by_id(const std::string& id) {
  if (id == "chsh") return chsh();
  throw DomainError("unknown coefficient table '" + id + "'");
}

// ---------------------------------------------------------------------------
// Transcripts

void write_transcript(std::ostream& os, const Transcript& t) {
  os << header("transcript") << '\t' << kFormatVersion << '\n';
  os << "alphabets\t" << t.alphabets.a << '\t' << t.alphabets.b << '\t' << t.alphabets.x << '\t' << t.alphabets.y << '\n';
  os << "coefficients\t" << t.coefficients_id << '\n';
  os << "inputs";
  for (const auto& p : t.input_dist.exact_table()) os << '\t' << p.to_string();
  os << '\n';
  os << "seed\t" << t.seed << '\n';
  os << "n\t" << t.n() << '\n';
  for (std::size_t j = 0; j < t.rounds.size(); ++j) {
    const auto& r = t.rounds[j];
    os << j + 1 << '\t' << r.x << '\t' << r.y << '\t' << r.a << '\t' << r.b << '\n';
  }
}

Transcript read_transcript(std::istream& is, const std::string& source) {
  std::size_t ln = 0;
  expect_header(is, "transcript", source, ln);
  Transcript t;
  bool have_alph = false, have_inputs = false, have_coef = false, have_seed = false;
  std::vector<Rational> inputs;
  std::size_t n = 0;
  std::string line;
  // Header fields, up to and including n.
  for (;;) {
    ++ln;
    if (!std::getline(is, line)) throw ParseError(source, ln, "missing 'n' field");
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    const std::string& key = f[0];
    at_line(source, ln, [&] {
      if (key == "alphabets") {
        if (f.size() != 5) throw ParseError(source, ln, "alphabets needs 4 sizes");
        t.alphabets = {static_cast<int>(parse_int(f[1])), static_cast<int>(parse_int(f[2])),
                       static_cast<int>(parse_int(f[3])), static_cast<int>(parse_int(f[4]))};
        if (t.alphabets.a <= 0 || t.alphabets.b <= 0 || t.alphabets.x <= 0 || t.alphabets.y <= 0)
          throw ParseError(source, ln, "alphabet sizes must be positive");
        have_alph = true;
      } else if (key == "coefficients") {
        if (f.size() != 2) throw ParseError(source, ln, "coefficients needs one id");
        coefficients_by_id(f[1]);
        t.coefficients_id = f[1];
        have_coef = true;
      } else if (key == "inputs") {
        inputs.clear();
        for (std::size_t i = 1; i < f.size(); ++i) inputs.push_back(Rational::parse(f[i]));
        have_inputs = true;
      } else if (key == "seed") {
        if (f.size() != 2) throw ParseError(source, ln, "seed needs one value");
        std::uint64_t v = 0;
        auto r = std::from_chars(f[1].data(), f[1].data() + f[1].size(), v);
        if (f[1].empty() || r.ec != std::errc{} || r.ptr != f[1].data() + f[1].size())
          throw ParseError(source, ln, "seed is not an unsigned integer");
        t.seed = v;
        have_seed = true;
      } else if (key == "n") {
        if (f.size() != 2) throw ParseError(source, ln, "n needs one value");
        auto v = parse_int(f[1]);
        if (v <= 0) throw ParseError(source, ln, "n must be positive");
        n = static_cast<std::size_t>(v);
      } else {
        throw ParseError(source, ln, "unknown field '" + key + "'");
      }
      return 0;
    });
    if (n > 0) break;
  }
  if (!have_alph || !have_inputs || !have_coef || !have_seed) throw ParseError(source, ln, "incomplete header");
  at_line(source, ln, [&] {
    t.input_dist = InputDistribution(t.alphabets.x, t.alphabets.y, inputs);
    return 0;
  });
  t.rounds.reserve(n);
  while (t.rounds.size() < n) {
    ++ln;
    if (!std::getline(is, line))
      throw ParseError(source, ln, "expected " + std::to_string(n) + " rounds, found " + std::to_string(t.rounds.size()));
    auto f = split_tabs(line);
    if (f.size() != 5) throw ParseError(source, ln, "round record needs 5 fields");
    at_line(source, ln, [&] {
      if (parse_int(f[0]) != static_cast<std::int64_t>(t.rounds.size() + 1)) throw ParseError(source, ln, "round index out of sequence");
      RoundRecord r{static_cast<int>(parse_int(f[1])), static_cast<int>(parse_int(f[2])), static_cast<int>(parse_int(f[3])),
                    static_cast<int>(parse_int(f[4]))};
      const auto& al = t.alphabets;
      if (r.x < 0 || r.x >= al.x || r.y < 0 || r.y >= al.y || r.a < 0 || r.a >= al.a || r.b < 0 || r.b >= al.b)
        throw ParseError(source, ln, "symbol out of range");
      t.rounds.push_back(r);
      return 0;
    });
  }
  while (std::getline(is, line)) {
    ++ln;
    if (!line.empty()) throw ParseError(source, ln, "data after the last round");
  }
  return t;
}

void save_transcript(const std::string& path, const Transcript& t) {
  auto out = open_out(path);
  write_transcript(out, t);
  if (!out) throw Error("failed writing '" + path + "'");
}

Transcript load_transcript(const std::string& path) {
  auto in = open_in(path);
  return read_transcript(in, path);
}

// ---------------------------------------------------------------------------
// Reports

void write_report(std::ostream& os, const CertificationReport& r, const Ledger* ledger, const std::string* status) {
  os << header("report") << '\t' << kFormatVersion << '\n';
  if (status) os << "status\t" << *status << '\n';
  os << "n\t" << r.n << '\n';
  os << "i_hat\t" << format_real(r.i_hat) << '\n';
  os << "ell\t" << r.ell << '\n';
  os << "partition";
  for (double b : r.partition) os << '\t' << format_real(b);
  os << '\n';
  os << "eps\t" << format_real(r.eps) << '\n';
  os << "delta\t" << format_real(r.delta) << '\n';
  os << "p_min\t" << r.p_min.to_string() << '\n';
  os << "rate\t" << r.rate_name << '\n';
  os << "rate_at_boundary\t" << format_real(r.rate_at_boundary) << '\n';
  os << "bound_formula\tn*f(J_ell)-delta*n-1\n";
  os << "minentropy_bound\t" << format_real(r.minentropy_bound) << '\n';
  os << "failure_prob_bound\t" << format_real(r.failure_prob_bound) << '\n';
  os << "vacuous\t" << (r.vacuous ? 1 : 0) << '\n';
  if (ledger) {
    os << "bits_in_inputs\t" << ledger->bits_in_inputs << '\n';
    os << "bits_in_seed\t" << ledger->bits_in_seed << '\n';
    os << "bits_out\t" << ledger->bits_out << '\n';
    os << "expansion_factor_inputs\t" << format_real(ledger->expansion_factor_inputs()) << '\n';
    os << "expansion_factor_full\t" << format_real(ledger->expansion_factor_full()) << '\n';
    os << "worst_sample_depth\t" << ledger->worst_sample_depth << '\n';
  }
}

ReportFile read_report(std::istream& is, const std::string& source) {
  std::size_t ln = 0;
  expect_header(is, "report", source, ln);
  std::map<std::string, std::vector<std::string>> fields;
  std::map<std::string, std::size_t> where;
  std::string line;
  while (std::getline(is, line)) {
    ++ln;
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    if (f.size() < 2) throw ParseError(source, ln, "field without a value");
    if (fields.count(f[0])) throw ParseError(source, ln, "duplicate field '" + f[0] + "'");
    where[f[0]] = ln;
    fields[f[0]] = std::vector<std::string>(f.begin() + 1, f.end());
  }
  auto get = [&](const std::string& k) -> const std::vector<std::string>& {
    auto it = fields.find(k);
    if (it == fields.end()) throw ParseError(source, ln, "missing field '" + k + "'");
    return it->second;
  };
  auto one = [&](const std::string& k) -> const std::string& {
    const auto& v = get(k);
    if (v.size() != 1) throw ParseError(source, where[k], "field '" + k + "' needs one value");
    return v[0];
  };
  auto num = [&](const std::string& k) { return at_line(source, where[k], [&] { return parse_real(one(k)); }); };
  auto count = [&](const std::string& k) {
    return at_line(source, where[k], [&] {
      auto v = parse_int(one(k));
      if (v < 0) throw DomainError("negative count");
      return static_cast<std::uint64_t>(v);
    });
  };
  ReportFile rf;
  auto& r = rf.report;
  r.n = count("n");
  r.i_hat = num("i_hat");
  r.ell = count("ell");
  for (const auto& s : get("partition")) r.partition.push_back(at_line(source, where["partition"], [&] { return parse_real(s); }));
  r.eps = num("eps");
  r.delta = num("delta");
  r.p_min = at_line(source, where["p_min"], [&] { return Rational::parse(one("p_min")); });
  r.rate_name = one("rate");
  r.rate_at_boundary = num("rate_at_boundary");
  r.minentropy_bound = num("minentropy_bound");
  r.failure_prob_bound = num("failure_prob_bound");
  r.vacuous = count("vacuous") != 0;
  if (fields.count("status")) rf.status = one("status");
  if (fields.count("bits_in_inputs")) {
    Ledger l;
    l.bits_in_inputs = count("bits_in_inputs");
    l.bits_in_seed = count("bits_in_seed");
    l.bits_out = count("bits_out");
    l.worst_sample_depth = count("worst_sample_depth");
    rf.ledger = l;
  }
  return rf;
}

ReportFile load_report(const std::string& path) {
  auto in = open_in(path);
  return read_report(in, path);
}

// ---------------------------------------------------------------------------
// Raw bits

void write_bits(const std::string& path, const BitString& bits) {
  {
    auto out = open_out(path);
    auto bytes = bits.to_bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing '" + path + "'");
  }
  auto meta = open_out(path + ".meta");
  meta << header("bits") << '\t' << kFormatVersion << '\n' << "bits\t" << bits.size() << '\n';
}

BitString read_bits(const std::string& path) {
  const std::string mpath = path + ".meta";
  auto meta = open_in(mpath);
  std::size_t ln = 0;
  expect_header(meta, "bits", mpath, ln);
  std::string line;
  ++ln;
  if (!std::getline(meta, line)) throw ParseError(mpath, ln, "missing bit length");
  auto f = split_tabs(line);
  if (f.size() != 2 || f[0] != "bits") throw ParseError(mpath, ln, "expected 'bits' field");
  const auto n = at_line(mpath, ln, [&] { return parse_int(f[1]); });
  auto in = open_in(path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (n < 0 || static_cast<std::size_t>(n) > bytes.size() * 8 || bytes.size() != (static_cast<std::size_t>(n) + 7) / 8)
    throw ParseError(mpath, ln, "bit length does not match '" + path + "'");
  return BitString::from_bytes(bytes, static_cast<std::size_t>(n));
}

// ---------------------------------------------------------------------------
// Strategies

std::shared_ptr<const DeviceStrategy> read_strategy(std::istream& is, const std::string& source) {
  std::size_t ln = 0;
  expect_header(is, "strategy", source, ln);
  std::string name = source;
  int da = 0, db = 0, inputs = 0, outcomes = 0;
  struct Entry {
    std::size_t line;
    std::vector<std::string> f;
  };
  std::vector<Entry> state, kraus, unitary, after;
  std::string line;
  while (std::getline(is, line)) {
    ++ln;
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    const std::string key = f[0];
    at_line(source, ln, [&] {
      if (key == "name" && f.size() == 2) {
        name = f[1];
      } else if (key == "dims" && f.size() == 3) {
        da = static_cast<int>(parse_int(f[1]));
        db = static_cast<int>(parse_int(f[2]));
      } else if (key == "alphabet" && f.size() == 3) {
        inputs = static_cast<int>(parse_int(f[1]));
        outcomes = static_cast<int>(parse_int(f[2]));
      } else if (key == "state" && f.size() == 5) {
        state.push_back({ln, f});
      } else if (key == "kraus" && f.size() == 8) {
        kraus.push_back({ln, f});
      } else if (key == "unitary" && f.size() == 6) {
        unitary.push_back({ln, f});
      } else if (key == "after" && f.size() == 3) {
        after.push_back({ln, f});
      } else {
        throw ParseError(source, ln, "unknown or malformed field '" + key + "'");
      }
      return 0;
    });
  }
  if (da <= 0 || db <= 0 || inputs <= 0 || outcomes <= 0) throw ParseError(source, ln, "dims and alphabet are required");
  if (da > DeviceStrategy::kMaxComponentDim || db > DeviceStrategy::kMaxComponentDim)
    throw ParseError(source, ln, "component dimension above " + std::to_string(DeviceStrategy::kMaxComponentDim));
  const int d = da * db;
  auto index = [&](const Entry& e, std::size_t k, int lim) {
    auto v = parse_int(e.f[k]);
    if (v < 0 || v >= lim) throw ParseError(source, e.line, "index out of range");
    return static_cast<Eigen::Index>(v);
  };
  auto value = [&](const Entry& e, std::size_t k) { return Complex(parse_real(e.f[k]), parse_real(e.f[k + 1])); };

  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (const auto& e : state) at_line(source, e.line, [&] { return rho(index(e, 1, d), index(e, 2, d)) = value(e, 3); });
  std::vector<ComplexMatrix> ka(static_cast<std::size_t>(inputs * outcomes), ComplexMatrix::Zero(da, da));
  std::vector<ComplexMatrix> kb(static_cast<std::size_t>(inputs * outcomes), ComplexMatrix::Zero(db, db));
  for (const auto& e : kraus)
    at_line(source, e.line, [&] {
      const bool is_a = e.f[1] == "A";
      if (!is_a && e.f[1] != "B") throw ParseError(source, e.line, "component must be A or B");
      const int dc = is_a ? da : db;
      auto& ops = is_a ? ka : kb;
      const auto x = index(e, 2, inputs), a = index(e, 3, outcomes);
      ops[static_cast<std::size_t>(x * outcomes + a)](index(e, 4, dc), index(e, 5, dc)) = value(e, 6);
      return 0;
    });
  std::map<std::int64_t, ComplexMatrix> us;
  for (const auto& e : unitary)
    at_line(source, e.line, [&] {
      auto k = parse_int(e.f[1]);
      if (k < 0) throw ParseError(source, e.line, "negative unitary index");
      auto it = us.try_emplace(k, ComplexMatrix::Zero(d, d)).first;
      it->second(index(e, 2, d), index(e, 3, d)) = value(e, 4);
      return 0;
    });
  InterRoundSchedule sched;
  std::map<std::int64_t, std::size_t> slot;
  for (const auto& [k, m] : us) {
    slot[k] = sched.unitaries.size();
    at_line(source, ln, [&] {
      sched.unitaries.push_back(Unitary::from_matrix(m));
      return 0;
    });
  }
  std::optional<std::size_t> fallback;
  auto rounds = std::make_shared<std::map<int, std::size_t>>();
  for (const auto& e : after)
    at_line(source, e.line, [&] {
      auto k = parse_int(e.f[2]);
      if (!slot.count(k)) throw ParseError(source, e.line, "no unitary with index " + e.f[2]);
      if (e.f[1] == "*") {
        fallback = slot[k];
      } else {
        auto j = parse_int(e.f[1]);
        if (j < 1) throw ParseError(source, e.line, "round must be at least 1");
        (*rounds)[static_cast<int>(j)] = slot[k];
      }
      return 0;
    });
  sched.select = [rounds, fallback](int j) -> std::optional<std::size_t> {
    auto it = rounds->find(j);
    if (it != rounds->end()) return it->second;
    return fallback;
  };
  return at_line(source, ln, [&] {
    return std::make_shared<const DeviceStrategy>(name, DensityMatrix::from_matrix(rho),
                                                  MeasurementFamily(inputs, outcomes, std::move(ka)),
                                                  MeasurementFamily(inputs, outcomes, std::move(kb)), std::move(sched));
  });
}

std::shared_ptr<const DeviceStrategy> load_strategy(const std::string& path) {
  auto in = open_in(path);
  return read_strategy(in, path);
}

std::shared_ptr<const DeviceStrategy> strategy_from_descriptor(const std::string& descriptor) {
  auto bad = [&]() -> std::shared_ptr<const DeviceStrategy> {
    throw DomainError("unknown strategy '" + descriptor + "'");
  };
  if (descriptor == "honest") return strategy_honest_chsh();
  auto colon = descriptor.find(':');
  if (colon == std::string::npos) return bad();
  const std::string kind = descriptor.substr(0, colon), arg = descriptor.substr(colon + 1);
  if (kind == "file") return load_strategy(arg);
  if (kind == "partial") return strategy_partial(parse_real(arg));
  if (kind == "memory") {
    auto s = parse_int(arg);
    if (s < 0 || s > 1'000'000'000) return bad();
    return strategy_memory_cheater(static_cast<int>(s));
  }
  if (kind == "deterministic") {
    if (arg.size() != 5 || arg[2] != ':') return bad();
    std::array<int, 2> f{}, g{};
    const char cs[4] = {arg[0], arg[1], arg[3], arg[4]};
    for (char ch : cs)
      if (ch != '0' && ch != '1') return bad();
    f = {cs[0] - '0', cs[1] - '0'};
    g = {cs[2] - '0', cs[3] - '0'};
    return strategy_deterministic(f, g);
  }
  return bad();
}

}  // namespace bellrand
