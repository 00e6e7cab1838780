#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "bellrand/cli.hpp"

namespace fs = std::filesystem;
using bellrand::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("bellrand_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate is deterministic per seed") {
  TempDir d("cli_sim");
  for (const char* f : {"a.tsv", "b.tsv"})
    REQUIRE(cli({"simulate", "--strategy", "honest", "--n", "100", "--seed", "1", "--out", d / f}).code == 0);
  CHECK(slurp(d / "a.tsv") == slurp(d / "b.tsv"));
  REQUIRE(cli({"simulate", "--strategy", "honest", "--n", "100", "--seed", "2", "--out", d / "c.tsv"}).code == 0);
  CHECK(slurp(d / "a.tsv") != slurp(d / "c.tsv"));
}

TEST_CASE("configuration errors name the field") {
  TempDir d("cli_err");
  const Result unknown = cli({"simulate", "--strategy", "quantum-magic", "--out", d / "t.tsv"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("'strategy'") != std::string::npos);
  const Result q = cli({"simulate", "--strategy", "honest", "--q", "0.3", "--out", d / "t.tsv"});
  CHECK(q.code == 1);
  CHECK(q.err.find("'q'") != std::string::npos);
  CHECK(q.err.find("(0, 1/4]") != std::string::npos);
  spit(d / "cfg.tsv", "n\t10\nflavour\tsweet\n");
  const Result cfg = cli({"simulate", "--config", d / "cfg.tsv", "--strategy", "honest", "--out", d / "t.tsv"});
  CHECK(cfg.code == 1);
  CHECK(cfg.err.find("cfg.tsv:2") != std::string::npos);
}

TEST_CASE("config file values override flags") {
  TempDir d("cli_cfg");
  spit(d / "cfg.tsv", "# rounds\nn\t50\n");
  const Result r = cli({"simulate", "--config", d / "cfg.tsv", "--strategy", "honest", "--n", "10", "--out", d / "t.tsv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("n\t50\n") != std::string::npos);
}

TEST_CASE("certify a top-interval run") {
  TempDir d("cli_cert");
  REQUIRE(cli({"simulate", "--strategy", "honest", "--n", "10000", "--seed", "1", "--out", d / "t.tsv"}).code == 0);
  const Result r = cli({"certify", d / "t.tsv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("ell\t3\n") != std::string::npos);
  CHECK(r.out.find("eps\t0.05\n") != std::string::npos);
  CHECK(r.out.find("delta\t0.01\n") != std::string::npos);
  CHECK(r.out.find("bound_formula\tn*f(J_ell)-delta*n-1\n") != std::string::npos);
}

TEST_CASE("certify reports the offending transcript line") {
  TempDir d("cli_bad");
  REQUIRE(cli({"simulate", "--strategy", "honest", "--n", "5", "--out", d / "t.tsv"}).code == 0);
  std::string text = slurp(d / "t.tsv");
  std::istringstream is(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(is, l);) lines.push_back(l);
  lines[lines.size() - 2] = "4\t0\t0\t7\t0";
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  spit(d / "t.tsv", out);
  const Result r = cli({"certify", d / "t.tsv"});
  CHECK(r.code == 1);
  CHECK(r.err.find(":" + std::to_string(lines.size() - 1) + ":") != std::string::npos);
}

TEST_CASE("re-certifying from a report's parameters is idempotent") {
  TempDir d("cli_idem");
  REQUIRE(cli({"simulate", "--strategy", "partial:2.7", "--n", "2000", "--q", "1/8", "--out", d / "t.tsv"}).code == 0);
  const Result first = cli({"certify", d / "t.tsv", "--eps", "0.1", "--delta", "0.02", "--partition", "2,2.3,2.5",
                            "--out", d / "r1.tsv"});
  REQUIRE(first.code != 1);
  const Result second = cli({"certify", d / "t.tsv", "--params-from", d / "r1.tsv", "--out", d / "r2.tsv"});
  REQUIRE(second.code == first.code);
  CHECK(slurp(d / "r1.tsv") == slurp(d / "r2.tsv"));
}

TEST_CASE("extract") {
  TempDir d("cli_ext");
  REQUIRE(cli({"simulate", "--strategy", "honest", "--n", "10000", "--out", d / "t.tsv"}).code == 0);
  REQUIRE(cli({"certify", d / "t.tsv", "--out", d / "r.tsv"}).code == 0);
  for (const char* f : {"a.bin", "b.bin"})
    REQUIRE(cli({"extract", "--transcript", d / "t.tsv", "--report", d / "r.tsv", "--seed", "9", "--out", d / f}).code == 0);
  CHECK(slurp(d / "a.bin") == slurp(d / "b.bin"));
  CHECK(fs::file_size(d / "a.bin") == (3473 + 7) / 8);
  CHECK(slurp(d / "a.bin.meta").find("bits\t3473") != std::string::npos);

  REQUIRE(cli({"simulate", "--strategy", "deterministic:00:00", "--n", "1000", "--out", d / "c.tsv"}).code == 0);
  CHECK(cli({"certify", d / "c.tsv", "--out", d / "cr.tsv"}).code == 2);
  const Result refused = cli({"extract", "--transcript", d / "c.tsv", "--report", d / "cr.tsv", "--out", d / "c.bin"});
  CHECK(refused.code == 2);
  CHECK(refused.err.find("refusing") != std::string::npos);
  CHECK_FALSE(fs::exists(d / "c.bin"));
  CHECK(cli({"extract", "--transcript", d / "c.tsv", "--report", d / "r.tsv", "--out", d / "c.bin"}).code == 1);
}

TEST_CASE("expand and compose statuses") {
  TempDir d("cli_run");
  const Result ok = cli({"expand", "--strategy", "honest", "--n", "10000", "--out", d / "o.bin"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("bits_out\t3473\n") != std::string::npos);
  CHECK(fs::exists(d / "o.bin"));
  const Result classical = cli({"expand", "--strategy", "deterministic:00:00", "--n", "1000", "--out", d / "x.bin"});
  CHECK(classical.code == 2);
  CHECK_FALSE(fs::exists(d / "x.bin"));

  const Result both = cli({"compose", "--strategy", "honest", "--strategy-b", "honest", "--n", "10000", "--seed", "1",
                           "--out", d / "c.bin", "--report", d / "c.tsv"});
  CHECK(both.code == 0);
  CHECK(both.out.find("bits_in_inputs") != std::string::npos);
  const Result mixed = cli({"compose", "--strategy", "honest", "--strategy-b", "deterministic:00:00", "--n", "1000",
                            "--out", d / "m.bin"});
  CHECK(mixed.code == 2);
  CHECK(mixed.out.find("abort") != std::string::npos);
  CHECK_FALSE(fs::exists(d / "m.bin"));
}

TEST_CASE("oracle suites") {
  const Result pb = cli({"oracle", "path-bound", "--max-n", "3"});
  CHECK(pb.code == 0);
  CHECK(pb.out.find("FAIL") == std::string::npos);
  const Result ge = cli({"oracle", "good-event", "--max-n", "2"});
  CHECK(ge.code == 0);
  CHECK(ge.out.find("FAIL") == std::string::npos);
  const Result cap = cli({"oracle", "path-bound", "--max-n", "12"});
  CHECK(cap.code == 1);
  CHECK(cap.err.find("cap") != std::string::npos);
  CHECK(cli({"oracle", "everything"}).code == 1);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"simulate", "--help"}).code == 0);
}

}  // TEST_SUITE
