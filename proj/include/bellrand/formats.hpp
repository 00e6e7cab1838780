#pragma once

// Line-oriented, tab-separated text formats. Every file starts with a
// "#bellrand-<kind>\t<version>" line; other versions are rejected. Input
// probabilities are written as exact rationals and reals in the shortest
// form that round-trips.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bellrand/bell.hpp"
#include "bellrand/device.hpp"
#include "bellrand/protocol.hpp"
#include "bellrand/rate.hpp"

namespace bellrand {

inline constexpr int kFormatVersion = 1;

std::string format_real(double v);
// Strict: the whole field must parse.
double parse_real(const std::string& s);
std::int64_t parse_int(const std::string& s);
std::vector<std::string> split_tabs(const std::string& line);

void write_transcript(std::ostream& os, const Transcript& t);
Transcript read_transcript(std::istream& is, const std::string& source = "<transcript>");
void save_transcript(const std::string& path, const Transcript& t);
Transcript load_transcript(const std::string& path);

// Coefficient tables referenced by transcript headers.
BellCoefficients coefficients_by_id(const std::string& id);

// The certification report, optionally followed by ledger fields.
void write_report(std::ostream& os, const CertificationReport& r, const Ledger* ledger = nullptr,
                  const std::string* status = nullptr);

struct ReportFile {
  CertificationReport report;
  std::optional<Ledger> ledger;
  std::optional<std::string> status;
};
ReportFile read_report(std::istream& is, const std::string& source = "<report>");
ReportFile load_report(const std::string& path);

// Raw bytes plus "<path>.meta" holding the true bit length.
void write_bits(const std::string& path, const BitString& bits);
BitString read_bits(const std::string& path);

// Strategy files:
//   name     <text>
//   dims     <dA> <dB>
//   alphabet <inputs> <outcomes>          (both components)
//   state    <i> <j> <re> <im>            (joint density matrix entry)
//   kraus    <A|B> <x> <a> <i> <j> <re> <im>
//   unitary  <k> <i> <j> <re> <im>        (joint unitary k)
//   after    <round|*> <k>                (U_k after that round; * = default)
// Unlisted entries are zero.
std::shared_ptr<const DeviceStrategy> read_strategy(std::istream& is, const std::string& source);
std::shared_ptr<const DeviceStrategy> load_strategy(const std::string& path);

// "honest", "deterministic:<f0><f1>:<g0><g1>", "partial:<v>",
// "memory:<switch_round>", "file:<path>".
std::shared_ptr<const DeviceStrategy> strategy_from_descriptor(const std::string& descriptor);

}  // namespace bellrand
