#pragma once

#include <string>
#include <vector>

#include "qlab/types.hpp"

namespace qlab {

inline constexpr const char* kToolVersion = "1.0.0";

// fixed, versioned measurement row: scenario,d,N,seed,observable,value,se,bound_lo,bound_hi,pass
struct CsvRow {
  std::string scenario;
  int d = 0;
  int N = 0;
  uint64_t seed = 0;
  std::string observable;
  Real value = 0;
  Real se = 0;
  Real bound_lo = 0;
  Real bound_hi = 0;
  bool pass = true;
};

std::string format_g17(Real v);  // shortest round-trippable decimal, %.17g
std::string csv_header();
std::string csv_line(const CsvRow& row);
std::string csv_text(const std::vector<CsvRow>& rows);

// one asserted check inside a scenario
struct Check {
  std::string name;
  Real value = 0;
  Real bound_lo = 0;
  Real bound_hi = 0;
  bool pass = true;
  std::string detail;
};
inline Check make_check(std::string name, Real value, Real lo, Real hi, std::string detail = "") {
  const bool ok = value >= lo && value <= hi;
  return {std::move(name), value, lo, hi, ok, std::move(detail)};
}

std::string sha256_hex(const std::string& bytes);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

struct OutputEntry {
  std::string path;  // basename within the output directory
  std::string sha256;
  size_t bytes = 0;
};

// manifest JSON: tool version, timestamps, config snapshot, master seed, output hashes
std::string manifest_json(const std::string& scenario, const std::string& config_text,
                          uint64_t master_seed, const std::string& started,
                          const std::string& finished, const std::vector<OutputEntry>& outputs);

std::string iso8601_now();

}  // namespace qlab
