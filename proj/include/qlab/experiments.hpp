#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qlab/config.hpp"
#include "qlab/potential.hpp"
#include "qlab/report.hpp"

namespace qlab {

// Named scenario runners: each binds the exact/MCMC engines to one family of
// claims and returns a structured verdict plus per-measurement CSV rows.
struct ScenarioReport {
  std::string scenario;
  nlohmann::json params;
  std::vector<Check> checks;
  std::vector<CsvRow> rows;
  double wall_seconds = 0;
  std::string manifest_hash;  // sha256 of the canonical config text
  bool pass() const {
    for (const Check& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

std::string report_jsonl(const ScenarioReport& r);

// per-instance seeds derived from the master seed
uint64_t derive_seed(uint64_t master, long index);

SiteDisorderSpec site_spec_from(const RunConfig& cfg, uint64_t instance_seed);
BondDisorderSpec bond_spec_from(const RunConfig& cfg, uint64_t instance_seed);

ScenarioReport run_slln(const RunConfig& cfg);
ScenarioReport run_scaling(const RunConfig& cfg);
ScenarioReport run_tilt(const RunConfig& cfg);
ScenarioReport run_deloc(const RunConfig& cfg);
ScenarioReport run_shift_covariance(const RunConfig& cfg);
ScenarioReport run_ward(const RunConfig& cfg);

ScenarioReport run_scenario(const RunConfig& cfg);

}  // namespace qlab
