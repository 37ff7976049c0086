#pragma once

#include <string>
#include <vector>

#include "qlab/disorder.hpp"
#include "qlab/types.hpp"

namespace qlab {

struct ParseError : ConfigError {
  using ConfigError::ConfigError;
};
struct ValidationError : ConfigError {
  explicit ValidationError(const std::vector<std::string>& issues);
  std::vector<std::string> issues;
};

enum class Scenario { slln, scaling, tilt, deloc, shift_covariance, ward };

const char* scenario_name(Scenario s);
bool scenario_from(const std::string& name, Scenario* out);

// One run = one scenario with a typed flat config (sections + key=value).
// Keys not in the scenario's schema are rejected; validation reports every
// problem, not just the first.
struct RunConfig {
  Scenario scenario = Scenario::deloc;
  uint64_t seed = 1;
  std::string outdir = "out";
  int threads = 1;

  int d = 3;
  std::vector<int> d_list;  // deloc only
  std::vector<int> N_list;

  // model: site disorder with common potential, or i.i.d. bond potentials
  bool site_model = true;
  Real a = 0.5;
  Real eps = 0.0;
  SiteDist dist = SiteDist::gaussian;
  Real p1 = 0.0, p2 = 1.0;
  Real lambda = 1.0;
  Real c_min = 0.4, c_max = 0.6, eps_max = 0.0;

  std::vector<Real> u;  // tilt; sized d after validation

  long sweeps = 4000;
  Real burn_frac = 0.2;
  Real step = 1.0;

  int n_seeds = 20;
  std::string engine = "auto";  // tilt: exact | mcmc | auto
  std::vector<int> v;           // shift_covariance translation vector
  Real clip = 3.0;
  int stride = 1;
};

// throws ParseError (syntax, with line numbers) or ValidationError (all issues)
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

// collect every validation problem; returns empty and fills *out when valid
std::vector<std::string> validate_config_text(const std::string& text, RunConfig* out = nullptr);

// canonical form: schema-ordered sections/keys, %.17g reals; parse . serialize
// is the identity on RunConfig and serialize . parse is idempotent on text
std::string serialize(const RunConfig& cfg);

// scenario catalogue with per-key schema, for the `list` subcommand
std::string list_scenarios_text();

}  // namespace qlab
