#pragma once

#include <functional>
#include <vector>

#include "qlab/lattice.hpp"
#include "qlab/potential.hpp"
#include "qlab/types.hpp"

namespace qlab {

// Single-site MCMC for the finite-volume Gibbs measures. All randomness is
// counter-based in (seed, sweep, site), so trajectories are bit-reproducible
// and checkerboard updates are order-independent within a color.
struct ChainState {
  Region region;
  Vec phi;
  long sweep = 0;
  uint64_t seed = 1;
};

ChainState init_chain(const Region& r, const BC& psi, uint64_t seed);

struct McmcParams {
  long sweeps = 4000;      // total, burn-in included
  double burn_frac = 0.2;  // burn-in fraction (at least min_burn sweeps)
  long min_burn = 1000;
  int batches = 20;        // batch-means batches
  Real step = 1.0;         // metropolis proposal sd (auto-tuned during burn-in)
  bool random_scan = false;
  int tune_interval = 50;
  long burn(long total) const {
    long b = static_cast<long>(burn_frac * static_cast<double>(total));
    return std::min(total, std::max(b, min_burn));
  }
};

// exact heat-bath conditional N(mean, sd^2) at a site given the current field
struct Conditional {
  Real mean, sd;
};
Conditional conditional_at(const ChainState& st, const Model& m, const BC& psi, const Coord& x);

// energy of the terms containing site x when phi(x) = value
Real local_energy(const ChainState& st, const Model& m, const BC& psi, const Coord& x, Real value);

void heat_bath_sweep(ChainState& st, const Model& m, const BC& psi, bool random_scan = false);

struct MetroStats {
  long proposed = 0, accepted = 0;
  Real rate() const { return proposed ? static_cast<Real>(accepted) / proposed : 0.0; }
};
MetroStats metropolis_sweep(ChainState& st, const Model& m, const BC& psi, Real step);

// Drive a chain: burn-in (with metropolis step tuning toward 0.44 acceptance,
// burn-in only), then call measure(phi) after every post-burn sweep.
struct RunInfo {
  Real acceptance = 1.0;  // post-burn acceptance (1.0 for heat-bath)
  Real tuned_step = 0.0;
  long measured = 0;
};
RunInfo run_chain(ChainState& st, const Model& m, const BC& psi, const McmcParams& p,
                  const std::function<void(const Vec&)>& measure);

// scalar batch-means accumulator
class BatchAcc {
 public:
  void add(Real v) { vals_.push_back(v); }
  long count() const { return static_cast<long>(vals_.size()); }
  Real mean() const;
  Real se(int batches = 20) const;

 private:
  std::vector<Real> vals_;
};

// per-component batch means for vector observables
class VecBatchAcc {
 public:
  VecBatchAcc(long dim, long total, int batches);
  void add(const Vec& v);
  Vec mean() const;
  Vec se() const;

 private:
  long dim_, total_, per_batch_;
  int batches_;
  long seen_ = 0;
  Mat sums_;  // batches x dim
};

// Gelman-Rubin potential scale reduction for a scalar observable
Real gelman_rubin(const std::vector<std::vector<Real>>& chains);

// (1/|Lambda|) sum over interior bonds of (grad phi - u.(y-x))^2
Real energy_density(const ChainState& st, const Vec& u);

// sum_{y ~ x} V'(phi(x)-phi(y)) for every interior site (boundary neighbors
// frozen to psi); the Gibbs stationarity identity makes its mean lambda xi(x)
Vec ward_vector(const ChainState& st, const Model& m, const BC& psi);

// signed boundary flux sum_{x in Lambda, y ~ x outside} V'(phi(x) - psi(y))
Real boundary_flux(const ChainState& st, const Model& m, const BC& psi);

}  // namespace qlab
