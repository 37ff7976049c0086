#pragma once

#include <string>

#include "qlab/lattice.hpp"
#include "qlab/rng.hpp"
#include "qlab/types.hpp"

namespace qlab {

// Quenched i.i.d. site field xi. Values are a pure function of (seed, site), so
// the same field restricted to different volumes is consistent by construction
// and can be shifted exactly.
enum class SiteDist { gaussian, rademacher_shifted, uniform };

struct SiteDisorderSpec {
  SiteDist dist = SiteDist::gaussian;
  Real p1 = 0.0;  // gaussian: mean; rademacher_shifted: m; uniform: lo
  Real p2 = 1.0;  // gaussian: sd;   rademacher_shifted: unused; uniform: hi
  uint64_t seed = 1;
  Real lambda = 1.0;  // coupling of the +lambda*sum xi(x)phi(x) term
  Coord shift;        // empty = no shift; xi'(x) = xi(x - shift)

  Real mean() const;
  Real second_moment() const;
  std::string describe() const;
};

Real xi_at(const SiteDisorderSpec& s, const Coord& x);
Vec xi_field(const SiteDisorderSpec& s, const Region& r);  // site order of r
SiteDisorderSpec shifted(SiteDisorderSpec s, const Coord& v);

// Quenched i.i.d. bond potentials V_b(s) = c_b s^2 + eps_b cos(s),
// c_b ~ U[c_min, c_max], eps_b ~ U[0, eps_max].
struct BondDisorderSpec {
  Real c_min = 1.0, c_max = 2.0;
  Real eps_max = 0.0;
  uint64_t seed = 1;
  Coord shift;
};

struct BondCoeff {
  Real c, eps;
};
BondCoeff omega_at(const BondDisorderSpec& s, const Bond& b);
BondDisorderSpec shifted(BondDisorderSpec s, const Coord& v);

// Certified potential envelope for the family above, exact and tight:
//   A s^2 - B  <=  V_b(s)  <=  C2_mult s^2 + B      (A = c_min, B = eps_max, C2_mult = c_max)
//   sup_s V_b''(s) = C2_curv = 2 c_max + eps_max.
// A pure multiplicative upper bound C s^2 cannot hold at s=0 once eps_max > 0
// (V_b(0) = eps_b > 0); the additive slack B above is the tight substitute and
// vanishes in the quadratic case, where the envelope is (c_min, 0, c_max).
struct Envelope {
  Real A, B, C2_mult, C2_curv;
};
Envelope envelope(const BondDisorderSpec& s);

}  // namespace qlab
