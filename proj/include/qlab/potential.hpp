#pragma once

#include <cmath>
#include <functional>
#include <variant>

#include "qlab/disorder.hpp"
#include "qlab/types.hpp"

namespace qlab {

// V(s) = a s^2 + eps cos(s); even, with a s^2 - eps <= V and V'' <= 2a + eps.
struct PotentialSpec {
  Real a = 0.5;
  Real eps = 0.0;
  Real operator()(Real s) const { return a * s * s + eps * std::cos(s); }
  Real d1(Real s) const { return 2.0 * a * s - eps * std::sin(s); }
  Real d2(Real s) const { return 2.0 * a - eps * std::cos(s); }
  bool quadratic() const { return eps == 0.0; }
};

// Model A: common potential on every bond plus a quenched site field coupling
// +lambda sum_x xi(x) phi(x) in the Gibbs exponent. Model B: quenched i.i.d.
// bond potentials, no site field. Energies count each undirected bond touching
// the volume exactly once; boundary endpoints are frozen to the boundary
// condition.
struct ModelA {
  Real a = 0.5;
  Real eps = 0.0;
  SiteDisorderSpec xi;
};

struct ModelB {
  BondDisorderSpec omega;
};

using Model = std::variant<ModelA, ModelB>;

inline bool exactly_gaussian(const Model& m) {
  if (std::holds_alternative<ModelA>(m)) return std::get<ModelA>(m).eps == 0.0;
  return std::get<ModelB>(m).omega.eps_max == 0.0;
}

inline PotentialSpec bond_potential(const Model& m, const Bond& b) {
  if (std::holds_alternative<ModelA>(m)) {
    const auto& A = std::get<ModelA>(m);
    return {A.a, A.eps};
  }
  BondCoeff w = omega_at(std::get<ModelB>(m).omega, b);
  return {w.c, w.eps};
}

// quadratic-part stiffness V'' of the Gaussian reference: 2a or 2c_b
inline Real stiffness(const Model& m, const Bond& b) {
  if (std::holds_alternative<ModelA>(m)) return 2.0 * std::get<ModelA>(m).a;
  return 2.0 * omega_at(std::get<ModelB>(m).omega, b).c;
}

inline Real site_source(const Model& m, const Coord& x) {
  if (std::holds_alternative<ModelA>(m)) {
    const auto& A = std::get<ModelA>(m);
    return A.xi.lambda * xi_at(A.xi, x);
  }
  return 0.0;
}

// boundary condition as a height function on boundary sites
using BC = std::function<Real(const Coord&)>;

inline BC tilt_bc(Vec u) {
  return [u = std::move(u)](const Coord& x) {
    Real s = 0;
    for (int k = 0; k < x.size(); ++k) s += u[k] * x[k];
    return s;
  };
}

inline BC zero_bc() {
  return [](const Coord&) { return 0.0; };
}

inline Real dot_tilt(const Vec& u, const Coord& x) {
  Real s = 0;
  for (int k = 0; k < x.size(); ++k) s += u[k] * x[k];
  return s;
}

}  // namespace qlab
