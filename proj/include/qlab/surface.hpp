#pragma once

#include <vector>

#include "qlab/gaussian.hpp"
#include "qlab/sampler.hpp"

namespace qlab {

// Gauss-Legendre rule on [0,1], nodes ascending (Newton on the Legendre recurrence).
struct Quadrature {
  std::vector<Real> x, w;
};
Quadrature gauss_legendre(int n);

// same disorder realization with every cosine amplitude scaled by t; t=0 is
// the exact-Gaussian member of the family
Model scale_eps(const Model& m, Real t);

// d/dt of the energy along that family: sum over bonds touching the volume of
// eps_b cos(eta(b)), boundary endpoints frozen to psi
Real delta_h(const ChainState& st, const Model& m, const BC& psi);

// log Z by thermodynamic integration from the Gaussian member:
//   log Z(1) = log Z(0) - int_0^1 < delta_h >_t dt,
// node means estimated by MCMC; quad_gap compares an n-node rule with the
// 2n-node rule actually reported.
struct ThermoResult {
  Real log_z = 0, se = 0;
  Real sigma = 0, sigma_se = 0;
  Real quad_gap = 0;
};
ThermoResult log_partition_thermo(const Region& r, const Model& m, const BC& psi,
                                  const McmcParams& p, uint64_t seed, int nodes = 8);
ThermoResult sigma_thermo(const Region& r, const Model& m, const Vec& u, const McmcParams& p,
                          uint64_t seed, int nodes = 8);

// sigma averaged over the cube cells of block_partition(d, N, n)
struct BlockSigma {
  std::vector<Real> per_cube;
  Real mean_sigma = 0;
  Real dropped_fraction = 0;
};
BlockSigma block_average_sigma(int d, int N, int n, const Model& m, const Vec& u);

// --- approximate subadditivity of the normalized free energy ---
// For a quadratic site-disorder model,
//   f_X = -log Z_X^{psi_u}[xi] + lambda sum_{x in X} (u.x) xi(x)
//         + |X| (log_c - sum_i V(u_i)/2).
// Cutting a box B at interior column t along an axis leaves non-adjacent
// halves L, R and the frozen column S between them; Z then factors over L and
// R, and f_B <= f_L + f_R holds exactly when log_c <= split_logc_max.

Real tilt_xi_sum(const Region& X, const ModelA& A, const Vec& u);
Real f_functional(const Region& X, const ModelA& A, const Vec& u, Real log_c);

struct Split {
  Region left, right, column;
  int axis = 0, t = 0;
};
Split split_at(const Region& B, int axis, int t);

Real split_logc_max(const Region& B, const ModelA& A, const Vec& u, int axis, int t);
// minimum over every axis and admissible interior cut
Real min_split_logc_max(const Region& B, const ModelA& A, const Vec& u);

// analytic per-site floor log sqrt(pi/(2 d a)): peeling one site against
// frozen neighbors can never cost more than this
Real one_site_log_floor(int d, Real a);

// Measured cost of peeling one height against frozen neighbor heights:
//   integral exp(-sum_y V(s - h_y) + xi s) ds
//     / exp(-1/2 sum_y V(gamma - h_y) + xi gamma),
// the one-site integral by adaptive quadrature against its half-energy anchor
// at gamma. Always > 0; for quadratic V with all neighbors equal and gamma at
// their common value it equals sqrt(2 pi var) of the one-site conditional.
Real one_site_ratio(const PotentialSpec& V, const std::vector<Real>& neighbors, Real xi,
                    Real gamma);

}  // namespace qlab
