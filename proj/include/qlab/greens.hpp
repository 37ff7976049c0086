#pragma once

#include <memory>

#include "qlab/lattice.hpp"
#include "qlab/spd.hpp"
#include "qlab/types.hpp"

namespace qlab {

// Green's function of simple random walk killed on exiting a finite region.
// Two normalizations are exposed and pinned here once and for all:
//   G_walk = (I - P_Lambda)^{-1}   (expected visit counts, the probabilistic G)
//   G_lap  = L^{-1} = G_walk / 2d  (inverse Dirichlet Laplacian; L has diagonal
//                                   2d and -1 on neighbor pairs inside Lambda)
class GreensSolver {
 public:
  explicit GreensSolver(const Region& r);

  const Region& region() const { return r_; }

  Vec column_walk(const Coord& source) const;  // G_walk(., source)
  Vec column_lap(const Coord& source) const;   // G_lap(., source)

  Vec exit_times() const;                 // E_x tau for every site (one solve)
  Real exit_time(const Coord& x) const;   // E_x tau = sum_y G_walk(x,y)
  Real sum_all_walk() const;              // sum_{x,y} G_walk(x,y) = sum_x E_x tau

  Real quad_form_walk(const Vec& xi) const;  // <xi, G_walk xi>, one solve
  Real quad_form_lap(const Vec& xi) const;

  // sum_x G_walk(x,x). For cubes [-N,N]^d the diagonal is evaluated on orbit
  // representatives of the signed-permutation symmetry group (one solve per
  // orbit on a shared factorization); other regions fall back to all sites.
  Real trace_walk() const;

 private:
  Region r_;
  std::unique_ptr<SpdSolver> solver_;
  Real diag_entry_walk(long i) const;
};

// L = 2d I - adjacency on the region's sites (Dirichlet outside)
SpMat dirichlet_laplacian(const Region& r);

// unit-ball volume w_d = pi^{d/2} / Gamma(d/2 + 1)
Real w_ball(int d);
// far-field coefficient a_d = 2 / ((d-2) w_d), d >= 3: G_walk(0,x) ~ a_d |x|^{2-d}
Real a_far(int d);
// d = 2 logarithmic growth coefficient: G_walk(0,0) on B_N grows like (2/pi) log N
inline Real green_log_coeff_2d() { return 2.0 / M_PI; }

}  // namespace qlab
