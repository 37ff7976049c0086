#include "qlab/greens.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace qlab {

SpMat dirichlet_laplacian(const Region& r) {
  const int d = r.dim();
  std::vector<Trip> trip;
  trip.reserve(static_cast<size_t>(r.size()) * (2 * d + 1));
  for (long i = 0; i < r.size(); ++i) {
    trip.emplace_back(i, i, 2.0 * d);
    Coord x = r.site(i);
    for (int k = 0; k < d; ++k)
      for (int dir : {-1, 1}) {
        Coord y = x;
        y[k] += dir;
        long j = r.find(y);
        if (j >= 0) trip.emplace_back(i, j, -1.0);
      }
  }
  SpMat L(r.size(), r.size());
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

GreensSolver::GreensSolver(const Region& r) : r_(r) {
  solver_ = std::make_unique<SpdSolver>(dirichlet_laplacian(r_));
}

Vec GreensSolver::column_lap(const Coord& source) const {
  Vec e = Vec::Zero(r_.size());
  e[r_.index(source)] = 1.0;
  return solver_->solve(e);
}

Vec GreensSolver::column_walk(const Coord& source) const {
  return 2.0 * r_.dim() * column_lap(source);
}

Vec GreensSolver::exit_times() const {
  Vec rhs = Vec::Constant(r_.size(), 2.0 * r_.dim());
  return solver_->solve(rhs);
}

Real GreensSolver::exit_time(const Coord& x) const { return exit_times()[r_.index(x)]; }

Real GreensSolver::sum_all_walk() const { return exit_times().sum(); }

Real GreensSolver::quad_form_lap(const Vec& xi) const {
  if (xi.size() != r_.size()) throw QlabError("quad_form: field size mismatch");
  return xi.dot(solver_->solve(xi));
}

Real GreensSolver::quad_form_walk(const Vec& xi) const {
  return 2.0 * r_.dim() * quad_form_lap(xi);
}

Real GreensSolver::diag_entry_walk(long i) const {
  Vec e = Vec::Zero(r_.size());
  e[i] = 1.0;
  return 2.0 * r_.dim() * solver_->solve(e)[i];
}

Real GreensSolver::trace_walk() const {
  const int d = r_.dim();
  bool sym_cube = r_.is_box();
  if (sym_cube)
    for (int k = 0; k < d; ++k)
      if (r_.lo()[k] != -r_.hi()[k] || r_.hi()[k] != r_.hi()[0]) sym_cube = false;
  if (!sym_cube) {
    if (r_.size() > 5000)
      throw QlabError("trace_walk: full diagonal only for regions up to 5000 sites");
    Real t = 0;
    for (long i = 0; i < r_.size(); ++i) t += diag_entry_walk(i);
    return t;
  }
  // cube [-N,N]^d: G(x,x) is invariant under coordinate permutations and sign
  // flips; enumerate representatives 0 <= x_1 <= ... <= x_d and weight by orbit size
  const int N = r_.hi()[0];
  Real dfact = 1;
  for (int k = 2; k <= d; ++k) dfact *= k;
  Real trace = 0;
  Coord x(d);
  std::vector<int> v(d, 0);
  while (true) {
    int nonzero = 0;
    std::map<int, int> mult;
    for (int k = 0; k < d; ++k) {
      if (v[k] != 0) ++nonzero;
      mult[v[k]] += 1;
    }
    Real orbit = std::pow(2.0, nonzero) * dfact;
    for (auto& [val, m] : mult)
      for (int k = 2; k <= m; ++k) orbit /= k;
    for (int k = 0; k < d; ++k) x[k] = v[k];
    trace += orbit * diag_entry_walk(r_.index(x));
    // next nondecreasing tuple
    int k = d - 1;
    while (k >= 0 && v[k] == N) --k;
    if (k < 0) break;
    int nv = v[k] + 1;
    for (int j = k; j < d; ++j) v[j] = nv;
  }
  return trace;
}

Real w_ball(int d) { return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

Real a_far(int d) {
  if (d < 3) throw QlabError("a_far: defined for d >= 3");
  return 2.0 / ((d - 2) * w_ball(d));
}

}  // namespace qlab
