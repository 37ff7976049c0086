#include "qlab/surface.hpp"

#include <cmath>

namespace qlab {

Quadrature gauss_legendre(int n) {
  if (n < 1) throw QlabError("gauss_legendre: n >= 1");
  Quadrature q;
  q.x.resize(n);
  q.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 1, pm1 = 0, pp = 1;
    for (int it = 0; it < 100; ++it) {
      p = 1;
      pm1 = 0;
      for (int j = 1; j <= n; ++j) {
        const double pj = ((2 * j - 1) * x * p - (j - 1) * pm1) / j;
        pm1 = p;
        p = pj;
      }
      pp = n * (x * p - pm1) / (x * x - 1.0);
      const double dx = p / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.x[i] = 0.5 * (1.0 - x);  // map [-1,1] -> [0,1], keep ascending order
    q.x[n - 1 - i] = 0.5 * (1.0 + x);
    q.w[i] = q.w[n - 1 - i] = 0.5 * w;
  }
  return q;
}

Model scale_eps(const Model& m, Real t) {
  if (std::holds_alternative<ModelA>(m)) {
    ModelA A = std::get<ModelA>(m);
    A.eps *= t;
    return A;
  }
  ModelB B = std::get<ModelB>(m);
  B.omega.eps_max *= t;  // every bond's eps is eps_max * u01, so this scales each linearly
  return B;
}

Real delta_h(const ChainState& st, const Model& m, const BC& psi) {
  const Region& r = st.region;
  BondList bl = bonds_touching(r);
  Real acc = 0;
  for (size_t k = 0; k < bl.bonds.size(); ++k) {
    const Bond& b = bl.bonds[k];
    const Coord y = b.other();
    const long ix = r.find(b.x), iy = r.find(y);
    const Real vx = ix >= 0 ? st.phi[ix] : psi(b.x);
    const Real vy = iy >= 0 ? st.phi[iy] : psi(y);
    const Real eps = bond_potential(m, b).eps;
    if (eps != 0.0) acc += eps * std::cos(vy - vx);
  }
  return acc;
}

namespace {

Real model_eps_scale(const Model& m) {
  if (std::holds_alternative<ModelA>(m)) return std::get<ModelA>(m).eps;
  return std::get<ModelB>(m).omega.eps_max;
}

struct NodeEstimate {
  Real mean, se;
};

NodeEstimate node_mean(const Region& r, const Model& full, Real t, const BC& psi,
                       const McmcParams& p, uint64_t seed) {
  const Model mt = scale_eps(full, t);
  ChainState st = init_chain(r, psi, seed);
  BatchAcc acc;
  run_chain(st, mt, psi, p, [&](const Vec&) { acc.add(delta_h(st, full, psi)); });
  return {acc.mean(), acc.se(p.batches)};
}

}  // namespace

ThermoResult log_partition_thermo(const Region& r, const Model& m, const BC& psi,
                                  const McmcParams& p, uint64_t seed, int nodes) {
  ThermoResult out;
  const Real log_z0 = log_partition(r, scale_eps(m, 0.0), psi);
  if (model_eps_scale(m) == 0.0) {
    out.log_z = log_z0;
    out.sigma = -log_z0 / static_cast<Real>(r.size());
    return out;
  }
  const Quadrature fine = gauss_legendre(2 * nodes);
  const Quadrature coarse = gauss_legendre(nodes);
  Real int_fine = 0, var_fine = 0;
  std::vector<NodeEstimate> fine_nodes(fine.x.size());
  for (size_t i = 0; i < fine.x.size(); ++i) {
    fine_nodes[i] = node_mean(r, m, fine.x[i], psi, p, seed + 1000 + static_cast<uint64_t>(i));
    int_fine += fine.w[i] * fine_nodes[i].mean;
    var_fine += fine.w[i] * fine.w[i] * fine_nodes[i].se * fine_nodes[i].se;
  }
  Real int_coarse = 0;
  for (size_t i = 0; i < coarse.x.size(); ++i) {
    NodeEstimate e = node_mean(r, m, coarse.x[i], psi, p, seed + 5000 + static_cast<uint64_t>(i));
    int_coarse += coarse.w[i] * e.mean;
  }
  out.log_z = log_z0 - int_fine;
  out.se = std::sqrt(var_fine);
  out.sigma = -out.log_z / static_cast<Real>(r.size());
  out.sigma_se = out.se / static_cast<Real>(r.size());
  out.quad_gap = std::abs(int_fine - int_coarse);
  return out;
}

ThermoResult sigma_thermo(const Region& r, const Model& m, const Vec& u, const McmcParams& p,
                          uint64_t seed, int nodes) {
  return log_partition_thermo(r, m, tilt_bc(u), p, seed, nodes);
}

BlockSigma block_average_sigma(int d, int N, int n, const Model& m, const Vec& u) {
  BlockPartition part = block_partition(d, N, n);
  BlockSigma out;
  out.dropped_fraction = part.dropped_fraction;
  out.per_cube.reserve(part.cubes.size());
  Real acc = 0;
  for (const Region& cube : part.cubes) {
    const Real s = surface_tension_exact(cube, m, u);
    out.per_cube.push_back(s);
    acc += s;
  }
  if (!out.per_cube.empty()) out.mean_sigma = acc / static_cast<Real>(out.per_cube.size());
  return out;
}

Real tilt_xi_sum(const Region& X, const ModelA& A, const Vec& u) {
  Real acc = 0;
  for (long i = 0; i < X.size(); ++i) {
    const Coord x = X.site(i);
    acc += dot_tilt(u, x) * xi_at(A.xi, x);
  }
  return A.xi.lambda * acc;
}

Real f_functional(const Region& X, const ModelA& A, const Vec& u, Real log_c) {
  const PotentialSpec V{A.a, A.eps};
  Real vsum = 0;
  for (int k = 0; k < X.dim(); ++k) vsum += V(u[k]);
  const Real g = log_c - 0.5 * vsum;
  return -log_partition(X, Model(A), tilt_bc(u)) + tilt_xi_sum(X, A, u) +
         static_cast<Real>(X.size()) * g;
}

Split split_at(const Region& B, int axis, int t) {
  if (!B.is_box()) throw QlabError("split_at: box regions only");
  if (axis < 0 || axis >= B.dim()) throw QlabError("split_at: bad axis");
  if (t <= B.lo()[axis] || t >= B.hi()[axis])
    throw QlabError("split_at: cut must be strictly interior");
  Coord lhi = B.hi(), rlo = B.lo(), clo = B.lo(), chi = B.hi();
  lhi[axis] = t - 1;
  rlo[axis] = t + 1;
  clo[axis] = t;
  chi[axis] = t;
  return {Region::box(B.lo(), lhi), Region::box(rlo, B.hi()), Region::box(clo, chi), axis, t};
}

Real split_logc_max(const Region& B, const ModelA& A, const Vec& u, int axis, int t) {
  Split s = split_at(B, axis, t);
  const Model m(A);
  const BC psi = tilt_bc(u);
  const Real log_zb = log_partition(B, m, psi);
  const Real log_zl = log_partition(s.left, m, psi);
  const Real log_zr = log_partition(s.right, m, psi);
  const Real ts = tilt_xi_sum(s.column, A, u);
  const PotentialSpec V{A.a, A.eps};
  Real vsum = 0;
  for (int k = 0; k < B.dim(); ++k) vsum += V(u[k]);
  return (log_zb - log_zl - log_zr - ts) / static_cast<Real>(s.column.size()) + 0.5 * vsum;
}

Real min_split_logc_max(const Region& B, const ModelA& A, const Vec& u) {
  bool any = false;
  Real best = 0;
  for (int axis = 0; axis < B.dim(); ++axis)
    for (int t = B.lo()[axis] + 1; t <= B.hi()[axis] - 1; ++t) {
      const Real v = split_logc_max(B, A, u, axis, t);
      if (!any || v < best) best = v;
      any = true;
    }
  if (!any) throw QlabError("min_split_logc_max: no admissible cut (every side < 3)");
  return best;
}

Real one_site_log_floor(int d, Real a) { return 0.5 * std::log(M_PI / (2.0 * d * a)); }

Real one_site_ratio(const PotentialSpec& V, const std::vector<Real>& neighbors, Real xi,
                    Real gamma) {
  if (neighbors.empty()) throw QlabError("one_site_ratio: needs at least one neighbor");
  if (V.a <= 0) throw QlabError("one_site_ratio: quadratic coefficient must be positive");
  const Real n = static_cast<Real>(neighbors.size());
  auto g = [&](Real s) {
    Real acc = xi * s;
    for (Real h : neighbors) acc -= V(s - h);
    return acc;
  };
  Real anchor = xi * gamma;
  for (Real h : neighbors) anchor -= 0.5 * V(gamma - h);

  // center on the quadratic part's maximum; the cosine only shifts it O(eps)
  Real c0 = xi / (2.0 * V.a * n);
  for (Real h : neighbors) c0 += h / n;
  const Real sd = 1.0 / std::sqrt(2.0 * V.a * n);

  // widen the window until the integrand is dead at both ends
  Real w = 8.0 * sd;
  const Real gc = g(c0);
  for (int it = 0; it < 60; ++it) {
    if (g(c0 - w) - gc < -40.0 && g(c0 + w) - gc < -40.0) break;
    w *= 2.0;
    if (it == 59) throw SolverError("one_site_ratio: window expansion failed");
  }

  // composite Simpson, doubling the panel count to convergence
  auto simpson = [&](long panels) {
    const Real h = 2.0 * w / static_cast<Real>(2 * panels);
    Real acc = std::exp(g(c0 - w) - gc) + std::exp(g(c0 + w) - gc);
    for (long i = 1; i < 2 * panels; ++i)
      acc += (i % 2 ? 4.0 : 2.0) * std::exp(g(c0 - w + h * static_cast<Real>(i)) - gc);
    return acc * h / 3.0;
  };
  Real prev = simpson(64);
  for (long panels = 128; panels <= (1L << 20); panels *= 2) {
    const Real cur = simpson(panels);
    if (std::abs(cur - prev) <= 1e-12 * std::max(1.0, std::abs(cur)))
      return cur * std::exp(gc - anchor);
    prev = cur;
  }
  throw SolverError("one_site_ratio: quadrature did not converge");
}

}  // namespace qlab
