#include "qlab/gaussian.hpp"

#include <cmath>

#include "qlab/rng.hpp"

namespace qlab {

namespace {

struct Accumulator {
  const Region& r;
  const BC& psi;
  std::vector<Trip> trip;
  Vec b;
  Real c0 = 0;

  Accumulator(const Region& region, const BC& bc) : r(region), psi(bc), b(Vec::Zero(region.size())) {}

  // energy term 1/2 c (phi(y) - phi(x) - s)^2, boundary endpoints frozen
  void bond_term(const Coord& x, const Coord& y, Real c, Real s) {
    long ix = r.find(x), iy = r.find(y);
    if (ix >= 0 && iy >= 0) {
      trip.emplace_back(ix, ix, c);
      trip.emplace_back(iy, iy, c);
      trip.emplace_back(ix, iy, -c);
      trip.emplace_back(iy, ix, -c);
      b[iy] += c * s;
      b[ix] -= c * s;
      c0 -= 0.5 * c * s * s;
    } else if (iy >= 0) {
      Real vx = psi(x);
      trip.emplace_back(iy, iy, c);
      b[iy] += c * (vx + s);
      c0 -= 0.5 * c * (vx + s) * (vx + s);
    } else if (ix >= 0) {
      Real vy = psi(y);
      trip.emplace_back(ix, ix, c);
      b[ix] += c * (vy - s);
      c0 -= 0.5 * c * (vy - s) * (vy - s);
    } else {
      Real t = psi(y) - psi(x) - s;
      c0 -= 0.5 * c * t * t;
    }
  }
};

}  // namespace

PrecisionOperator assemble(const Region& r, const Model& m, const BC& psi, Real beta,
                           const Vec* u_tilt) {
  if (!exactly_gaussian(m))
    throw QlabError("assemble: exact engine requires a quadratic model (eps = 0)");
  if (beta != 0.0 && (u_tilt == nullptr || u_tilt->size() != r.dim()))
    throw QlabError("assemble: beta augmentation needs the tilt vector");

  Accumulator acc(r, psi);
  BondList bl = bonds_touching(r);
  for (size_t bi = 0; bi < bl.bonds.size(); ++bi) {
    const Bond& bond = bl.bonds[bi];
    Coord y = bond.other();
    Real w = stiffness(m, bond);
    if (beta != 0.0 && !(2.0 * beta < w))
      throw QlabError("assemble: beta must satisfy 2 beta < min bond stiffness");
    acc.bond_term(bond.x, y, w, 0.0);
    if (beta != 0.0) acc.bond_term(bond.x, y, -2.0 * beta, (*u_tilt)[bond.axis]);
  }
  for (long i = 0; i < r.size(); ++i) acc.b[i] += site_source(m, r.site(i));

  PrecisionOperator op{r, SpMat(r.size(), r.size()), std::move(acc.b), acc.c0};
  op.Q.setFromTriplets(acc.trip.begin(), acc.trip.end());
  return op;
}

GaussianSolution::GaussianSolution(PrecisionOperator op, long direct_limit) : op_(std::move(op)) {
  solver_ = std::make_unique<SpdSolver>(op_.Q, direct_limit);
}

const Vec& GaussianSolution::mean() const {
  if (!mean_) mean_ = std::make_unique<Vec>(solver_->solve(op_.b));
  return *mean_;
}

Real GaussianSolution::log_partition() const {
  const long n = op_.Q.rows();
  return 0.5 * n * std::log(2.0 * M_PI) - 0.5 * solver_->logdet() + 0.5 * op_.b.dot(mean()) +
         op_.c0;
}

Real GaussianSolution::bond_mean(const Bond& bond, const BC& psi) const {
  Coord y = bond.other();
  long ix = region().find(bond.x), iy = region().find(y);
  Real vx = ix >= 0 ? mean()[ix] : psi(bond.x);
  Real vy = iy >= 0 ? mean()[iy] : psi(y);
  return vy - vx;
}

Real GaussianSolution::bond_variance(const Bond& bond) const {
  Coord y = bond.other();
  long ix = region().find(bond.x), iy = region().find(y);
  if (ix < 0 && iy < 0) return 0.0;
  Vec rhs = Vec::Zero(region().size());
  if (iy >= 0) rhs[iy] += 1.0;
  if (ix >= 0) rhs[ix] -= 1.0;
  return rhs.dot(solver_->solve(rhs));
}

Real GaussianSolution::quad_Qinv(const Vec& v) const { return v.dot(solver_->solve(v)); }

// log-partition sizes are pinned by the scenarios; the direct factorization is
// the only path that yields the determinant, so its limit sits above the
// largest pinned volume rather than at the generic solve threshold.
static constexpr long kLogdetLimit = 40000;

Real log_partition(const Region& r, const Model& m, const BC& psi) {
  return GaussianSolution(assemble(r, m, psi), kLogdetLimit).log_partition();
}

Real surface_tension_exact(const Region& r, const Model& m, const Vec& u) {
  if (u.size() != r.dim()) throw QlabError("surface_tension_exact: tilt dimension mismatch");
  return -log_partition(r, m, tilt_bc(u)) / static_cast<Real>(r.size());
}

Real f_beta(const Region& r, const Model& m, const Vec& u, Real beta) {
  if (!(beta >= 0)) throw QlabError("f_beta: beta must be nonnegative");
  BC psi = tilt_bc(u);
  Real plain = GaussianSolution(assemble(r, m, psi), kLogdetLimit).log_partition();
  Real aug = GaussianSolution(assemble(r, m, psi, beta, &u), kLogdetLimit).log_partition();
  return aug - plain;
}

GaussianIdentity gaussian_identity_check(const Region& r, const ModelA& m, const Vec& u) {
  if (m.eps != 0.0) throw QlabError("gaussian_identity_check: quadratic model required");
  BC psi = tilt_bc(u);
  ModelA quiet = m;
  quiet.xi.lambda = 0.0;
  GaussianSolution with(assemble(r, Model(m), psi), kLogdetLimit);
  GaussianSolution without(assemble(r, Model(quiet), psi), kLogdetLimit);
  Vec xi = xi_field(m.xi, r);
  Real lam = m.xi.lambda;
  Real cross = lam * xi.dot(without.mean());
  GreensSolver greens(r);
  Real quad = greens.quad_form_lap(xi);
  GaussianIdentity out;
  out.lhs = with.log_partition() - without.log_partition();
  out.rhs = cross + lam * lam / (4.0 * m.a) * quad;
  out.paper_rhs = cross + lam * lam / (2.0 * m.a) * quad;
  return out;
}

Real deloc_site_sum(int d, int N) {
  Region box = Region::lambda(d, N);
  GreensSolver g(box);
  Vec col = g.column_lap(Coord::Zero(d));
  return col.squaredNorm();
}

Real deloc_bond_sum(int d, int N) {
  Region box = Region::lambda(d, N);
  GreensSolver g(box);
  Vec c0 = g.column_lap(Coord::Zero(d));
  Vec c1 = g.column_lap(unit(d, 0));
  return (c0 - c1).squaredNorm();
}

AveragedEngineA::AveragedEngineA(Region box, Real a, Vec u, int stride)
    : box_(std::move(box)), a_(a), u_(std::move(u)) {
  if (!box_.is_box()) throw QlabError("AveragedEngineA: box volumes only");
  if (u_.size() != box_.dim()) throw QlabError("AveragedEngineA: tilt dimension mismatch");
  if (stride < 1) throw QlabError("AveragedEngineA: stride >= 1");
  for (long i = 0; i < box_.size(); ++i) {
    Coord x = box_.site(i);
    bool keep = true;
    for (int k = 0; k < box_.dim(); ++k)
      if ((x[k] - box_.lo()[k]) % stride != 0) keep = false;
    if (keep) shifts_.push_back(std::move(x));
  }
  solver_ = std::make_unique<SpdSolver>(SpMat(2.0 * a_ * dirichlet_laplacian(box_)));
}

Real AveragedEngineA::cached_variance(const Coord& rel_base, int axis) const {
  std::pair<std::vector<int>, int> key{std::vector<int>(rel_base.data(), rel_base.data() + rel_base.size()),
                                       axis};
  auto it = var_cache_.find(key);
  if (it != var_cache_.end()) return it->second;
  Coord hi = rel_base;
  hi[axis] += 1;
  long ix = box_.find(rel_base), iy = box_.find(hi);
  Real var = 0;
  if (ix >= 0 || iy >= 0) {
    Vec rhs = Vec::Zero(box_.size());
    if (iy >= 0) rhs[iy] += 1.0;
    if (ix >= 0) rhs[ix] -= 1.0;
    var = rhs.dot(solver_->solve(rhs));
  }
  var_cache_.emplace(std::move(key), var);
  return var;
}

template <typename Fold>
void AveragedEngineA::fold_shifts(const SiteDisorderSpec& xi, const Bond& target, Fold&& f) const {
  const long n = box_.size();
  Vec rhs(n);
  for (const Coord& shift : shifts_) {
    for (long i = 0; i < n; ++i) rhs[i] = xi.lambda * xi_at(xi, box_.site(i) + shift);
    Vec h = solver_->solve(rhs);
    Coord rel = target.x - shift;
    Coord rel_hi = rel;
    rel_hi[target.axis] += 1;
    long ilo = box_.find(rel), ihi = box_.find(rel_hi);
    Real mean = u_[target.axis] + (ihi >= 0 ? h[ihi] : 0.0) - (ilo >= 0 ? h[ilo] : 0.0);
    f(MeanVar{mean, cached_variance(rel, target.axis)});
  }
}

Real AveragedEngineA::bond_mean(const SiteDisorderSpec& xi, const Bond& target) const {
  Real acc = 0;
  fold_shifts(xi, target, [&](MeanVar mv) { acc += mv.mean; });
  return acc / static_cast<Real>(shifts_.size());
}

Real AveragedEngineA::clipped_bond_mean(const SiteDisorderSpec& xi, const Bond& target,
                                        Real clip) const {
  Real acc = 0;
  fold_shifts(xi, target,
              [&](MeanVar mv) { acc += clipped_normal_mean(mv.mean, std::sqrt(mv.var), clip); });
  return acc / static_cast<Real>(shifts_.size());
}

Real AveragedEngineA::second_moment(const SiteDisorderSpec& xi, const Bond& target) const {
  Real u_comp = u_[target.axis];
  Real acc = 0;
  fold_shifts(xi, target, [&](MeanVar mv) {
    Real c = mv.mean - u_comp;
    acc += mv.var + c * c;
  });
  return acc / static_cast<Real>(shifts_.size());
}

AveragedEngineB::AveragedEngineB(Region box, BondDisorderSpec omega, Vec u, int stride)
    : box_(std::move(box)), omega_(omega), u_(std::move(u)) {
  if (!box_.is_box()) throw QlabError("AveragedEngineB: box volumes only");
  if (omega_.eps_max != 0.0) throw QlabError("AveragedEngineB: exact engine needs eps_max = 0");
  if (stride < 1) throw QlabError("AveragedEngineB: stride >= 1");
  for (long i = 0; i < box_.size(); ++i) {
    Coord x = box_.site(i);
    bool keep = true;
    for (int k = 0; k < box_.dim(); ++k)
      if ((x[k] - box_.lo()[k]) % stride != 0) keep = false;
    if (keep) shifts_.push_back(std::move(x));
  }
}

Real AveragedEngineB::bond_mean(const Bond& target) const {
  BC psi = tilt_bc(u_);
  Model m = ModelB{omega_};
  Real acc = 0;
  for (const Coord& shift : shifts_) {
    Region vol = box_.shifted(shift);
    GaussianSolution sol(assemble(vol, m, psi));
    acc += sol.bond_mean(target, psi);
  }
  return acc / static_cast<Real>(shifts_.size());
}

Real AveragedEngineB::second_moment(const Bond& target) const {
  BC psi = tilt_bc(u_);
  Model m = ModelB{omega_};
  const Real uk = u_[target.axis];
  Real acc = 0;
  for (const Coord& shift : shifts_) {
    Region vol = box_.shifted(shift);
    GaussianSolution sol(assemble(vol, m, psi));
    const Real c = sol.bond_mean(target, psi) - uk;
    acc += sol.bond_variance(target) + c * c;
  }
  return acc / static_cast<Real>(shifts_.size());
}

}  // namespace qlab
