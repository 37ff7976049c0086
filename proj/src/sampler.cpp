#include "qlab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qlab/rng.hpp"

namespace qlab {

namespace {

constexpr uint64_t kHbStream = 0x4862;
constexpr uint64_t kMetroStream = 0x3e71;
constexpr uint64_t kScanStream = 0x5ca4;

int parity(const Coord& x) {
  long s = 0;
  for (int k = 0; k < x.size(); ++k) s += x[k];
  return static_cast<int>(((s % 2) + 2) % 2);
}

// neighbor value with frozen boundary
Real value_at(const ChainState& st, const BC& psi, const Coord& y, long j) {
  return j >= 0 ? st.phi[j] : psi(y);
}

struct SiteEnv {
  Real wsum = 0, wphi = 0, src = 0;
};

SiteEnv site_env(const ChainState& st, const Model& m, const BC& psi, const Coord& x) {
  SiteEnv e;
  const Region& r = st.region;
  Coord y = x;
  for (int axis = 0; axis < r.dim(); ++axis) {
    for (int dir = -1; dir <= 1; dir += 2) {
      y = x;
      y[axis] += dir;
      Bond b = dir > 0 ? Bond{x, axis} : Bond{y, axis};
      const Real w = stiffness(m, b);
      e.wsum += w;
      e.wphi += w * value_at(st, psi, y, r.find(y));
    }
  }
  e.src = site_source(m, x);
  return e;
}

void heat_bath_site(ChainState& st, const Model& m, const BC& psi, long i, const Coord& x,
                    uint64_t draw) {
  SiteEnv e = site_env(st, m, psi, x);
  const Real mean = (e.wphi + e.src) / e.wsum;
  const Real sd = std::sqrt(1.0 / e.wsum);
  st.phi[i] = mean + sd * normal_ppf(u01(draw));
}

}  // namespace

ChainState init_chain(const Region& r, const BC& psi, uint64_t seed) {
  ChainState st{r, Vec(r.size()), 0, seed};
  for (long i = 0; i < r.size(); ++i) st.phi[i] = psi(r.site(i));
  return st;
}

Conditional conditional_at(const ChainState& st, const Model& m, const BC& psi, const Coord& x) {
  if (!exactly_gaussian(m)) throw QlabError("closed-form conditional requires a quadratic model");
  SiteEnv e = site_env(st, m, psi, x);
  return {(e.wphi + e.src) / e.wsum, std::sqrt(1.0 / e.wsum)};
}

Real local_energy(const ChainState& st, const Model& m, const BC& psi, const Coord& x, Real value) {
  const Region& r = st.region;
  Real E = 0;
  Coord y = x;
  for (int axis = 0; axis < r.dim(); ++axis) {
    for (int dir = -1; dir <= 1; dir += 2) {
      y = x;
      y[axis] += dir;
      Bond b = dir > 0 ? Bond{x, axis} : Bond{y, axis};
      E += bond_potential(m, b)(value - value_at(st, psi, y, r.find(y)));
    }
  }
  return E - site_source(m, x) * value;
}

void heat_bath_sweep(ChainState& st, const Model& m, const BC& psi, bool random_scan) {
  const Region& r = st.region;
  const long n = r.size();
  CounterRng rng(st.seed, kHbStream);
  if (random_scan) {
    CounterRng pick(st.seed, kScanStream);
    for (long t = 0; t < n; ++t) {
      const long i = static_cast<long>(pick.bits({st.sweep, t}) % static_cast<uint64_t>(n));
      heat_bath_site(st, m, psi, i, r.site(i), rng.bits({st.sweep, t, 1}));
    }
  } else {
    // checkerboard: within a color no site reads another, so any order matches
    for (int color = 0; color < 2; ++color)
      for (long i = 0; i < n; ++i) {
        Coord x = r.site(i);
        if (parity(x) == color) heat_bath_site(st, m, psi, i, x, rng.bits({st.sweep, i}));
      }
  }
  ++st.sweep;
}

MetroStats metropolis_sweep(ChainState& st, const Model& m, const BC& psi, Real step) {
  const Region& r = st.region;
  const long n = r.size();
  CounterRng pick(st.seed, kScanStream);
  CounterRng rng(st.seed, kMetroStream);
  MetroStats stats;
  for (long t = 0; t < n; ++t) {
    const long i = static_cast<long>(pick.bits({st.sweep, t, 7}) % static_cast<uint64_t>(n));
    const Coord x = r.site(i);
    const Real cur = st.phi[i];
    const Real prop = cur + step * normal_ppf(u01(rng.bits({st.sweep, t, 0})));
    const Real dE = local_energy(st, m, psi, x, prop) - local_energy(st, m, psi, x, cur);
    ++stats.proposed;
    if (dE <= 0 || u01(rng.bits({st.sweep, t, 1})) < std::exp(-dE)) {
      st.phi[i] = prop;
      ++stats.accepted;
    }
  }
  ++st.sweep;
  return stats;
}

RunInfo run_chain(ChainState& st, const Model& m, const BC& psi, const McmcParams& p,
                  const std::function<void(const Vec&)>& measure) {
  const long total = p.sweeps;
  const long nburn = p.burn(total);
  const bool hb = exactly_gaussian(m);
  Real step = p.step;
  RunInfo info;

  MetroStats window;
  for (long s = 0; s < nburn; ++s) {
    if (hb) {
      heat_bath_sweep(st, m, psi, p.random_scan);
    } else {
      MetroStats sw = metropolis_sweep(st, m, psi, step);
      window.proposed += sw.proposed;
      window.accepted += sw.accepted;
      if ((s + 1) % p.tune_interval == 0) {
        const Real rate = window.rate();
        if (rate > 0.51) step *= 1.25;
        else if (rate < 0.37) step /= 1.25;
        window = {};
      }
    }
  }

  MetroStats post;
  for (long s = nburn; s < total; ++s) {
    if (hb) {
      heat_bath_sweep(st, m, psi, p.random_scan);
    } else {
      MetroStats sw = metropolis_sweep(st, m, psi, step);
      post.proposed += sw.proposed;
      post.accepted += sw.accepted;
    }
    measure(st.phi);
    ++info.measured;
  }
  info.acceptance = hb ? 1.0 : post.rate();
  info.tuned_step = step;
  return info;
}

Real BatchAcc::mean() const {
  if (vals_.empty()) return 0.0;
  Real s = 0;
  for (Real v : vals_) s += v;
  return s / static_cast<Real>(vals_.size());
}

Real BatchAcc::se(int batches) const {
  const long n = count();
  if (n < 2) return std::numeric_limits<Real>::quiet_NaN();
  const long B = std::min<long>(batches, n);
  const long L = n / B;
  std::vector<Real> bm(B, 0.0);
  for (long b = 0; b < B; ++b) {
    for (long t = 0; t < L; ++t) bm[b] += vals_[b * L + t];
    bm[b] /= static_cast<Real>(L);
  }
  Real gm = 0;
  for (Real v : bm) gm += v;
  gm /= static_cast<Real>(B);
  Real ss = 0;
  for (Real v : bm) ss += (v - gm) * (v - gm);
  return std::sqrt(ss / static_cast<Real>(B - 1) / static_cast<Real>(B));
}

VecBatchAcc::VecBatchAcc(long dim, long total, int batches)
    : dim_(dim),
      total_(total),
      per_batch_(std::max<long>(1, total / batches)),
      batches_(batches),
      sums_(Mat::Zero(batches, dim)) {}

void VecBatchAcc::add(const Vec& v) {
  const long b = std::min<long>(seen_ / per_batch_, batches_ - 1);
  sums_.row(b) += v.transpose();
  ++seen_;
}

Vec VecBatchAcc::mean() const { return sums_.colwise().sum().transpose() / static_cast<Real>(seen_); }

Vec VecBatchAcc::se() const {
  // batch counts: per_batch_ each, remainder folded into the last
  std::vector<long> cnt(batches_, 0);
  long left = seen_;
  for (int b = 0; b < batches_ && left > 0; ++b) {
    cnt[b] = (b == batches_ - 1) ? left : std::min(per_batch_, left);
    left -= cnt[b];
  }
  int B = 0;
  for (int b = 0; b < batches_; ++b)
    if (cnt[b] > 0) ++B;
  if (B < 2) return Vec::Constant(dim_, std::numeric_limits<Real>::quiet_NaN());
  Mat means(B, dim_);
  int row = 0;
  for (int b = 0; b < batches_; ++b)
    if (cnt[b] > 0) means.row(row++) = sums_.row(b) / static_cast<Real>(cnt[b]);
  Vec gm = means.colwise().mean().transpose();
  Vec ss = (means.rowwise() - gm.transpose()).array().square().colwise().sum().transpose();
  return (ss / static_cast<Real>(B - 1) / static_cast<Real>(B)).cwiseSqrt();
}

Real gelman_rubin(const std::vector<std::vector<Real>>& chains) {
  const long m = static_cast<long>(chains.size());
  if (m < 2) throw QlabError("gelman_rubin needs at least two chains");
  const long n = static_cast<long>(chains[0].size());
  for (const auto& c : chains)
    if (static_cast<long>(c.size()) != n || n < 2) throw QlabError("gelman_rubin: ragged or short chains");
  Vec mu(m);
  Vec s2(m);
  for (long j = 0; j < m; ++j) {
    Real acc = 0;
    for (Real v : chains[j]) acc += v;
    mu[j] = acc / static_cast<Real>(n);
    Real ss = 0;
    for (Real v : chains[j]) ss += (v - mu[j]) * (v - mu[j]);
    s2[j] = ss / static_cast<Real>(n - 1);
  }
  const Real W = s2.mean();
  const Real gm = mu.mean();
  const Real Bn = (mu.array() - gm).square().sum() / static_cast<Real>(m - 1);  // = B/n
  const Real var_plus = (static_cast<Real>(n - 1) / n) * W + Bn;
  return std::sqrt(var_plus / W);
}

Real energy_density(const ChainState& st, const Vec& u) {
  const Region& r = st.region;
  Real acc = 0;
  for (long i = 0; i < r.size(); ++i)
    for (int axis = 0; axis < r.dim(); ++axis) {
      const long j = r.neighbor(i, axis, +1);
      if (j < 0) continue;
      const Real s = st.phi[j] - st.phi[i] - u[axis];
      acc += s * s;
    }
  return acc / static_cast<Real>(r.size());
}

Vec ward_vector(const ChainState& st, const Model& m, const BC& psi) {
  const Region& r = st.region;
  Vec out = Vec::Zero(r.size());
  for (long i = 0; i < r.size(); ++i) {
    const Coord x = r.site(i);
    Coord y = x;
    Real acc = 0;
    for (int axis = 0; axis < r.dim(); ++axis) {
      for (int dir = -1; dir <= 1; dir += 2) {
        y = x;
        y[axis] += dir;
        Bond b = dir > 0 ? Bond{x, axis} : Bond{y, axis};
        acc += bond_potential(m, b).d1(st.phi[i] - value_at(st, psi, y, r.find(y)));
      }
    }
    out[i] = acc;
  }
  return out;
}

Real boundary_flux(const ChainState& st, const Model& m, const BC& psi) {
  const Region& r = st.region;
  BondList bl = bonds_touching(r);
  Real acc = 0;
  for (size_t k = 0; k < bl.bonds.size(); ++k) {
    if (bl.interior[k]) continue;
    const Bond& b = bl.bonds[k];
    const Coord y = b.other();
    const long ix = r.find(b.x), iy = r.find(y);
    if (ix >= 0)
      acc += bond_potential(m, b).d1(st.phi[ix] - psi(y));
    else
      acc += bond_potential(m, b).d1(st.phi[iy] - psi(b.x));
  }
  return acc;
}

}  // namespace qlab
