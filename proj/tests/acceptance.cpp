// acceptance battery: twelve numbered desk-scale criteria. each test prints
// exactly one verdict line "[criterion NN] PASS|FAIL ..." so the ctest wiring
// can grep for it; CHECK(ok) keeps direct binary runs honest too.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "qlab/config.hpp"
#include "qlab/experiments.hpp"
#include "qlab/gaussian.hpp"
#include "qlab/greens.hpp"
#include "qlab/lattice.hpp"
#include "qlab/report.hpp"
#include "qlab/rng.hpp"
#include "qlab/sampler.hpp"
#include "qlab/stats.hpp"
#include "qlab/surface.hpp"

using namespace qlab;

namespace {

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return std::string(buf);
}

void finish(int num, bool ok, const std::string& detail) {
  std::printf("[criterion %02d] %s  %s\n", num, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  CHECK(ok);
}

Coord cv(std::initializer_list<int> v) {
  Coord c(static_cast<long>(v.size()));
  long i = 0;
  for (int x : v) c[i++] = x;
  return c;
}

const Check* find_check(const ScenarioReport& rep, const std::string& name) {
  for (const Check& c : rep.checks)
    if (c.name == name) return &c;
  return nullptr;
}

ScenarioReport run_ini(const char* text) { return run_scenario(parse_config_text(text)); }

}  // namespace

// ---------------------------------------------------------------------------
// 1: exact walk-Green identities on small boxes and balls

TEST_CASE("criterion 01 green function identities") {
  bool ok = true;
  std::string why = "symmetry, monotonicity, exit-time sandwich, dense oracle";
  auto note = [&](bool cond, const char* what) {
    if (!cond && ok) {
      ok = false;
      why = strf("first failure: %s", what);
    }
  };

  // d=1 intervals against a dense (I-P)^{-1}, 1e-12
  for (const Region& r : {Region::lambda(1, 5), Region::box(cv({3}), cv({10}))}) {
    GreensSolver g(r);
    const Mat dense = test::dense_green_walk(r);
    Real worst = 0;
    for (long j = 0; j < r.size(); ++j)
      worst = std::max(worst,
                       (g.column_walk(r.site(j)) - dense.col(j)).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(g.sum_all_walk() - dense.sum()));
    const Vec et = g.exit_times();
    const Vec rows = dense.rowwise().sum();
    worst = std::max(worst, (et - rows).cwiseAbs().maxCoeff());
    note(worst <= 1e-12, "d=1 dense oracle");
  }

  // symmetry G(x,y)=G(y,x) on sampled column pairs
  const std::vector<Region> regions = {Region::lambda(1, 12), Region::lambda(2, 8),
                                       Region::lambda(3, 4),  Region::ball(2, 4.5),
                                       Region::ball(3, 3.2)};
  for (const Region& r : regions) {
    GreensSolver g(r);
    std::vector<long> probes = {0, r.size() / 3, r.size() / 2, r.size() - 1};
    std::vector<Vec> cols;
    for (long i : probes) cols.push_back(g.column_walk(r.site(i)));
    Real worst = 0;
    for (size_t a = 0; a < probes.size(); ++a)
      for (size_t b = a + 1; b < probes.size(); ++b)
        worst = std::max(worst, std::abs(cols[a][probes[b]] - cols[b][probes[a]]));
    note(worst <= 1e-9, "symmetry");
  }

  // domain monotonicity: entries and quadratic forms under zero extension
  const std::vector<std::pair<Region, Region>> nested = {
      {Region::lambda(1, 2), Region::lambda(1, 4)},
      {Region::lambda(2, 2), Region::lambda(2, 4)},
      {Region::lambda(3, 2), Region::lambda(3, 4)},
      {Region::ball(2, 2.5), Region::ball(2, 4.5)}};
  for (const auto& [small, big] : nested) {
    GreensSolver gs(small), gb(big);
    Real worst = -1e300;
    for (long j = 0; j < small.size(); ++j) {
      const Vec cs = gs.column_walk(small.site(j));
      const Vec cb = gb.column_walk(small.site(j));
      for (long i = 0; i < small.size(); ++i)
        worst = std::max(worst, cs[i] - cb[big.index(small.site(i))]);
    }
    note(worst <= 1e-12, "entry monotonicity");
    CounterRng rng(91, 0xacce);
    for (int trial = 0; trial < 5; ++trial) {
      Vec f = Vec::Zero(small.size()), fext = Vec::Zero(big.size());
      for (long i = 0; i < small.size(); ++i) {
        f[i] = 2.0 * u01(rng.bits({trial, i})) - 1.0;
        fext[big.index(small.site(i))] = f[i];
      }
      note(gs.quad_form_walk(f) <= gb.quad_form_walk(fext) + 1e-9, "quad form monotonicity");
    }
  }

  // exit-time sandwich: r_in^2 - |x|^2 <= E_x tau <= r_out^2 - |x|^2
  auto sandwich = [&](const Region& r, Real rin, Real rout) {
    GreensSolver g(r);
    const Vec et = g.exit_times();
    Real lo_slack = 1e300, hi_slack = 1e300;
    for (long i = 0; i < r.size(); ++i) {
      const Real x2 = r.site(i).cast<Real>().squaredNorm();
      lo_slack = std::min(lo_slack, et[i] - (rin * rin - x2));
      hi_slack = std::min(hi_slack, (rout * rout - x2) - et[i]);
    }
    note(lo_slack >= -1e-9 && hi_slack >= -1e-9, "exit-time sandwich");
  };
  for (const auto& [d, N] : std::vector<std::pair<int, int>>{{1, 12}, {2, 12}, {3, 6}})
    sandwich(Region::lambda(d, N), N + 1.0, std::sqrt(Real(d)) * N + 1.0);
  for (const auto& [d, rad] : std::vector<std::pair<int, Real>>{{1, 12.0}, {2, 6.5}, {3, 4.3}})
    sandwich(Region::ball(d, rad), rad, rad + 1.0);

  finish(1, ok, why);
}

// ---------------------------------------------------------------------------
// 2: total Green mass sandwich and its N^(d+2) growth, d=3

TEST_CASE("criterion 02 green mass scaling") {
  const int d = 3;
  const Real wd = 4.0 * M_PI / 3.0;
  std::vector<Real> nn, ss;
  int n0 = 2;
  for (int N = 2; N <= 20; ++N) {
    GreensSolver g(Region::lambda(d, N));
    const Real s = g.sum_all_walk();
    const Real lo = (d + 1.0) / (d + 2.0) * wd * N * N * std::pow(N - 1.0, d);
    const Real hi = std::pow(N * std::sqrt(Real(d)), d) * d * wd *
                    ((N + 1.0) * (N + 1.0) - N * N / (d + 2.0));
    if (!(lo <= s && s <= hi)) n0 = N + 1;
    if (N >= 8) {
      nn.push_back(N);
      ss.push_back(s);
    }
  }
  // growth exponent with the generic 1/N and 1/N^2 surface corrections
  // regressed out; a bare log-log fit over this window sits near 4.65
  // because the O(1/N) boundary layer has not died out yet
  const long M = static_cast<long>(nn.size());
  Mat A(M, 4);
  Vec y(M);
  for (long i = 0; i < M; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::log(nn[i]);
    A(i, 2) = 1.0 / nn[i];
    A(i, 3) = 1.0 / (nn[i] * nn[i]);
    y[i] = std::log(ss[i]);
  }
  const Vec beta = (A.transpose() * A).ldlt().solve(A.transpose() * y);
  const Real slope = beta[1];
  const bool ok = n0 <= 16 && std::abs(slope - (d + 2.0)) <= 0.15;
  finish(2, ok, strf("N0=%d slope=%.4f (want %d within 0.15)", n0, slope, d + 2));
}

// ---------------------------------------------------------------------------
// 3: quenched averages settle: mean |normalized centered quadratic form|

constexpr const char* kSllnIni = R"(
[run]
scenario = slln
seed = 2024
outdir = out/acc/slln

[lattice]
d = 3
N_list = 6, 10, 14

[model]
dist = gaussian
p1 = 0
p2 = 1

[scenario]
n_seeds = 100
)";

TEST_CASE("criterion 03 quenched averaging") {
  const ScenarioReport rep = run_ini(kSllnIni);
  Real m6 = -1, m14 = -1;
  for (const CsvRow& r : rep.rows)
    if (r.observable == "mean_abs_statistic") {
      if (r.N == 6) m6 = r.value;
      if (r.N == 14) m14 = r.value;
    }
  const bool ok = rep.pass() && m6 > 0 && m14 >= 0 && m14 <= 0.5 * m6;
  finish(3, ok, strf("mean|stat| ratio N=14 vs N=6: %.4f (want <= 0.5)", m14 / m6));
}

// ---------------------------------------------------------------------------
// 4: surface-tension dichotomy in the disorder mean

constexpr const char* kScalingExistIni = R"(
[run]
scenario = scaling
seed = 2024
outdir = out/acc/scaling_exist

[lattice]
d = 3
N_list = 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16

[model]
kind = site
a = 0.5
dist = gaussian
p1 = 0
p2 = 1
lambda = 1

[tilt]
u = 0.2, 0, 0

[scenario]
n_seeds = 1600
)";

constexpr const char* kScalingDivergeIni = R"(
[run]
scenario = scaling
seed = 2024
outdir = out/acc/scaling_diverge

[lattice]
d = 3
N_list = 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16

[model]
kind = site
a = 0.5
dist = gaussian
p1 = 1
p2 = 1
lambda = 1

[tilt]
u = 0.2, 0, 0

[scenario]
n_seeds = 50
)";

TEST_CASE("criterion 04 surface tension dichotomy") {
  const ScenarioReport div = run_ini(kScalingDivergeIni);
  const Check* slope = find_check(div, "sigma_slope_negative");
  const Check* r2 = find_check(div, "sigma_fit_r2");
  const bool div_ok = div.pass() && slope && slope->value < 0 && r2 && r2->value > 0.99;

  const ScenarioReport ex = run_ini(kScalingExistIni);
  const Check* tstat = find_check(ex, "sigma_trend_t");
  const Check* gap = find_check(ex, "sigma_last_gap");
  const bool ex_ok = ex.pass() && tstat && tstat->value < 2.0 && gap && gap->value < 0.01;

  finish(4, div_ok && ex_ok,
         strf("mean 1: slope=%.4f r2=%.5f; mean 0: |t|=%.3f last_gap=%.4f",
              slope ? slope->value : 0.0, r2 ? r2->value : 0.0, tstat ? tstat->value : 99.0,
              gap ? gap->value : 99.0));
}

// ---------------------------------------------------------------------------
// 5: disorder-averaged bond means reproduce the tilt

constexpr const char* kTiltBondIni = R"(
[run]
scenario = tilt
seed = 2024
outdir = out/acc/tilt5_bond
[lattice]
d = 2
N_list = 8
[model]
kind = bond
c_min = 0.4
c_max = 0.6
eps_max = 0
[tilt]
u = 0.3, -0.2
[scenario]
n_seeds = 200
engine = exact
stride = 2
)";

constexpr const char* kTiltMcmcIni = R"(
[run]
scenario = tilt
seed = 2024
outdir = out/acc/tilt5_mcmc
[lattice]
d = 3
N_list = 3
[model]
kind = site
a = 0.5
eps = 0.3
dist = gaussian
p1 = 0
p2 = 1
lambda = 1
[tilt]
u = 0.5, 0, 0
[mcmc]
sweeps = 3000
burn_frac = 0.2
step = 1.0
[scenario]
n_seeds = 50
engine = mcmc
)";

TEST_CASE("criterion 05 tilt identity") {
  auto arm = [](const ScenarioReport& rep, int d) {
    Real worst_dev = 0, bound = 0;
    bool ok = rep.pass();
    for (int k = 0; k < d; ++k) {
      const Check* c = find_check(rep, "tilt_axis" + std::to_string(k) + "_within_3se");
      if (!c) return std::make_tuple(false, 0.0, 0.0);
      ok = ok && c->pass;
      if (std::abs(c->value) > worst_dev) {
        worst_dev = std::abs(c->value);
        bound = c->bound_hi;
      }
    }
    return std::make_tuple(ok, worst_dev, bound);
  };
  const auto [bond_ok, bond_dev, bond_bound] = arm(run_ini(kTiltBondIni), 2);
  const auto [mcmc_ok, mcmc_dev, mcmc_bound] = arm(run_ini(kTiltMcmcIni), 3);
  finish(5, bond_ok && mcmc_ok,
         strf("exact bond worst |dev|=%.2e (3se=%.2e); sampled worst |dev|=%.2e (3se=%.2e)",
              bond_dev, bond_bound, mcmc_dev, mcmc_bound));
}

// ---------------------------------------------------------------------------
// 6: tilt-centered second moment stays under one fitted envelope

constexpr const char* kTilt2Ini[3] = {R"(
[run]
scenario = tilt
seed = 2026
outdir = out/acc/tilt2_N4

[lattice]
d = 3
N_list = 4

[model]
kind = site
a = 0.5
dist = gaussian
p1 = 0
p2 = 1
lambda = 1

[tilt]
u = 0.3, -0.2, 0

[scenario]
engine = exact
n_seeds = 10
stride = 4
)",
                                      R"(
[run]
scenario = tilt
seed = 2028
outdir = out/acc/tilt2_N6

[lattice]
d = 3
N_list = 6

[model]
kind = site
a = 0.5
dist = gaussian
p1 = 0
p2 = 1
lambda = 1

[tilt]
u = 0.3, -0.2, 0

[scenario]
engine = exact
n_seeds = 10
stride = 6
)",
                                      R"(
[run]
scenario = tilt
seed = 2030
outdir = out/acc/tilt2_N8

[lattice]
d = 3
N_list = 8

[model]
kind = site
a = 0.5
dist = gaussian
p1 = 0
p2 = 1
lambda = 1

[tilt]
u = 0.3, -0.2, 0

[scenario]
engine = exact
n_seeds = 10
stride = 8
)"};

TEST_CASE("criterion 06 second moment envelope") {
  const int d = 3;
  std::vector<Real> Ns = {4, 6, 8}, ms, ses;
  bool runs_pass = true;
  for (const char* ini : kTilt2Ini) {
    const ScenarioReport rep = run_ini(ini);
    runs_pass = runs_pass && rep.pass();
    // per-instance axis-averaged second moment: rows arrive axis-major per seed
    std::vector<Real> per;
    Real acc = 0;
    int cnt = 0;
    for (const CsvRow& r : rep.rows) {
      if (r.observable.rfind("second_moment_axis", 0) != 0) continue;
      acc += r.value;
      if (++cnt == d) {
        per.push_back(acc / d);
        acc = 0;
        cnt = 0;
      }
    }
    ms.push_back(vec_mean(per));
    ses.push_back(vec_se(per));
  }
  const Real K = ms[0] + 3.0 * ses[0];  // envelope fitted on the smallest box
  bool bounded = true;
  for (Real m : ms) bounded = bounded && m <= K;
  // weighted trend in N with the per-N scatter as known variance
  Real sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (size_t i = 0; i < Ns.size(); ++i) {
    const Real w = 1.0 / (ses[i] * ses[i]);
    sw += w;
    swx += w * Ns[i];
    swy += w * ms[i];
    swxx += w * Ns[i] * Ns[i];
    swxy += w * Ns[i] * ms[i];
  }
  const Real det = sw * swxx - swx * swx;
  const Real trend = (sw * swxy - swx * swy) / det;
  const Real t = trend / std::sqrt(sw / det);
  const bool ok = runs_pass && bounded && t < 2.0;
  finish(6, ok,
         strf("m(N=4)=%.4f m(6)=%.4f m(8)=%.4f K=%.4f trend t=%.2f (want < 2)", ms[0], ms[1],
              ms[2], K, t));
}

// ---------------------------------------------------------------------------
// 7: quadratic-disorder free-energy bound with explicit constants

TEST_CASE("criterion 07 free energy bound") {
  const int d = 2, N = 5;
  const Real A = 0.5, beta = 0.1, C2 = 1.0;
  const Real alpha = 1.0 / (A - beta) - 2.0 / C2;
  const Region r = Region::lambda(d, N);
  const BC zero = [](const Coord&) { return 0.0; };

  const SiteDisorderSpec quiet{SiteDist::gaussian, 0.0, 1.0, 1, 0.0, Coord()};
  const Real fbar = log_partition(r, Model(ModelA{A - beta, 0.0, quiet}), zero) -
                    log_partition(r, Model(ModelA{C2 / 2.0, 0.0, quiet}), zero);
  const Real closed = 0.5 * r.size() * std::log(A / (A - beta));

  GreensSolver greens(r);
  Real worst = 1e300;
  for (long inst = 0; inst < 50; ++inst) {
    const SiteDisorderSpec sd{SiteDist::gaussian, 0.0, 1.0, 1000 + (uint64_t)inst, 1.0, Coord()};
    CounterRng rng(777, 0x1234 + (uint64_t)inst);
    Vec u(d);
    for (int k = 0; k < d; ++k) u[k] = 2.0 * u01(rng.bits({(int64_t)k})) - 1.0;
    const Model m = Model(ModelA{A, 0.0, sd});
    const Real F = f_beta(r, m, u, beta);
    const Vec xi = xi_field(sd, r) * sd.lambda;
    worst = std::min(worst, fbar + alpha / 4.0 * greens.quad_form_lap(xi) - F);
  }
  const bool ok = std::abs(fbar - closed) <= 1e-9 && worst >= -1e-8;
  finish(7, ok, strf("worst margin %.3e over 50 instances (want >= -1e-8)", worst));
}

// ---------------------------------------------------------------------------
// 8: squared-Green sums separate d=3,4 from d=5

TEST_CASE("criterion 08 delocalization dichotomy") {
  bool inc3 = true, inc4 = true;
  Real prev = -1;
  for (int N = 4; N <= 24; ++N) {
    const Real s = deloc_site_sum(3, N);
    if (s <= prev) inc3 = false;
    prev = s;
  }
  prev = -1;
  for (int N = 4; N <= 12; ++N) {
    const Real s = deloc_site_sum(4, N);
    if (s <= prev) inc4 = false;
    prev = s;
  }
  const Real s4 = deloc_site_sum(5, 4), s6 = deloc_site_sum(5, 6), s8 = deloc_site_sum(5, 8);
  const Real rel5 = (s8 - s6) / s8;
  const Real b20 = deloc_bond_sum(3, 20), b24 = deloc_bond_sum(3, 24);
  const Real relb = std::abs(b24 - b20) / b24;
  const bool ok = inc3 && inc4 && s4 < s6 && s6 < s8 && rel5 < 0.02 && relb < 0.05;
  finish(8, ok,
         strf("d3 increasing=%d d4 increasing=%d d5 top increment=%.3f%% bond gap=%.3f%%", inc3,
              inc4, 100.0 * rel5, 100.0 * relb));
}

// ---------------------------------------------------------------------------
// 9: single-site stationarity, summed boundary flux, sampled vs exact means

constexpr const char* kWardIni = R"(
[run]
scenario = ward
seed = 2024
outdir = out/acc/ward
[lattice]
d = 2
N_list = 6
[model]
kind = site
a = 0.5
eps = 0.2
dist = gaussian
p1 = 0
p2 = 1
lambda = 1
[tilt]
u = 0.3, -0.2
[mcmc]
sweeps = 6000
burn_frac = 0.2
step = 1.0
[scenario]
n_seeds = 5
)";

TEST_CASE("criterion 09 stationarity identities") {
  const ScenarioReport rep = run_ini(kWardIni);
  const Check* site = find_check(rep, "site_residuals_within_5se");
  const Check* flux = find_check(rep, "summed_flux_within_5se");
  const bool sampled_ok = rep.pass() && site && site->pass && flux && flux->pass;

  // gaussian potential: sampled per-site means against the exact solver
  const int d = 2;
  const Region box = Region::box_side(d, 0, 5);
  Vec u(d);
  u << 0.3, -0.2;
  const BC psi = tilt_bc(u);
  McmcParams p;
  p.sweeps = 8000;
  Real worst = 0;
  for (int j = 0; j < 3; ++j) {
    const SiteDisorderSpec xi{SiteDist::gaussian, 0.0, 1.0, derive_seed(2024, j), 1.0, Coord()};
    const Model m = ModelA{0.5, 0.0, xi};
    const GaussianSolution sol(assemble(box, m, psi));
    ChainState st = init_chain(box, psi, derive_seed(2024 ^ 0x3ad, j));
    VecBatchAcc acc(box.size(), p.sweeps - p.burn(p.sweeps), p.batches);
    run_chain(st, m, psi, p, [&](const Vec& phi) { acc.add(phi); });
    const Vec mean = acc.mean(), se = acc.se();
    for (long i = 0; i < box.size(); ++i)
      worst = std::max(worst, std::abs(mean[i] - sol.mean()[i]) / std::max(se[i], 1e-300));
  }
  const bool ok = sampled_ok && worst <= 4.0;
  finish(9, ok,
         strf("site t=%.2f flux t=%.2f (want <= 5); sampled-vs-exact t=%.2f (want <= 4)",
              site ? site->value : 99.0, flux ? flux->value : 99.0, worst));
}

// ---------------------------------------------------------------------------
// 10: split inequality with a constant calibrated out of sample

TEST_CASE("criterion 10 split subadditivity") {
  auto drive = [](const Region& B, const Vec& u) {
    const int d = B.dim();
    std::vector<std::pair<int, int>> splits;
    for (int axis = 0; axis < d; ++axis)
      for (int t = B.lo()[axis] + 1; t <= B.hi()[axis] - 1; ++t) splits.emplace_back(axis, t);

    const SiteDisorderSpec quiet{SiteDist::gaussian, 0.0, 1.0, 1, 0.0, Coord()};
    Real cal = 1e300;
    for (auto [axis, t] : splits)
      cal = std::min(cal, split_logc_max(B, ModelA{0.5, 0.0, quiet}, u, axis, t));
    CounterRng seeder(2024, 0x5eed);
    for (int j = 0; j < 100; ++j) {
      const SiteDisorderSpec sd{SiteDist::gaussian, 0.0, 1.0, seeder.bits({j}), 1.0, Coord()};
      const ModelA m{0.5, 0.0, sd};
      for (auto [axis, t] : splits) cal = std::min(cal, split_logc_max(B, m, u, axis, t));
    }
    Real worst_hold = 1e300;
    for (int j = 100; j < 200; ++j) {
      const SiteDisorderSpec sd{SiteDist::gaussian, 0.0, 1.0, seeder.bits({j}), 1.0, Coord()};
      const ModelA m{0.5, 0.0, sd};
      for (auto [axis, t] : splits) {
        const Real fB = f_functional(B, m, u, cal);
        const Split s = split_at(B, axis, t);
        worst_hold = std::min(
            worst_hold, f_functional(s.left, m, u, cal) + f_functional(s.right, m, u, cal) - fB);
      }
    }
    return std::make_pair(cal, worst_hold);
  };
  Vec u2(2);
  u2 << 0.3, -0.2;
  const auto [cal2, hold2] = drive(Region::box(cv({0, 0}), cv({1, 5})), u2);
  Vec u1(1);
  u1 << 0.4;
  const auto [cal1, hold1] = drive(Region::box(cv({0}), cv({11})), u1);
  const bool ok = hold2 >= 0.0 && hold1 >= 0.0;
  finish(10, ok,
         strf("held-out worst margins: %.3e (2x6, C=%.6f) and %.3e (1x12, C=%.6f)", hold2, cal2,
              hold1, cal1));
}

// ---------------------------------------------------------------------------
// 11: averaged functionals move by at most the symmetric-difference share

constexpr const char* kShiftIni = R"(
[run]
scenario = shift_covariance
seed = 2024
outdir = out/acc/shift
[lattice]
d = 2
N_list = 6, 8, 10
[model]
a = 0.5
dist = gaussian
p1 = 0
p2 = 1
lambda = 1
[tilt]
u = 0.3, -0.2
[scenario]
n_seeds = 20
v = 1, 0
clip = 3.0
)";

TEST_CASE("criterion 11 shift covariance") {
  const ScenarioReport rep = run_ini(kShiftIni);
  bool rows_ok = true;
  Real worst_ratio = 0;
  for (const CsvRow& r : rep.rows) {
    if (r.observable != "shift_residual") continue;
    rows_ok = rows_ok && r.value <= r.bound_hi + 1e-12;
    if (r.bound_hi > 0) worst_ratio = std::max(worst_ratio, r.value / r.bound_hi);
  }
  const bool ok = rep.pass() && rows_ok;
  finish(11, ok, strf("worst residual/bound = %.4f over N in {6,8,10} x 20 seeds", worst_ratio));
}

// ---------------------------------------------------------------------------
// 12: reruns are byte-stable (exact engines) and bit-stable (chains)

namespace {

constexpr const char* kDetIni[] = {
    R"(
[run]
scenario = deloc
seed = 3
outdir = out/acc/det_deloc
[lattice]
d_list = 3
N_list = 4, 6
)",
    R"(
[run]
scenario = slln
seed = 11
outdir = out/acc/det_slln
[lattice]
d = 3
N_list = 4, 6
[model]
dist = gaussian
p1 = 0
p2 = 1
[scenario]
n_seeds = 5
)",
    R"(
[run]
scenario = scaling
seed = 17
outdir = out/acc/det_scaling_site
[lattice]
d = 3
N_list = 4, 5, 6
[model]
kind = site
a = 0.5
dist = gaussian
p1 = 0
p2 = 1
lambda = 1
[tilt]
u = 0.2, 0, 0
[scenario]
n_seeds = 3
)",
    R"(
[run]
scenario = scaling
seed = 19
outdir = out/acc/det_scaling_bond
[lattice]
d = 2
N_list = 4, 5, 6
[model]
kind = bond
c_min = 0.4
c_max = 0.6
eps_max = 0
[tilt]
u = 0.3, -0.2
[scenario]
n_seeds = 3
)",
    R"(
[run]
scenario = tilt
seed = 23
outdir = out/acc/det_tilt_site
[lattice]
d = 2
N_list = 4
[model]
kind = site
a = 0.5
dist = gaussian
p1 = 0
p2 = 1
lambda = 1
[tilt]
u = 0.2, -0.1
[scenario]
engine = exact
n_seeds = 5
stride = 2
)",
    R"(
[run]
scenario = tilt
seed = 29
outdir = out/acc/det_tilt_bond
[lattice]
d = 2
N_list = 4
[model]
kind = bond
c_min = 0.4
c_max = 0.6
eps_max = 0
[tilt]
u = 0.2, -0.1
[scenario]
engine = exact
n_seeds = 5
stride = 2
)",
    R"(
[run]
scenario = shift_covariance
seed = 31
outdir = out/acc/det_shift
[lattice]
d = 2
N_list = 5
[model]
a = 0.5
dist = gaussian
p1 = 0
p2 = 1
lambda = 1
[tilt]
u = 0.3, -0.2
[scenario]
n_seeds = 4
v = 1, 0
clip = 3.0
)"};

}  // namespace

TEST_CASE("criterion 12 determinism") {
  bool csv_stable = true;
  int arms = 0;
  for (const char* ini : kDetIni) {
    const ScenarioReport r1 = run_ini(ini);
    const ScenarioReport r2 = run_ini(ini);
    const bool same =
        csv_text(r1.rows) == csv_text(r2.rows) && r1.manifest_hash == r2.manifest_hash;
    csv_stable = csv_stable && same;
    ++arms;
  }

  // chains: every accepted sweep byte-for-byte reproducible from the seed
  const int d = 2;
  const Region box = Region::box_side(d, 0, 5);
  Vec u(d);
  u << 0.2, -0.1;
  const BC psi = tilt_bc(u);
  const SiteDisorderSpec xi{SiteDist::gaussian, 0.0, 1.0, 11, 1.0, Coord()};
  auto traj_hash = [&](Real eps, uint64_t chain_seed) {
    const Model m = ModelA{0.5, eps, xi};
    ChainState st = init_chain(box, psi, chain_seed);
    McmcParams p;
    p.sweeps = 60;
    p.burn_frac = 0.0;
    p.min_burn = 0;
    p.batches = 4;
    std::string bytes;
    run_chain(st, m, psi, p, [&](const Vec& phi) {
      bytes.append(reinterpret_cast<const char*>(phi.data()),
                   static_cast<size_t>(phi.size()) * sizeof(Real));
    });
    return sha256_hex(bytes);
  };
  const bool hb_stable = traj_hash(0.0, 99) == traj_hash(0.0, 99);
  const bool mh_stable = traj_hash(0.3, 123) == traj_hash(0.3, 123);
  const bool seeds_differ = traj_hash(0.0, 99) != traj_hash(0.0, 100);

  const bool ok = csv_stable && hb_stable && mh_stable && seeds_differ;
  finish(12, ok,
         strf("%d exact configs rerun byte-identical=%d; heat-bath bit-identical=%d; "
              "metropolis bit-identical=%d; distinct seeds diverge=%d",
              arms, csv_stable, hb_stable, mh_stable, seeds_differ));
}
