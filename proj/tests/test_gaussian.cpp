#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "qlab/disorder.hpp"
#include "qlab/gaussian.hpp"
#include "qlab/greens.hpp"
#include "qlab/lattice.hpp"
#include "qlab/potential.hpp"

using namespace qlab;

namespace {

SiteDisorderSpec gauss_xi(uint64_t seed, Real lambda = 1.0) {
  SiteDisorderSpec s;
  s.dist = SiteDist::gaussian;
  s.p1 = 0.0;
  s.p2 = 1.0;
  s.seed = seed;
  s.lambda = lambda;
  return s;
}

}  // namespace

TEST_CASE("assembly matches the dense bond-by-bond oracle") {
  const Region r = Region::lambda(2, 2);
  const Model m = ModelA{0.7, 0.0, gauss_xi(3, 1.3)};
  const BC psi = tilt_bc((Vec(2) << 0.4, -0.1).finished());

  const PrecisionOperator op = assemble(r, m, psi);
  const test::DenseGibbs g = test::dense_gibbs(r, m, psi);
  CHECK((Mat(op.Q) - g.Q).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((op.b - g.b).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(op.c0 == doctest::Approx(g.c0).epsilon(1e-12));

  GaussianSolution sol(op);
  CHECK((op.Q * sol.mean() - op.b).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(sol.log_partition() ==
        doctest::Approx(test::dense_log_partition(g)).epsilon(1e-10));

  // free-function wrapper agrees
  CHECK(log_partition(r, m, psi) == doctest::Approx(sol.log_partition()).epsilon(1e-12));
}

TEST_CASE("model b assembly uses per-bond conductances") {
  BondDisorderSpec om;
  om.c_min = 0.3;
  om.c_max = 1.4;
  om.seed = 9;
  const Region r = Region::lambda(2, 2);
  const Model m = ModelB{om};
  const BC psi = tilt_bc((Vec(2) << -0.2, 0.5).finished());
  const PrecisionOperator op = assemble(r, m, psi);
  const test::DenseGibbs g = test::dense_gibbs(r, m, psi);
  CHECK((Mat(op.Q) - g.Q).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((op.b - g.b).lpNorm<Eigen::Infinity>() < 1e-12);
  GaussianSolution sol(op);
  CHECK(sol.log_partition() ==
        doctest::Approx(test::dense_log_partition(g)).epsilon(1e-10));
}

TEST_CASE("quenched mean is the laplacian response at a equals one half") {
  // Q = 2a L, so at a = 1/2, zero bc: mean = G_lap (lambda xi)
  const Region r = Region::lambda(3, 2);
  const SiteDisorderSpec xi = gauss_xi(17, 0.8);
  GaussianSolution sol(assemble(r, Model(ModelA{0.5, 0.0, xi}), zero_bc()));
  const GreensSolver green(r);
  const Vec f = xi_field(xi, r);
  Vec want = Vec::Zero(r.size());
  for (long j = 0; j < r.size(); ++j)
    if (f[j] != 0.0) want += (0.8 * f[j]) * green.column_lap(r.site(j));
  CHECK((sol.mean() - want).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("one interior site in d dimensions closes in elementary terms") {
  for (int d = 1; d <= 3; ++d) {
    const Real a = 0.65;
    SiteDisorderSpec quiet = gauss_xi(1, 0.0);
    const Region one = Region::box_side(d, 0, 0);
    GaussianSolution sol(assemble(one, Model(ModelA{a, 0.0, quiet}), zero_bc()));
    // 2d bonds touch the site, each with stiffness 2a: Z = sqrt(2 pi / (4 d a))
    CHECK(sol.log_partition() ==
          doctest::Approx(0.5 * std::log(2.0 * M_PI / (4.0 * d * a))).epsilon(1e-12));
  }
}

TEST_CASE("bond statistics match dense covariance algebra") {
  const Region r = Region::lambda(2, 2);
  const SiteDisorderSpec xi = gauss_xi(23, 1.0);
  const Model m = ModelA{0.6, 0.0, xi};
  const Vec u = (Vec(2) << 0.3, -0.2).finished();
  const BC psi = tilt_bc(u);
  GaussianSolution sol(assemble(r, m, psi));
  const test::DenseGibbs g = test::dense_gibbs(r, m, psi);
  const Mat cov = g.Q.inverse();
  const Vec mean = cov * g.b;

  const Bond inner{coord({0, 0}), 1};          // both ends inside
  const Bond edge{coord({2, 0}), 0};           // one end on the boundary rim
  for (const Bond& b : {inner, edge}) {
    const long ix = r.find(b.x), iy = r.find(b.other());
    const Real mx = ix >= 0 ? mean[ix] : psi(b.x);
    const Real my = iy >= 0 ? mean[iy] : psi(b.other());
    Real var = 0;
    if (ix >= 0) var += cov(ix, ix);
    if (iy >= 0) var += cov(iy, iy);
    if (ix >= 0 && iy >= 0) var -= 2.0 * cov(ix, iy);
    CHECK(sol.bond_mean(b, psi) == doctest::Approx(my - mx).epsilon(1e-10));
    CHECK(sol.bond_variance(b) == doctest::Approx(var).epsilon(1e-10));
  }

  // quad form through the factorization
  Vec v = Vec::LinSpaced(r.size(), 0.1, 1.0);
  CHECK(sol.quad_Qinv(v) == doctest::Approx(v.dot(cov * v)).epsilon(1e-10));
}

TEST_CASE("constant-conductance model b is model a in disguise") {
  BondDisorderSpec om;
  om.c_min = 0.9;
  om.c_max = 0.9;
  om.eps_max = 0.0;
  const Region r = Region::lambda(2, 3);
  const Vec u = (Vec(2) << 0.25, 0.1).finished();
  const BC psi = tilt_bc(u);
  GaussianSolution sb(assemble(r, Model(ModelB{om}), psi));
  GaussianSolution sa(assemble(r, Model(ModelA{0.9, 0.0, gauss_xi(1, 0.0)}), psi));
  CHECK(sb.log_partition() == doctest::Approx(sa.log_partition()).epsilon(1e-12));
  CHECK((sb.mean() - sa.mean()).lpNorm<Eigen::Infinity>() < 1e-12);
  const Bond b{coord({1, 1}), 0};
  CHECK(sb.bond_variance(b) == doctest::Approx(sa.bond_variance(b)).epsilon(1e-12));
}

TEST_CASE("log partition responds to disorder through the green quadratic form") {
  const Region r = Region::lambda(3, 2);
  const SiteDisorderSpec xi = gauss_xi(29, 1.0);
  const Vec u = (Vec(3) << 0.2, 0.0, -0.1).finished();
  const GaussianIdentity id = gaussian_identity_check(r, ModelA{0.5, 0.0, xi}, u);
  CHECK(std::abs(id.lhs - id.rhs) < 1e-10);
  // the classical constant 1/(2a) does not match this normalization
  CHECK(std::abs(id.lhs - id.paper_rhs) > 1e-3);
}

TEST_CASE("tilted surface tension in d=1 has a closed form") {
  // plane is the exact minimizer; fluctuations are tilt independent:
  // sigma(u) - sigma(0) = a u^2 (n+1)/n on an n-site interval
  const int N = 4;
  const Region r = Region::lambda(1, N);
  const Real n = static_cast<Real>(r.size());
  const Real a = 0.7;
  const Model m = ModelA{a, 0.0, gauss_xi(1, 0.0)};
  for (Real uu : {0.0, 0.3, -0.8}) {
    const Vec u = (Vec(1) << uu).finished();
    const Real got = surface_tension_exact(r, m, u) -
                     surface_tension_exact(r, m, Vec::Zero(1));
    CHECK(got == doctest::Approx(a * uu * uu * (n + 1.0) / n).epsilon(1e-12));
  }
}

TEST_CASE("f beta vanishes at zero, grows with beta, rejects overload") {
  const Region r = Region::lambda(2, 2);
  const SiteDisorderSpec xi = gauss_xi(31, 1.0);
  const Model m = ModelA{0.5, 0.0, xi};
  const Vec u = (Vec(2) << 0.2, -0.3).finished();
  CHECK(f_beta(r, m, u, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  Real prev = 0.0;
  for (Real beta : {0.05, 0.1, 0.2, 0.35}) {
    const Real f = f_beta(r, m, u, beta);
    CHECK(f > prev);
    prev = f;
  }
  // stiffness is 2a = 1, so 2 beta >= 1 must refuse
  CHECK_THROWS_AS(f_beta(r, m, u, 0.5), QlabError);
  CHECK_THROWS_AS(f_beta(r, m, u, -0.1), QlabError);
}

TEST_CASE("delocalization sums match explicit green columns") {
  for (int d : {2, 3}) {
    const int N = 3;
    const Region r = Region::lambda(d, N);
    const GreensSolver g(r);
    const Vec c0 = g.column_lap(coord(std::vector<int>(d, 0)));
    CHECK(deloc_site_sum(d, N) == doctest::Approx(c0.squaredNorm()).epsilon(1e-10));
    const Vec c1 = g.column_lap(unit(d, 0));
    CHECK(deloc_bond_sum(d, N) ==
          doctest::Approx((c0 - c1).squaredNorm()).epsilon(1e-10));
  }
}

TEST_CASE("averaged engine reproduces the tilt with no disorder") {
  const Region box = Region::box_side(2, 0, 4);
  const Vec u = (Vec(2) << 0.3, -0.2).finished();
  const AveragedEngineA eng(box, 0.5, u, 1);
  const SiteDisorderSpec quiet = gauss_xi(1, 0.0);
  const Bond b0{coord({2, 2}), 0};
  const Bond b1{coord({2, 2}), 1};
  CHECK(eng.bond_mean(quiet, b0) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(eng.bond_mean(quiet, b1) == doctest::Approx(-0.2).epsilon(1e-10));
  // clipping at a generous level changes nothing
  const SiteDisorderSpec xi = gauss_xi(37, 1.0);
  CHECK(eng.clipped_bond_mean(xi, b0, 1e6) ==
        doctest::Approx(eng.bond_mean(xi, b0)).epsilon(1e-12));
  // second moment dominates the squared centered mean
  CHECK(eng.second_moment(xi, b0) >= -1e-12);
  // stride thins the shift set
  const AveragedEngineA strided(box, 0.5, u, 2);
  CHECK(strided.shift_count() < eng.shift_count());
  CHECK(strided.shift_count() == 9);
}

TEST_CASE("averaged engines a and b agree at constant conductance") {
  const Region box = Region::box_side(2, 0, 3);
  const Vec u = (Vec(2) << 0.4, 0.1).finished();
  BondDisorderSpec om;
  om.c_min = 0.5;
  om.c_max = 0.5;
  om.eps_max = 0.0;
  const AveragedEngineA ea(box, 0.5, u, 1);
  const AveragedEngineB eb(box, om, u, 1);
  const SiteDisorderSpec quiet = gauss_xi(1, 0.0);
  for (const Bond& b : {Bond{coord({1, 1}), 0}, Bond{coord({2, 0}), 1}}) {
    CHECK(eb.bond_mean(b) == doctest::Approx(ea.bond_mean(quiet, b)).epsilon(1e-10));
    CHECK(eb.second_moment(b) ==
          doctest::Approx(ea.second_moment(quiet, b)).epsilon(1e-10));
  }
}
