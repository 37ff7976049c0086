#include "qlab/disorder.hpp"

#include <cmath>
#include <sstream>

namespace qlab {

// PPND16 (Wichura, AS 241): quantile of the standard normal.
double normal_ppf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw QlabError("normal_ppf: p outside (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.99322253893089639120e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

namespace {
constexpr uint64_t kSiteStream = 0x51;
constexpr uint64_t kBondStream = 0xb0;
}  // namespace

Real SiteDisorderSpec::mean() const {
  switch (dist) {
    case SiteDist::gaussian:
      return p1;
    case SiteDist::rademacher_shifted:
      return p1;  // values m +/- 1 with probability 1/2 each
    case SiteDist::uniform:
      return 0.5 * (p1 + p2);
  }
  return 0;
}

Real SiteDisorderSpec::second_moment() const {
  switch (dist) {
    case SiteDist::gaussian:
      return p1 * p1 + p2 * p2;
    case SiteDist::rademacher_shifted:
      return p1 * p1 + 1.0;
    case SiteDist::uniform: {
      Real m = mean(), w = p2 - p1;
      return m * m + w * w / 12.0;
    }
  }
  return 0;
}

std::string SiteDisorderSpec::describe() const {
  std::ostringstream os;
  switch (dist) {
    case SiteDist::gaussian:
      os << "gaussian(" << p1 << "," << p2 << ")";
      break;
    case SiteDist::rademacher_shifted:
      os << "rademacher_shifted(" << p1 << ")";
      break;
    case SiteDist::uniform:
      os << "uniform(" << p1 << "," << p2 << ")";
      break;
  }
  return os.str();
}

Real xi_at(const SiteDisorderSpec& s, const Coord& x) {
  Coord base = x;
  if (s.shift.size() == x.size()) base = x - s.shift;
  CounterRng rng(s.seed, kSiteStream);
  uint64_t h = rng.bits_coord(base);
  switch (s.dist) {
    case SiteDist::gaussian:
      return s.p1 + s.p2 * normal_ppf(u01(h));
    case SiteDist::rademacher_shifted:
      return s.p1 + ((h & 1) ? 1.0 : -1.0);
    case SiteDist::uniform:
      return s.p1 + (s.p2 - s.p1) * u01(h);
  }
  return 0;
}

Vec xi_field(const SiteDisorderSpec& s, const Region& r) {
  Vec v(r.size());
  for (long i = 0; i < r.size(); ++i) v[i] = xi_at(s, r.site(i));
  return v;
}

SiteDisorderSpec shifted(SiteDisorderSpec s, const Coord& v) {
  if (s.shift.size() == v.size())
    s.shift += v;
  else
    s.shift = v;
  return s;
}

BondCoeff omega_at(const BondDisorderSpec& s, const Bond& b) {
  Coord base = b.x;
  if (s.shift.size() == base.size()) base = b.x - s.shift;
  CounterRng rng(s.seed, kBondStream);
  uint64_t hc = rng.bits_coord(base, 2 * b.axis);
  uint64_t he = rng.bits_coord(base, 2 * b.axis + 1);
  return {s.c_min + (s.c_max - s.c_min) * u01(hc), s.eps_max * u01(he)};
}

BondDisorderSpec shifted(BondDisorderSpec s, const Coord& v) {
  if (s.shift.size() == v.size())
    s.shift += v;
  else
    s.shift = v;
  return s;
}

Envelope envelope(const BondDisorderSpec& s) {
  return {s.c_min, s.eps_max, s.c_max, 2.0 * s.c_max + s.eps_max};
}

}  // namespace qlab
