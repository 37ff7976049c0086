#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qlab/types.hpp"

namespace qlab {

inline Real vec_mean(const std::vector<Real>& v) {
  if (v.empty()) throw QlabError("mean of empty sample");
  Real s = 0;
  for (Real x : v) s += x;
  return s / static_cast<Real>(v.size());
}

inline Real vec_sd(const std::vector<Real>& v) {
  if (v.size() < 2) throw QlabError("sd needs two points");
  const Real m = vec_mean(v);
  Real ss = 0;
  for (Real x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<Real>(v.size() - 1));
}

inline Real vec_se(const std::vector<Real>& v) { return vec_sd(v) / std::sqrt(static_cast<Real>(v.size())); }

// ordinary least squares y = intercept + slope x with the usual residual-based
// slope standard error; t_slope tests slope = 0
struct LinFit {
  Real slope = 0, intercept = 0, r2 = 0, se_slope = 0, t_slope = 0;
};

inline LinFit fit_line(const std::vector<Real>& x, const std::vector<Real>& y) {
  const long n = static_cast<long>(x.size());
  if (n < 3 || y.size() != x.size()) throw QlabError("fit_line needs >= 3 paired points");
  Real mx = 0, my = 0;
  for (long i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  Real sxx = 0, sxy = 0, syy = 0;
  for (long i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw QlabError("fit_line: degenerate abscissae");
  LinFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  Real ssr = 0;
  for (long i = 0; i < n; ++i) {
    const Real r = y[i] - f.intercept - f.slope * x[i];
    ssr += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
  const Real s2 = ssr / static_cast<Real>(n - 2);
  f.se_slope = std::sqrt(s2 / sxx);
  f.t_slope = f.se_slope > 0 ? f.slope / f.se_slope : (f.slope == 0 ? 0 : std::copysign(1e300, f.slope));
  return f;
}

inline LinFit fit_loglog(const std::vector<Real>& x, const std::vector<Real>& y) {
  std::vector<Real> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) throw QlabError("fit_loglog needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

}  // namespace qlab
