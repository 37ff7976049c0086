#include "qlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace qlab {

static void require(bool ok, const std::string& msg) {
  if (!ok) throw QlabError(msg);
}

Region Region::box(Coord lo, Coord hi) {
  require(lo.size() == hi.size() && lo.size() > 0, "box: dimension mismatch");
  Region r;
  r.d_ = static_cast<int>(lo.size());
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  r.is_box_ = true;
  r.strides_.assign(r.d_, 1);
  long n = 1;
  for (int k = r.d_ - 1; k >= 0; --k) {
    require(r.hi_[k] >= r.lo_[k], "box: empty extent");
    r.strides_[k] = n;
    n *= r.side(k);
  }
  r.n_ = n;
  return r;
}

Region Region::box_side(int d, int lo, int hi) {
  return box(Coord::Constant(d, lo), Coord::Constant(d, hi));
}

Region Region::ball(int d, double radius) {
  require(d > 0 && radius > 0, "ball: bad parameters");
  int R = static_cast<int>(std::ceil(radius));
  Region r = box_side(d, -R, R);
  r.is_box_ = false;
  r.radius_ = radius;
  long cells = r.n_;
  r.table_.assign(cells, -1);
  r.sites_.clear();
  long n = 0;
  Coord x(d);
  for (long c = 0; c < cells; ++c) {
    long rem = c;
    double norm2 = 0;
    for (int k = 0; k < d; ++k) {
      x[k] = static_cast<int>(rem / r.strides_[k]) + r.lo_[k];
      rem %= r.strides_[k];
      norm2 += static_cast<double>(x[k]) * x[k];
    }
    if (norm2 < radius * radius) {
      r.table_[c] = n++;
      for (int k = 0; k < d; ++k) r.sites_.push_back(x[k]);
    }
  }
  r.n_ = n;
  require(n > 0, "ball: empty");
  return r;
}

long Region::box_cell(const Coord& x) const {
  long c = 0;
  for (int k = 0; k < d_; ++k) c += static_cast<long>(x[k] - lo_[k]) * strides_[k];
  return c;
}

bool Region::contains(const Coord& x) const {
  if (x.size() != d_) return false;
  for (int k = 0; k < d_; ++k)
    if (x[k] < lo_[k] || x[k] > hi_[k]) return false;
  if (is_box_) return true;
  return table_[box_cell(x)] >= 0;
}

long Region::find(const Coord& x) const {
  if (!contains(x)) return -1;
  return is_box_ ? box_cell(x) : table_[box_cell(x)];
}

long Region::index(const Coord& x) const {
  long i = find(x);
  if (i < 0) {
    std::ostringstream os;
    os << "site outside region:";
    for (int k = 0; k < x.size(); ++k) os << ' ' << x[k];
    throw OutOfSupport(os.str());
  }
  return i;
}

Coord Region::site(long i) const {
  require(i >= 0 && i < n_, "site index out of range");
  Coord x(d_);
  if (is_box_) {
    for (int k = 0; k < d_; ++k) {
      x[k] = static_cast<int>(i / strides_[k]) + lo_[k];
      i %= strides_[k];
    }
  } else {
    for (int k = 0; k < d_; ++k) x[k] = sites_[static_cast<size_t>(i) * d_ + k];
  }
  return x;
}

Region Region::shifted(const Coord& v) const {
  require(is_box_, "shifted: box regions only");
  require(v.size() == d_, "shifted: dimension mismatch");
  return box(lo_ + v, hi_ + v);
}

long Region::neighbor(long i, int axis, int dir) const {
  if (is_box_) {
    Coord x = site(i);  // cheap: d integer divisions
    x[axis] += dir;
    return find(x);
  }
  Coord x = site(i);
  x[axis] += dir;
  return find(x);
}

std::string Region::describe() const {
  std::ostringstream os;
  if (is_box_) {
    os << "box";
    for (int k = 0; k < d_; ++k) os << " [" << lo_[k] << "," << hi_[k] << "]";
  } else {
    os << "ball d=" << d_ << " r<" << radius_;
  }
  return os.str();
}

BondList bonds_touching(const Region& r) {
  BondList out;
  const int d = r.dim();
  for (long i = 0; i < r.size(); ++i) {
    Coord x = r.site(i);
    for (int k = 0; k < d; ++k) {
      // bond (x, x+e_k): emitted by its lower endpoint when that endpoint is
      // inside; a boundary bond whose lower endpoint is outside is emitted by
      // the upper endpoint below.
      Coord y = x;
      y[k] += 1;
      out.bonds.push_back({x, k});
      out.interior.push_back(r.contains(y));
      Coord w = x;
      w[k] -= 1;
      if (!r.contains(w)) {
        out.bonds.push_back({w, k});
        out.interior.push_back(false);
      }
    }
  }
  return out;
}

std::vector<Coord> boundary_sites(const Region& r) {
  std::set<std::vector<int>> acc;
  const int d = r.dim();
  for (long i = 0; i < r.size(); ++i) {
    Coord x = r.site(i);
    for (int k = 0; k < d; ++k)
      for (int dir : {-1, 1}) {
        Coord y = x;
        y[k] += dir;
        if (!r.contains(y)) acc.insert(std::vector<int>(y.data(), y.data() + d));
      }
  }
  std::vector<Coord> out;
  out.reserve(acc.size());
  for (const auto& v : acc) {
    Coord c(d);
    for (int k = 0; k < d; ++k) c[k] = v[k];
    out.push_back(std::move(c));
  }
  return out;
}

long symmetric_difference_size(const Region& box, const Coord& v) {
  if (!box.is_box()) throw QlabError("symmetric_difference_size: box regions only");
  if (v.size() != box.dim()) throw QlabError("symmetric_difference_size: dimension mismatch");
  long inter = 1;
  for (int k = 0; k < box.dim(); ++k)
    inter *= std::max(0L, static_cast<long>(box.side(k)) - std::abs(static_cast<long>(v[k])));
  return 2 * (box.size() - inter);
}

BondField::BondField(Region box) : box_(std::move(box)) {
  if (!box_.is_box()) throw QlabError("BondField: box regions only");
  const int d = box_.dim();
  axis_offset_.assign(d + 1, 0);
  long total = 0;
  for (int k = 0; k < d; ++k) {
    long cnt = 1;
    for (int j = 0; j < d; ++j) cnt *= box_.side(j) - (j == k ? 1 : 0);
    axis_offset_[k] = total;
    total += std::max(0L, cnt);
  }
  axis_offset_[d] = total;
  v_ = Vec::Zero(total);
}

long BondField::bond_index(const Coord& x, int axis) const {
  const int d = box_.dim();
  if (axis < 0 || axis >= d) throw OutOfSupport("bond axis out of range");
  long idx = 0;
  for (int k = 0; k < d; ++k) {
    int sidek = box_.side(k) - (k == axis ? 1 : 0);
    int rel = x[k] - box_.lo()[k];
    if (rel < 0 || rel >= sidek) throw OutOfSupport("bond outside region");
    idx = idx * sidek + rel;
  }
  return axis_offset_[axis] + idx;
}

Real BondField::directed(const Coord& from, const Coord& to) const {
  int axis = -1, sign = 0;
  for (int k = 0; k < box_.dim(); ++k) {
    int dlt = to[k] - from[k];
    if (dlt == 0) continue;
    if (axis >= 0 || std::abs(dlt) != 1) throw OutOfSupport("not a nearest-neighbor pair");
    axis = k;
    sign = dlt;
  }
  if (axis < 0) throw OutOfSupport("not a nearest-neighbor pair");
  return sign > 0 ? at(from, axis) : -at(to, axis);
}

BondField gradient(const HeightField& phi) {
  BondField eta(phi.region());
  const Region& b = phi.region();
  for (long i = 0; i < b.size(); ++i) {
    Coord x = b.site(i);
    for (int k = 0; k < b.dim(); ++k) {
      Coord y = x;
      y[k] += 1;
      if (b.contains(y)) eta.at(x, k) = phi.at(y) - phi.at(x);
    }
  }
  return eta;
}

void check_plaquettes(const BondField& eta, Real tol) {
  const Region& b = eta.region();
  const int d = b.dim();
  for (long s = 0; s < b.size(); ++s) {
    Coord x = b.site(s);
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        Coord xi = x, xj = x, xij = x;
        xi[i] += 1;
        xj[j] += 1;
        xij[i] += 1;
        xij[j] += 1;
        if (!b.contains(xij)) continue;
        Real curl = eta.at(x, i) + eta.at(xi, j) - eta.at(xj, i) - eta.at(x, j);
        if (std::abs(curl) > tol) {
          std::ostringstream os;
          os << "plaquette violation " << curl << " at";
          for (int k = 0; k < d; ++k) os << ' ' << x[k];
          os << " axes " << i << "," << j;
          throw PlaquetteViolation(os.str());
        }
      }
  }
}

HeightField integrate_heights(const BondField& eta, Real phi0, Real plaquette_tol) {
  check_plaquettes(eta, plaquette_tol);
  const Region& b = eta.region();
  HeightField phi(b);
  // row-major order guarantees the staircase predecessor is already set
  for (long i = 0; i < b.size(); ++i) {
    Coord x = b.site(i);
    if (x == b.lo()) {
      phi.at(x) = phi0;
      continue;
    }
    for (int k = b.dim() - 1; k >= 0; --k) {
      if (x[k] > b.lo()[k]) {
        Coord p = x;
        p[k] -= 1;
        phi.at(x) = phi.at(p) + eta.at(p, k);
        break;
      }
    }
  }
  return phi;
}

BlockPartition block_partition(int d, int N, int n) {
  if (d < 1 || N < 0 || n < 1 || n > N + 1) throw QlabError("block_partition: need 1 <= n <= N+1");
  const int side = N + 1;
  const int k = side / n;
  BlockPartition out;
  // k^d half-open cubes of side n: axis ranges [(a-1)n, an-1]
  std::vector<int> a(d, 0);
  while (true) {
    Coord lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
      lo[i] = a[i] * n;
      hi[i] = (a[i] + 1) * n - 1;
    }
    out.cubes.push_back(Region::box(lo, hi));
    int c = d - 1;
    while (c >= 0 && ++a[c] == k) a[c--] = 0;
    if (c < 0) break;
  }
  // remainder slabs, disjointified: slab s takes z_s in [kn, N], axes before s
  // restricted to the cube-covered range, axes after s unrestricted
  if (k * n <= N) {
    for (int s = 0; s < d; ++s) {
      Coord lo(d), hi(d);
      bool empty = false;
      for (int i = 0; i < d; ++i) {
        if (i < s) {
          lo[i] = 0;
          hi[i] = k * n - 1;
          if (hi[i] < lo[i]) empty = true;
        } else if (i == s) {
          lo[i] = k * n;
          hi[i] = N;
        } else {
          lo[i] = 0;
          hi[i] = N;
        }
      }
      if (!empty) out.slabs.push_back(Region::box(lo, hi));
    }
  }
  long total = 1;
  for (int i = 0; i < d; ++i) total *= side;
  for (const auto& c : out.cubes) out.covered += c.size();
  out.dropped_fraction = static_cast<double>(total - out.covered) / static_cast<double>(total);
  return out;
}

}  // namespace qlab
