#pragma once

#include <string>
#include <vector>

#include "qlab/types.hpp"

namespace qlab {

// Finite site set of Z^d: an axis-aligned box [lo, hi] or a Euclidean ball
// {|x| < r}. Sites are indexed row-major over the bounding box (axis 0
// slowest); that ordering is shared by every module that stores per-site data.
class Region {
 public:
  static Region box(Coord lo, Coord hi);
  static Region box_side(int d, int lo, int hi);  // [lo,hi]^d
  static Region lambda(int d, int N) { return box_side(d, -N, N); }  // [-N,N]^d
  static Region lambda0(int d, int N) { return box_side(d, 0, N); }  // [0,N]^d
  static Region ball(int d, double radius);  // {x : |x|_2 < radius}, strict

  int dim() const { return d_; }
  long size() const { return n_; }
  bool is_box() const { return is_box_; }
  const Coord& lo() const { return lo_; }
  const Coord& hi() const { return hi_; }
  int side(int axis) const { return hi_[axis] - lo_[axis] + 1; }

  bool contains(const Coord& x) const;
  long index(const Coord& x) const;      // throws OutOfSupport if absent
  long find(const Coord& x) const;       // -1 if absent
  Coord site(long i) const;
  Region shifted(const Coord& v) const;  // boxes only

  // flat helpers used by assembly loops: neighbor of site i along +/-axis, -1 if outside
  long neighbor(long i, int axis, int dir) const;

  std::string describe() const;

 private:
  Region() = default;
  int d_ = 0;
  long n_ = 0;
  bool is_box_ = true;
  double radius_ = 0;  // balls
  Coord lo_, hi_;      // bounding box
  std::vector<long> strides_;
  std::vector<long> table_;        // balls: bounding-box cell -> site index
  std::vector<int32_t> sites_;     // balls: packed coords, d per site
  long box_cell(const Coord& x) const;
};

// Undirected nearest-neighbor bond, stored canonically as its lexicographically
// smaller endpoint plus the axis: endpoints (x, x + e_axis).
struct Bond {
  Coord x;
  int axis = 0;
  Coord other() const {
    Coord y = x;
    y[axis] += 1;
    return y;
  }
};

// All undirected bonds with at least one endpoint in the region, each exactly
// once; `interior` = both endpoints inside.
struct BondList {
  std::vector<Bond> bonds;
  std::vector<bool> interior;
};
BondList bonds_touching(const Region& r);

// Exterior vertex boundary: sites at l1-distance one from the region, sorted.
std::vector<Coord> boundary_sites(const Region& r);

// |Lambda symdiff (Lambda + v)| for a box region, closed form.
long symmetric_difference_size(const Region& box, const Coord& v);

// Heights on the sites of a box region.
class HeightField {
 public:
  explicit HeightField(Region box) : box_(std::move(box)), v_(Vec::Zero(box_.size())) {}
  const Region& region() const { return box_; }
  Real& at(const Coord& x) { return v_[box_.index(x)]; }
  Real at(const Coord& x) const { return v_[box_.index(x)]; }
  Vec& values() { return v_; }
  const Vec& values() const { return v_; }

 private:
  Region box_;
  Vec v_;
};

// One value per undirected bond with both endpoints in a box region. Reading a
// directed pair (from,to) flips the sign when the pair runs against the
// canonical orientation.
class BondField {
 public:
  explicit BondField(Region box);
  const Region& region() const { return box_; }
  Real& at(const Coord& x, int axis) { return v_[bond_index(x, axis)]; }
  Real at(const Coord& x, int axis) const { return v_[bond_index(x, axis)]; }
  Real directed(const Coord& from, const Coord& to) const;
  long bond_count() const { return static_cast<long>(v_.size()); }

 private:
  long bond_index(const Coord& x, int axis) const;
  Region box_;
  std::vector<long> axis_offset_;
  Vec v_;
};

BondField gradient(const HeightField& phi);

// Plaquette (curl) check: the signed sum around every unit square inside the
// box must vanish within tol.
void check_plaquettes(const BondField& eta, Real tol = 1e-10);

// Integrate a curl-free bond field back to heights along axis-ordered
// staircase chains from the box's lexicographically smallest corner.
HeightField integrate_heights(const BondField& eta, Real phi0, Real plaquette_tol = 1e-10);

// Partition of Lambda_{[0,N]} into k^d aligned cubes of side n, k = floor((N+1)/n),
// plus at most d disjoint leftover slabs covering the rest.
struct BlockPartition {
  std::vector<Region> cubes;
  std::vector<Region> slabs;
  long covered = 0;          // sites inside cubes
  double dropped_fraction = 0;  // slab fraction of |Lambda_{[0,N]}|
};
BlockPartition block_partition(int d, int N, int n);

}  // namespace qlab
