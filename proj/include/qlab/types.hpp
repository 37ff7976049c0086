#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <stdexcept>

namespace qlab {

using Real = double;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;
using Coord = Eigen::VectorXi;  // lattice site, d entries

struct QlabError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutOfSupport : QlabError {
  using QlabError::QlabError;
};
struct PlaquetteViolation : QlabError {
  using QlabError::QlabError;
};
struct SolverError : QlabError {
  using QlabError::QlabError;
};
struct ConfigError : QlabError {
  using QlabError::QlabError;
};

inline Coord coord(std::initializer_list<int> xs) {
  Coord c(static_cast<int>(xs.size()));
  int i = 0;
  for (int v : xs) c[i++] = v;
  return c;
}

inline Coord unit(int d, int axis) {
  Coord e = Coord::Zero(d);
  e[axis] = 1;
  return e;
}

}  // namespace qlab
