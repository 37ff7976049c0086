#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <memory>

#include "qlab/types.hpp"

namespace qlab {

// Shared SPD solve plumbing: sparse LDLT up to direct_limit unknowns, Jacobi-
// preconditioned conjugate gradients beyond. Every solve is residual-checked.
class SpdSolver {
 public:
  static constexpr long kDirectLimit = 30000;
  static constexpr double kCgTol = 1e-12;
  static constexpr int kCgMaxIter = 100000;

  explicit SpdSolver(SpMat A, long direct_limit = kDirectLimit) : A_(std::move(A)) {
    if (A_.rows() != A_.cols()) throw SolverError("SpdSolver: square matrix required");
    if (A_.rows() <= direct_limit) {
      ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>(A_);
      if (ldlt_->info() != Eigen::Success) throw SolverError("sparse LDLT factorization failed");
      if ((ldlt_->vectorD().array() <= 0.0).any())
        throw SolverError("matrix is not positive definite");
    } else {
      cg_ = std::make_unique<Cg>();
      cg_->setTolerance(kCgTol);
      cg_->setMaxIterations(kCgMaxIter);
      cg_->compute(A_);
      if (cg_->info() != Eigen::Success) throw SolverError("CG setup failed");
    }
  }

  long rows() const { return A_.rows(); }
  bool direct() const { return ldlt_ != nullptr; }
  const SpMat& matrix() const { return A_; }

  Vec solve(const Vec& rhs) const {
    Vec x = ldlt_ ? Vec(ldlt_->solve(rhs)) : Vec(cg_->solve(rhs));
    double res = (A_ * x - rhs).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if (!(res <= 1e-9 * scale))
      throw SolverError("solve residual " + std::to_string(res) + " exceeds tolerance");
    return x;
  }

  // log det A via the LDLT pivots; only meaningful on the direct path
  Real logdet() const {
    if (!ldlt_) throw SolverError("logdet requires the direct factorization path");
    return ldlt_->vectorD().array().log().sum();
  }

 private:
  using Cg = Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                                      Eigen::DiagonalPreconditioner<double>>;
  SpMat A_;
  std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt_;
  std::unique_ptr<Cg> cg_;
};

}  // namespace qlab
