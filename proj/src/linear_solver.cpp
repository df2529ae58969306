#include "demi/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>

#include "demi/errors.hpp"

namespace demi {

namespace {

constexpr double rcond_floor = 1e-14;
constexpr double inner_tol = 1e-12;

Eigen::VectorXd lu_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  if (!(lu.rcond() > rcond_floor)) throw Error(ErrorCode::SingularSystem, "matrix is numerically singular");
  Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite()) throw Error(ErrorCode::SingularSystem, "solve produced non-finite values");
  return x;
}

}  // namespace

LinearSolver::LinearSolver(const Eigen::MatrixXd& m) : m_(m), iterative_(m.rows() > iterative_threshold) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "system matrix is not square");
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b) const {
  if (b.size() != m_.rows()) throw Error(ErrorCode::DimensionMismatch, "right-hand side has the wrong length");
  if (b.isZero(0.0)) {
    if (!iterative_) lu_solve(m_, b);
    return Eigen::VectorXd::Zero(b.size());
  }
  if (iterative_) {
    Eigen::BiCGSTAB<Eigen::MatrixXd, Eigen::DiagonalPreconditioner<double>> it;
    it.setTolerance(inner_tol);
    it.setMaxIterations(4 * static_cast<int>(m_.rows()));
    it.compute(m_);
    Eigen::VectorXd x = it.solve(b);
    if (it.info() == Eigen::Success && x.allFinite() && (m_ * x - b).norm() <= 10 * inner_tol * b.norm()) return x;
  }
  return lu_solve(m_, b);
}

Eigen::VectorXd dense_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) { return lu_solve(m, b); }

}  // namespace demi
