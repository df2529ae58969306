#pragma once

#include <Eigen/Core>

namespace demi {

/// Solves M x = b for the dense nonlocal systems produced by a policy.
/// Small systems use partial-pivot LU; large ones use diagonally
/// preconditioned BiCGSTAB and fall back to LU when it stalls.
class LinearSolver {
 public:
  static constexpr int iterative_threshold = 1500;

  /// Throws SingularSystem when the matrix is numerically singular.
  explicit LinearSolver(const Eigen::MatrixXd& m);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  const Eigen::MatrixXd& m_;
  bool iterative_;
};

/// One-shot LU solve; throws SingularSystem.
Eigen::VectorXd dense_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b);

}  // namespace demi
