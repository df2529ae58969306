#pragma once

// Discrete Dirichlet problem I u + mu u = f in D, u = 0 outside D.

#include <optional>
#include <vector>

#include "demi/operators.hpp"

namespace demi {

enum class SolveStatus { Converged, MaxIterations, SingularSystem, NotInResolventSet };

struct SolveReport {
  GridFunction u;
  Policy policy;
  int iterations = 0;
  double residual_inf = 0.0;
  SolveStatus status = SolveStatus::Converged;
  std::vector<double> residual_history;

  bool converged() const noexcept { return status == SolveStatus::Converged; }
};

struct DirichletProblem {
  BellmanOperator op;
  double mu = 0.0;
  GridFunction f;
  /// Exterior data on box nodes outside D (free_exterior function); zero when absent.
  std::optional<GridFunction> exterior;
};

DirichletProblem make_problem(const KernelClass& cls, const GridPtr& grid, double mu, GridFunction f);

/// I u + mu u - f at interior nodes, with u's exterior values taken from the problem.
Eigen::VectorXd residual(const DirichletProblem& p, const GridFunction& u);

/// Solution of (A + mu) u = f; throws SingularSystem.
SolveReport solve_linear_dirichlet(const NonlocalMatrix& a, double mu, const GridFunction& f);

struct PolicyIterationOptions {
  double tol = 1e-10;
  int maxit = 100;
  std::optional<Policy> initial_policy;
};

/// Howard policy iteration.
SolveReport solve_bellman_dirichlet(const DirichletProblem& p, const PolicyIterationOptions& opt = {});

struct NewtonOptions {
  double tol = 1e-10;
  int maxit = 200;
  /// Initial step length of each backtracking line search.
  double damping = 1.0;
};

/// Damped semismooth Newton from u0.
SolveReport solve_semismooth(const DirichletProblem& p, const GridFunction& u0, const NewtonOptions& opt = {});

}  // namespace demi
