#include "demi/solve.hpp"

#include <cmath>

#include "demi/errors.hpp"
#include "demi/linear_solver.hpp"

namespace demi {

namespace {

constexpr double min_step = 0x1p-20;

GridFunction with_exterior(const DirichletProblem& p, const Eigen::VectorXd& interior) {
  if (!p.exterior) return GridFunction::from_interior(p.op.grid(), interior);
  const Grid& grid = *p.op.grid();
  Eigen::VectorXd box = p.exterior->box_values();
  for (int i = 0; i < grid.interior_size(); ++i) box[grid.interior()[static_cast<std::size_t>(i)]] = interior[i];
  return GridFunction::from_box(p.op.grid(), std::move(box), true);
}

void check_problem(const DirichletProblem& p) {
  const GridPtr& g = p.op.grid();
  if (p.f.grid() == nullptr || p.f.grid()->interior_size() != g->interior_size() ||
      p.f.grid()->box_size() != g->box_size()) {
    throw Error(ErrorCode::GridMismatch, "right-hand side lives on another grid");
  }
  if (!p.f.interior_values().allFinite() || !std::isfinite(p.mu)) {
    throw Error(ErrorCode::InvalidArgument, "problem data must be finite");
  }
  if (p.exterior && p.exterior->grid()->box_size() != g->box_size()) {
    throw Error(ErrorCode::GridMismatch, "exterior data lives on another grid");
  }
}

Eigen::MatrixXd shifted_matrix(const BellmanOperator& op, const Policy& policy, double mu) {
  Eigen::MatrixXd m = op.interior_matrix(policy);
  m.diagonal().array() += mu;
  return m;
}

}  // namespace

DirichletProblem make_problem(const KernelClass& cls, const GridPtr& grid, double mu, GridFunction f) {
  return DirichletProblem{BellmanOperator::from_class(cls, grid), mu, std::move(f), std::nullopt};
}

Eigen::VectorXd residual(const DirichletProblem& p, const GridFunction& u) {
  const Eigen::VectorXd ui = u.interior_values();
  const GridFunction full = p.exterior ? with_exterior(p, ui) : u;
  return p.op.apply(full) + p.mu * ui - p.f.interior_values();
}

SolveReport solve_linear_dirichlet(const NonlocalMatrix& a, double mu, const GridFunction& f) {
  if (f.grid()->interior_size() != a.interior.rows()) {
    throw Error(ErrorCode::GridMismatch, "right-hand side does not match the matrix");
  }
  Eigen::MatrixXd m = a.interior;
  m.diagonal().array() += mu;
  const Eigen::VectorXd rhs = f.interior_values();
  const Eigen::VectorXd x = LinearSolver(m).solve(rhs);
  SolveReport r;
  r.u = GridFunction::from_interior(a.grid, x);
  r.policy = Policy{1, std::vector<std::uint16_t>(static_cast<std::size_t>(x.size()), 0)};
  r.iterations = 1;
  r.residual_inf = rhs.size() ? (m * x - rhs).cwiseAbs().maxCoeff() : 0.0;
  r.residual_history = {r.residual_inf};
  return r;
}

SolveReport solve_bellman_dirichlet(const DirichletProblem& p, const PolicyIterationOptions& opt) {
  check_problem(p);
  const GridPtr& grid = p.op.grid();
  const Eigen::VectorXd f = p.f.interior_values();
  SolveReport r;
  r.u = GridFunction(grid);
  Policy policy = opt.initial_policy ? *opt.initial_policy : p.op.improve(with_exterior(p, r.u.interior_values()));
  r.status = SolveStatus::MaxIterations;
  for (int it = 1; it <= opt.maxit; ++it) {
    const Eigen::MatrixXd m = shifted_matrix(p.op, policy, p.mu);
    Eigen::VectorXd rhs = f;
    if (p.exterior) rhs -= p.op.exterior_action(policy, *p.exterior);
    Eigen::VectorXd x;
    try {
      x = LinearSolver(m).solve(rhs);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularSystem) throw;
      r.status = SolveStatus::NotInResolventSet;
      r.iterations = it;
      r.policy = policy;
      return r;
    }
    const GridFunction u = with_exterior(p, x);
    const Eigen::VectorXd res = p.op.apply(u) + p.mu * x - f;
    r.residual_inf = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
    r.residual_history.push_back(r.residual_inf);
    r.u = GridFunction::from_interior(grid, x);
    r.iterations = it;
    r.policy = policy;
    Policy next = p.op.improve(u);
    const bool stable = next == policy;
    if (r.residual_inf <= opt.tol) {
      r.policy = std::move(next);
      r.status = SolveStatus::Converged;
      return r;
    }
    if (stable) return r;  // stalled above tol: rounding floor of the linear solve
    policy = std::move(next);
  }
  return r;
}

SolveReport solve_semismooth(const DirichletProblem& p, const GridFunction& u0, const NewtonOptions& opt) {
  check_problem(p);
  if (!u0.interior_values().allFinite()) throw Error(ErrorCode::InvalidArgument, "initial guess must be finite");
  if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw Error(ErrorCode::InvalidArgument, "damping must be in (0, 1]");
  const GridPtr& grid = p.op.grid();
  SolveReport r;
  Eigen::VectorXd x = u0.interior_values();
  Eigen::VectorXd res = residual(p, u0);
  double norm = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
  r.residual_history.push_back(norm);
  r.status = SolveStatus::MaxIterations;
  for (int it = 0;; ++it) {
    r.iterations = it;
    if (norm <= opt.tol) {
      r.status = SolveStatus::Converged;
      break;
    }
    if (it == opt.maxit) break;
    const Policy policy = p.op.improve(with_exterior(p, x));
    Eigen::VectorXd step;
    try {
      step = LinearSolver(shifted_matrix(p.op, policy, p.mu)).solve(-res);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularSystem) throw;
      r.status = SolveStatus::SingularSystem;
      break;
    }
    bool accepted = false;
    for (double t = opt.damping; t >= min_step; t *= 0.5) {
      const Eigen::VectorXd trial = x + t * step;
      const Eigen::VectorXd trial_res = residual(p, GridFunction::from_interior(grid, trial));
      const double trial_norm = trial_res.cwiseAbs().maxCoeff();
      if (trial_norm < norm) {
        x = trial;
        res = trial_res;
        norm = trial_norm;
        accepted = true;
        break;
      }
    }
    r.residual_history.push_back(norm);
    if (!accepted) break;
  }
  r.u = GridFunction::from_interior(grid, x);
  r.policy = p.op.improve(with_exterior(p, x));
  r.residual_inf = norm;
  return r;
}

}  // namespace demi
