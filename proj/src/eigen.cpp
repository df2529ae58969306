#include "demi/eigen.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "demi/errors.hpp"

namespace demi {

namespace {

double sup(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

void check_sign(const Eigen::VectorXd& v, Cone cone) {
  const double s = cone == Cone::Positive ? 1.0 : -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(s * v[i] > 0.0)) throw Error(ErrorCode::NonPositiveIterate, "iterate left the cone");
  }
}

}  // namespace

GridFunction boundary_bump(const GridPtr& grid, double s) {
  Eigen::VectorXd v(grid->interior_size());
  for (int i = 0; i < v.size(); ++i) v[i] = std::pow(grid->delta()[static_cast<std::size_t>(i)], s);
  return GridFunction::from_interior(grid, v / sup(v));
}

EigenReport krein_rutman(const BellmanOperator& op, Cone cone, const EigenOptions& opt) {
  const GridPtr& grid = op.grid();
  const double sgn = cone == Cone::Positive ? 1.0 : -1.0;
  Eigen::VectorXd v;
  if (opt.start) {
    v = opt.start->interior_values();
  } else {
    const auto* disc = op.discretization();
    v = sgn * boundary_bump(grid, disc ? disc->kernel_class().order().value() : 0.5).interior_values();
  }
  check_sign(v, cone);
  v /= sup(v);

  DirichletProblem p{op, 0.0, GridFunction(grid), std::nullopt};
  std::optional<Policy> policy;
  EigenReport rep;
  rep.pair.cone = cone;
  for (int it = 1; it <= opt.maxit; ++it) {
    p.f = GridFunction::from_interior(grid, -v);
    PolicyIterationOptions popt;
    popt.tol = 1e-12;
    popt.initial_policy = policy;
    const SolveReport s = solve_bellman_dirichlet(p, popt);
    if (s.status == SolveStatus::NotInResolventSet) {
      throw Error(ErrorCode::NonPositiveIterate, "solution map is singular at mu = 0");
    }
    if (s.status != SolveStatus::Converged && s.residual_inf > 1e-9 * sup(v)) {
      throw Error(ErrorCode::ConvergenceFailure, "inner policy iteration failed");
    }
    policy = s.policy;
    const Eigen::VectorXd u = s.u.interior_values();
    check_sign(u, cone);
    const double gain = sup(u);
    const double value = 1.0 / gain;
    const Eigen::VectorXd next = u / gain;
    rep.ratio_history.push_back(value);
    const double change = sup(next - v);
    v = next;
    rep.iterations = it;
    if (change < opt.tol) {
      const GridFunction psi = GridFunction::from_interior(grid, v);
      const double res = sup(op.apply(psi) + value * v);
      if (res <= opt.tol * value) {
        rep.pair.value = value;
        rep.pair.eigenfunction = psi;
        rep.residual_inf = res;
        return rep;
      }
    }
  }
  throw Error(ErrorCode::MaxIterations, "Krein-Rutman iteration did not converge");
}

EigenReport krein_rutman(const KernelClass& cls, const GridPtr& grid, Cone cone, double tol, int maxit) {
  EigenOptions opt;
  opt.tol = tol;
  opt.maxit = maxit;
  return krein_rutman(BellmanOperator::from_class(cls, grid), cone, opt);
}

std::pair<double, GridFunction> linear_principal_eigen(const NonlocalMatrix& a, double tol) {
  const Eigen::Index n = a.interior.rows();
  if (n == 0) throw Error(ErrorCode::ConvergenceFailure, "empty matrix");
  if (a.invariant_defect() > 1e-10) throw Error(ErrorCode::PreconditionViolated, "matrix is not monotone");
  const Eigen::MatrixXd neg = -a.interior;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(neg);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::ConvergenceFailure, "matrix is singular");
  Eigen::VectorXd v = boundary_bump(a.grid, 0.5).interior_values();
  for (int it = 0; it < 100000; ++it) {
    const Eigen::VectorXd x = lu.solve(v);
    const double gain = sup(x);
    const double value = 1.0 / gain;
    const Eigen::VectorXd next = x / gain;
    const double change = sup(next - v);
    v = next;
    if (change < tol && sup(neg * v - value * v) <= tol * value) {
      if (v.minCoeff() <= 0.0) throw Error(ErrorCode::ConvergenceFailure, "eigenvector is not positive");
      return {value, GridFunction::from_interior(a.grid, v)};
    }
  }
  throw Error(ErrorCode::ConvergenceFailure, "inverse iteration did not converge");
}

Certificate certify(const BellmanOperator& op, const GridFunction& psi, double mu, CertificateSign sign) {
  const Eigen::VectorXd v = psi.interior_values();
  const double s = sign == CertificateSign::Plus ? 1.0 : -1.0;
  if ((s * v.array() < 0.0).any()) throw Error(ErrorCode::SignViolation, "psi has the wrong sign inside the domain");
  const Grid& grid = *op.grid();
  const Eigen::VectorXd lhs = op.apply(psi) + mu * v;
  const double order = op.discretization() ? op.discretization()->kernel_class().order().value() : 0.5;
  Certificate c;
  c.mu = mu;
  c.sign = sign;
  c.margin = (-s * lhs).minCoeff();
  c.positivity_floor = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    c.positivity_floor = std::min(c.positivity_floor, s * v[i] / std::pow(grid.delta()[static_cast<std::size_t>(i)], order));
  }
  c.valid = c.margin >= 0.0 && (s * v.array() > 0.0).any();
  return c;
}

Certificate certify(const KernelClass& cls, const GridFunction& psi, double mu, CertificateSign sign) {
  return certify(BellmanOperator::from_class(cls, psi.grid()), psi, mu, sign);
}

double certified_bound(const BellmanOperator& op, const GridFunction& psi, CertificateSign sign) {
  const Eigen::VectorXd v = psi.interior_values();
  const double s = sign == CertificateSign::Plus ? 1.0 : -1.0;
  if ((s * v.array() < 0.0).any()) throw Error(ErrorCode::SignViolation, "psi has the wrong sign inside the domain");
  const Eigen::VectorXd iv = op.apply(psi);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // Plus: -(I psi)_i - mu psi_i >= 0; Minus: (I psi)_i + mu psi_i >= 0.
    if (s * v[i] > 0.0) {
      best = std::min(best, -iv[i] / v[i]);
    } else if (s * iv[i] > 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
  }
  return best;
}

}  // namespace demi
