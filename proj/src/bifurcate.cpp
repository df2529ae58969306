#include "demi/bifurcate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "demi/errors.hpp"

namespace demi {

namespace {

double sup(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct Corrector {
  const BellmanOperator& op;
  const NonlinearTerm& term;
  int anchor;

  // [I u + mu u - f(u); u(anchor) - a]
  Eigen::VectorXd residual(const Eigen::VectorXd& x, double a) const {
    const Eigen::Index n = x.size() - 1;
    const Eigen::VectorXd u = x.head(n);
    const double mu = x[n];
    Eigen::VectorXd r(n + 1);
    r.head(n) = op.apply(GridFunction::from_interior(op.grid(), u)) + mu * u;
    for (Eigen::Index i = 0; i < n; ++i) r[i] -= term.value(u[i]);
    r[n] = u[anchor] - a;
    return r;
  }

  bool solve(Eigen::VectorXd& x, double a, double tol, int maxit, double& res_norm) const {
    const Eigen::Index n = x.size() - 1;
    Eigen::VectorXd r = residual(x, a);
    res_norm = sup(r);
    for (int it = 0; it < maxit && res_norm > tol; ++it) {
      const Eigen::VectorXd u = x.head(n);
      const Policy policy = op.improve(GridFunction::from_interior(op.grid(), u));
      Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n + 1, n + 1);
      j.topLeftCorner(n, n) = op.interior_matrix(policy);
      for (Eigen::Index i = 0; i < n; ++i) j(i, i) += x[n] - term.derivative(u[i]);
      j.col(n).head(n) = u;
      j(n, anchor) = 1.0;
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(j);
      if (!(lu.rcond() > 1e-14)) return false;
      const Eigen::VectorXd step = lu.solve(-r);
      bool accepted = false;
      for (double t = 1.0; t >= 0x1p-20; t *= 0.5) {
        const Eigen::VectorXd trial = x + t * step;
        const Eigen::VectorXd tr = residual(trial, a);
        if (sup(tr) < res_norm) {
          x = trial;
          r = tr;
          res_norm = sup(tr);
          accepted = true;
          break;
        }
      }
      if (!accepted) return false;
    }
    return res_norm <= tol;
  }
};

}  // namespace

NonlinearTerm NonlinearTerm::cubic(double c) {
  if (!(c >= 0.0)) throw Error(ErrorCode::InvalidArgument, "term coefficient must be nonnegative");
  return {TermKind::Cubic, c, 3.0};
}

NonlinearTerm NonlinearTerm::power_sat(double c, double p) {
  if (!(c >= 0.0)) throw Error(ErrorCode::InvalidArgument, "term coefficient must be nonnegative");
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "power must exceed 1");
  return {TermKind::PowerSat, c, p};
}

double NonlinearTerm::value(double t) const {
  if (kind == TermKind::Cubic) return -c * t * t * t;
  return -c * t * std::pow(std::abs(t), p - 1.0);
}

double NonlinearTerm::derivative(double t) const {
  if (kind == TermKind::Cubic) return -3.0 * c * t * t;
  return -c * p * std::pow(std::abs(t), p - 1.0);
}

std::vector<double> amplitude_schedule(double a0, int count, double ratio) {
  if (!(a0 > 0.0) || count < 1 || !(ratio > 1.0)) throw Error(ErrorCode::InvalidArgument, "invalid schedule");
  std::vector<double> s;
  for (int i = 0; i < count; ++i) s.push_back(a0 * std::pow(ratio, i));
  return s;
}

Branch continue_branch(const BellmanOperator& op, const EigenPair& eigen, const NonlinearTerm& term,
                       const std::vector<double>& amplitudes, const ContinuationOptions& opt) {
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (!(amplitudes[i] > 0.0) || (i > 0 && !(amplitudes[i] > amplitudes[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "amplitudes must be positive and increasing");
    }
  }
  const Eigen::VectorXd psi = eigen.eigenfunction.interior_values();
  Eigen::Index anchor = 0;
  psi.cwiseAbs().maxCoeff(&anchor);
  const double sign = psi[anchor] > 0.0 ? 1.0 : -1.0;
  const Eigen::Index n = psi.size();

  Branch br;
  br.origin = eigen.cone == Cone::Positive ? BranchOrigin::PlusEigen : BranchOrigin::MinusEigen;
  br.anchor = static_cast<int>(anchor);
  br.eigenvalue = eigen.value;
  br.status = BranchStatus::Completed;
  const Corrector corr{op, term, static_cast<int>(anchor)};

  std::vector<Eigen::VectorXd> accepted;
  std::vector<double> accepted_a;
  for (double mag : amplitudes) {
    const double a = sign * mag;
    Eigen::VectorXd x(n + 1);
    if (accepted.size() < 2) {
      x.head(n) = (a / psi[anchor]) * psi;
      x[n] = accepted.empty() ? eigen.value : accepted.back()[n];
    } else {
      const auto& x1 = accepted[accepted.size() - 1];
      const auto& x0 = accepted[accepted.size() - 2];
      const double a1 = accepted_a[accepted_a.size() - 1];
      const double a0 = accepted_a[accepted_a.size() - 2];
      x = x1 + (a - a1) / (a1 - a0) * (x1 - x0);
    }
    double res = 0.0;
    if (!corr.solve(x, a, opt.tol, opt.maxit, res)) {
      br.status = BranchStatus::CorrectorFailed;
      break;
    }
    const double mu = x[n];
    if (br.points.size() >= 2) {
      const double d0 = br.points[br.points.size() - 1].mu - br.points[br.points.size() - 2].mu;
      const double d1 = mu - br.points.back().mu;
      if (d0 * d1 < 0.0) {
        br.status = BranchStatus::FoldDetected;
        break;
      }
    }
    if (opt.mu_ceiling && mu > *opt.mu_ceiling) {
      br.status = BranchStatus::MaxAmplitude;
      break;
    }
    br.points.push_back({mu, a, GridFunction::from_interior(op.grid(), x.head(n)), res});
    accepted.push_back(x);
    accepted_a.push_back(a);
  }
  return br;
}

Branch continue_branch(const KernelClass& cls, const GridPtr& grid, const NonlinearTerm& term, BranchOrigin origin,
                       const std::vector<double>& amplitudes, const ContinuationOptions& opt) {
  if (cls.variant() != Variant::Star) throw Error(ErrorCode::UnsupportedVariant, "continuation uses the Star class");
  const BellmanOperator op = BellmanOperator::from_class(cls, grid);
  const EigenReport e = krein_rutman(op, origin == BranchOrigin::PlusEigen ? Cone::Positive : Cone::Negative);
  return continue_branch(op, e.pair, term, amplitudes, opt);
}

double detect_bifurcation(const Branch& branch, int k) {
  if (k < 1 || static_cast<int>(branch.points.size()) < k + 1) {
    throw Error(ErrorCode::InsufficientPoints, "branch is too short for the requested extrapolation");
  }
  std::vector<const BranchPoint*> pts;
  for (const auto& p : branch.points) pts.push_back(&p);
  std::sort(pts.begin(), pts.end(),
            [](const BranchPoint* x, const BranchPoint* y) { return std::abs(x->amplitude) < std::abs(y->amplitude); });
  // Interpolating polynomial in a^2, evaluated at 0 (Neville).
  std::vector<double> t(static_cast<std::size_t>(k)), m(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    t[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(i)]->amplitude * pts[static_cast<std::size_t>(i)]->amplitude;
    m[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(i)]->mu;
  }
  for (int level = 1; level < k; ++level) {
    for (int i = 0; i + level < k; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const auto jj = static_cast<std::size_t>(i + level);
      m[ii] = (t[jj] * m[ii] - t[ii] * m[ii + 1]) / (t[jj] - t[ii]);
    }
  }
  return m[0];
}

}  // namespace demi
