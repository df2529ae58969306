#include "demi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "demi/errors.hpp"
#include "demi/linear_solver.hpp"

namespace demi {

namespace {

double sup(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Smooth random function: the solution map at mu = 0 applied to noise
// uniform in [bias - 1, bias + 1], scaled to sup-norm 1.
Eigen::VectorXd smooth_random(const BellmanOperator& op, std::mt19937_64& rng, double bias) {
  const GridPtr& grid = op.grid();
  std::uniform_real_distribution<double> dist(bias - 1.0, bias + 1.0);
  Eigen::VectorXd noise(grid->interior_size());
  for (auto& x : noise) x = dist(rng);
  const SolveReport s = solve_bellman_dirichlet(DirichletProblem{op, 0.0, GridFunction::from_interior(grid, -noise), std::nullopt});
  Eigen::VectorXd u = s.u.interior_values();
  return u / sup(u);
}

std::pair<EigenReport, EigenReport> half_eigenpairs(const BellmanOperator& op) {
  return {krein_rutman(op, Cone::Positive), krein_rutman(op, Cone::Negative)};
}

// Newton on I u + mu u = 0 with the anchor equation replaced by u(anchor) = a.
struct PinnedResult {
  bool converged = false;
  double full_residual = 0.0;
  Eigen::VectorXd u;
};

PinnedResult pinned_search(const BellmanOperator& op, double mu, Eigen::VectorXd u, int anchor, double a,
                           double tol, int maxit) {
  const GridPtr& grid = op.grid();
  const auto pinned_residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& full) {
    full = op.apply(GridFunction::from_interior(grid, x)) + mu * x;
    Eigen::VectorXd r = full;
    r[anchor] = x[anchor] - a;
    return r;
  };
  Eigen::VectorXd full;
  Eigen::VectorXd r = pinned_residual(u, full);
  double norm = sup(r);
  for (int it = 0; it < maxit && norm > tol; ++it) {
    const Policy policy = op.improve(GridFunction::from_interior(grid, u));
    Eigen::MatrixXd j = op.interior_matrix(policy);
    j.diagonal().array() += mu;
    j.row(anchor).setZero();
    j(anchor, anchor) = 1.0;
    Eigen::VectorXd step;
    try {
      step = LinearSolver(j).solve(-r);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularSystem) throw;
      break;
    }
    bool accepted = false;
    for (double t = 1.0; t >= 0x1p-20; t *= 0.5) {
      Eigen::VectorXd trial_full;
      const Eigen::VectorXd trial = u + t * step;
      const Eigen::VectorXd tr = pinned_residual(trial, trial_full);
      if (tr.norm() < r.norm()) {
        u = trial;
        r = tr;
        full = trial_full;
        norm = sup(tr);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return {norm <= tol, sup(full), u};
}

}  // namespace

void ProbeReport::add(TrialRecord r) {
  r.index = static_cast<int>(details.size());
  ++trials;
  if (r.violation) ++violations;
  details.push_back(std::move(r));
}

ProbeReport maximum_principle_probe(const KernelClass& cls, const GridPtr& grid, double mu, int trials,
                                    std::uint64_t seed, double tolerance) {
  const BellmanOperator op = BellmanOperator::from_class(cls, grid);
  const double lambda_plus = krein_rutman(op, Cone::Positive).pair.value;
  if (!(mu < lambda_plus)) throw Error(ErrorCode::PreconditionViolated, "mu must lie below Lambda^+");

  ProbeReport rep;
  rep.name = "max";
  rep.seed = seed;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<int> ext = exterior_nodes(*grid);
  for (int t = 0; t < trials; ++t) {
    // Right-hand side g >= 0: dense, sparse spikes, or zero.
    Eigen::VectorXd g = Eigen::VectorXd::Zero(grid->interior_size());
    const int kind = t % 3;
    for (auto& x : g) {
      const double r = unit(rng);
      if (kind == 0) x = r;
      if (kind == 1 && r < 0.05) x = 10.0 * unit(rng);
    }
    Eigen::VectorXd box = Eigen::VectorXd::Zero(grid->box_size());
    for (int b : ext) box[b] = -unit(rng);

    DirichletProblem p{op, mu, GridFunction::from_interior(grid, g), GridFunction::from_box(grid, box, true)};
    const SolveReport s = solve_bellman_dirichlet(p);
    TrialRecord rec;
    const double umax = s.u.interior_values().maxCoeff();
    rec.values = {{"max_u", umax}, {"residual", s.residual_inf}, {"iterations", s.iterations}};
    rec.violation = umax > tolerance || !s.converged();
    if (!s.converged()) rec.note = "solve did not converge";
    rep.worst_margin = std::min(rep.worst_margin, -umax);
    rep.add(std::move(rec));
  }
  return rep;
}

ProbeReport domain_sweep(const KernelClass& cls, const std::vector<DomainSpec>& domains, int n) {
  if (domains.empty()) throw Error(ErrorCode::InvalidArgument, "no domains to sweep");
  const GridPtr lattice = build_grid(domains.back(), n);
  std::vector<GridPtr> grids;
  for (const auto& d : domains) grids.push_back(build_grid_on(d, *lattice));
  for (std::size_t i = 0; i + 1 < grids.size(); ++i) {
    const std::set<int> outer(grids[i + 1]->interior().begin(), grids[i + 1]->interior().end());
    for (int b : grids[i]->interior()) {
      if (!outer.count(b)) throw Error(ErrorCode::GridIncompatibility, "domains are not nested on the shared lattice");
    }
  }
  ProbeReport rep;
  rep.name = "sweep";
  rep.worst_margin = std::numeric_limits<double>::infinity();
  double prev_plus = 0.0;
  double prev_minus = 0.0;
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const auto [plus, minus] = half_eigenpairs(BellmanOperator::from_class(cls, grids[i]));
    TrialRecord rec;
    rec.values = {{"lambda_plus", plus.pair.value},
                  {"lambda_minus", minus.pair.value},
                  {"interior_nodes", grids[i]->interior_size()}};
    if (i > 0) {
      const bool same = grids[i]->interior_size() == grids[i - 1]->interior_size();
      const double dp = prev_plus - plus.pair.value;
      const double dm = prev_minus - minus.pair.value;
      if (same) {
        rec.violation = std::abs(dp) > 1e-9 * prev_plus || std::abs(dm) > 1e-9 * prev_minus;
        rec.note = "same node set";
      } else {
        rec.violation = !(dp > 0.0 && dm > 0.0);
        rep.worst_margin = std::min({rep.worst_margin, dp, dm});
      }
      rec.values["decrease_plus"] = dp;
      rec.values["decrease_minus"] = dm;
    }
    prev_plus = plus.pair.value;
    prev_minus = minus.pair.value;
    rep.add(std::move(rec));
  }
  if (!std::isfinite(rep.worst_margin)) rep.worst_margin = 0.0;
  return rep;
}

ProbeReport continuity_sweep(const KernelClass& cls, const Interval& limit, std::vector<int> ms, int n) {
  if (ms.empty()) throw Error(ErrorCode::InvalidArgument, "no refinement levels");
  std::sort(ms.begin(), ms.end(), std::greater<>());
  const double half = 0.5 * (limit.b - limit.a);
  std::vector<DomainSpec> domains{DomainSpec(limit)};
  for (int m : ms) domains.push_back(DomainSpec::interval(limit.a - half / m, limit.b + half / m));
  ProbeReport rep = domain_sweep(cls, domains, n);
  rep.name = "continuity";
  const double target_plus = rep.details.front().values.at("lambda_plus");
  const double target_minus = rep.details.front().values.at("lambda_minus");
  // details[1..] follow ms in decreasing m; the gap must shrink as m grows.
  for (std::size_t i = 1; i < rep.details.size(); ++i) {
    auto& v = rep.details[i].values;
    v["m"] = ms[i - 1];
    v["gap_plus"] = std::abs(v.at("lambda_plus") - target_plus);
    v["gap_minus"] = std::abs(v.at("lambda_minus") - target_minus);
  }
  for (std::size_t i = 2; i < rep.details.size(); ++i) {
    auto& cur = rep.details[i];
    const auto& finer = rep.details[i - 1].values;
    const bool shrinking = finer.at("gap_plus") < cur.values.at("gap_plus") &&
                           finer.at("gap_minus") < cur.values.at("gap_minus");
    if (!shrinking && !cur.violation) {
      cur.violation = true;
      ++rep.violations;
      cur.note = "gap does not shrink with m";
    }
  }
  return rep;
}

BoundaryFit boundary_fit(const GridFunction& psi, const DomainSpec& domain, FractionalOrder order, double layer) {
  const Grid& grid = *psi.grid();
  Eigen::VectorXd v = psi.interior_values();
  if (v.size() && v.maxCoeff() <= 0.0) v = -v;
  BoundaryFit fit;
  fit.band_lo = 2.0 * grid.h();
  fit.band_hi = layer * domain.inradius();
  std::vector<double> xs, ys;
  fit.c1 = std::numeric_limits<double>::infinity();
  fit.C = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.interior_size(); ++i) {
    const double d = domain.distance_to_complement(grid.coordinates(grid.interior()[static_cast<std::size_t>(i)]));
    if (d < fit.band_lo || d > fit.band_hi) continue;
    if (!(v[i] > 0.0)) throw Error(ErrorCode::SignViolation, "psi must be positive in the boundary layer");
    xs.push_back(std::log(d));
    ys.push_back(std::log(v[i]));
    const double ratio = v[i] / std::pow(d, order.value());
    fit.c1 = std::min(fit.c1, ratio);
    fit.C = std::max(fit.C, ratio);
  }
  fit.nodes = static_cast<int>(xs.size());
  if (fit.nodes < 5) throw Error(ErrorCode::InsufficientLayerNodes, "fewer than 5 nodes in the boundary layer");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientLayerNodes, "boundary layer has a single distance");
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

ProbeReport anti_maximum_probe(const KernelClass& cls, const GridPtr& grid, const GridFunction& f,
                               const std::vector<double>& relative_eps, std::uint64_t seed, int starts) {
  const Eigen::VectorXd fv = f.interior_values();
  if (fv.size() == 0 || fv.maxCoeff() > 0.0 || fv.isZero(0.0)) {
    throw Error(ErrorCode::PreconditionViolated, "f must be nonpositive and not identically zero");
  }
  const BellmanOperator op = BellmanOperator::from_class(cls, grid);
  const auto [plus, minus] = half_eigenpairs(op);
  const double lm = minus.pair.value;

  ProbeReport rep;
  rep.name = "antimax";
  rep.seed = seed;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  for (double eps : relative_eps) {
    // side +1: Lambda^- + eps; -1: Lambda^- - eps; 0: Lambda^+ - eps (resolvent regime).
    for (int side : {+1, -1, 0}) {
      const double mu = side == 0 ? plus.pair.value * (1.0 - eps) : lm + side * eps * lm;
      DirichletProblem p{op, mu, f, std::nullopt};
      // Starts: zero, +-eigenfunctions scaled to the expected amplitude, random.
      const double gap = side == 0 ? eps * plus.pair.value : eps * lm;
      const double scale = sup(fv) / std::max(gap, 1e-3 * lm);
      std::vector<GridFunction> u0s{GridFunction(grid)};
      for (const EigenReport* e : {&minus, &plus}) {
        u0s.push_back(GridFunction::from_interior(grid, scale * e->pair.eigenfunction.interior_values()));
        u0s.push_back(GridFunction::from_interior(grid, -scale * e->pair.eigenfunction.interior_values()));
      }
      while (static_cast<int>(u0s.size()) < starts) {
        const double bias = u0s.size() % 2 ? 1.0 : -1.0;
        u0s.push_back(GridFunction::from_interior(grid, scale * smooth_random(op, rng, bias)));
      }
      u0s.resize(static_cast<std::size_t>(std::max(starts, 1)));

      std::vector<Eigen::VectorXd> found;
      for (const auto& u0 : u0s) {
        NewtonOptions nopt;
        nopt.tol = 1e-9 * std::max(1.0, scale);
        const SolveReport s = solve_semismooth(p, u0, nopt);
        if (!s.converged()) continue;
        const Eigen::VectorXd u = s.u.interior_values();
        const bool fresh = std::none_of(found.begin(), found.end(), [&](const Eigen::VectorXd& w) {
          return sup(w - u) <= 1e-6 * std::max(1.0, sup(u));
        });
        if (fresh) found.push_back(u);
      }
      TrialRecord rec;
      rec.values = {{"eps", eps}, {"mu", mu}, {"side", side}, {"solutions", static_cast<double>(found.size())}};
      if (found.empty()) rec.note = "NoSolutionFound";
      double margin = std::numeric_limits<double>::infinity();
      for (const auto& u : found) {
        // side +1 expects u < 0, the others u > 0.
        margin = std::min(margin, side > 0 ? -u.maxCoeff() : u.minCoeff());
      }
      if (!found.empty()) {
        rec.values["sign_margin"] = margin;
        rec.violation = !(margin > 0.0);
        rep.worst_margin = std::min(rep.worst_margin, margin);
      }
      rep.add(std::move(rec));
    }
  }
  if (!std::isfinite(rep.worst_margin)) rep.worst_margin = 0.0;
  return rep;
}

double isolation_window(double lambda_plus, double lambda_minus) {
  return 0.1 * (lambda_minus - lambda_plus + 1.0);
}

ProbeReport isolation_probe(const KernelClass& cls, const GridPtr& grid, const std::vector<double>& mu_grid,
                            int restarts, std::uint64_t seed) {
  const BellmanOperator op = BellmanOperator::from_class(cls, grid);
  const auto [plus, minus] = half_eigenpairs(op);
  const double lp = plus.pair.value;
  const double lm = minus.pair.value;
  const Eigen::VectorXd psi_plus = plus.pair.eigenfunction.interior_values();
  const Eigen::VectorXd psi_minus = minus.pair.eigenfunction.interior_values();

  ProbeReport rep;
  rep.name = "isolation";
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  for (double mu : mu_grid) {
    const bool near_plus = std::abs(mu - lp) <= 1e-3 * lp;
    const bool near_minus = std::abs(mu - lm) <= 1e-3 * lm;
    const bool at_plus = std::abs(mu - lp) <= 1e-9 * lp;
    const bool at_minus = std::abs(mu - lm) <= 1e-9 * lm;
    const double tol = 1e-8 * std::max(1.0, std::abs(mu));
    int recovered = 0;
    int nontrivial = 0;
    for (int r = 0; r < restarts; ++r) {
      // Smooth random starts: positive, negative, and of mixed sign.
      const double bias = r % 3 == 0 ? 2.0 : r % 3 == 1 ? -2.0 : 0.0;
      Eigen::VectorXd u0 = smooth_random(op, rng, bias);
      Eigen::Index anchor = 0;
      u0.cwiseAbs().maxCoeff(&anchor);
      u0 /= std::abs(u0[anchor]);
      const double pin = u0[anchor] > 0.0 ? 1.0 : -1.0;
      const PinnedResult res = pinned_search(op, mu, u0, static_cast<int>(anchor), pin, tol, 200);
      const bool found = res.converged && res.full_residual <= tol;
      TrialRecord rec;
      rec.values = {{"mu", mu}, {"restart", r}, {"found", found ? 1.0 : 0.0}, {"residual", res.full_residual}};
      if (found) {
        ++nontrivial;
        const Eigen::VectorXd u = res.u / sup(res.u);
        const double dist_plus = sup(u - psi_plus);
        const double dist_minus = sup(u - psi_minus);
        rec.values["distance_plus"] = dist_plus;
        rec.values["distance_minus"] = dist_minus;
        const bool is_eigen = (near_plus && dist_plus <= 1e-6) || (near_minus && dist_minus <= 1e-6);
        if (is_eigen) ++recovered;
        if (!near_plus && !near_minus) {
          rec.violation = true;
          rec.note = "nontrivial solution away from the half-eigenvalues";
        } else if (!is_eigen) {
          rec.violation = true;
          rec.note = "solution is not a multiple of the half-eigenfunction";
        }
      }
      rep.add(std::move(rec));
    }
    if ((at_plus || at_minus) && recovered == 0) {
      TrialRecord rec;
      rec.values = {{"mu", mu}, {"recovered", 0.0}};
      rec.violation = true;
      rec.note = "eigenfunction not recovered";
      rep.add(std::move(rec));
    }
    (void)nontrivial;
  }
  rep.worst_margin = 0.0;
  return rep;
}

ProbeReport sandwich_test(const KernelClass& cls, const GridPtr& grid, int count, std::uint64_t seed,
                          double slack) {
  const Discretization disc(cls, grid);
  const BellmanOperator op(disc);
  const auto [plus, minus] = half_eigenpairs(op);
  const auto kernels = sample_kernels(cls, count, seed);
  ProbeReport rep;
  rep.name = "sandwich";
  rep.seed = seed;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& k : kernels) {
    const double value = linear_principal_eigen(assemble_linear(k, disc, false)).first;
    lo = std::min(lo, value);
    hi = std::max(hi, value);
    TrialRecord rec;
    rec.values = {{"lambda", value}};
    rep.add(std::move(rec));
  }
  const double lp = plus.pair.value;
  const double lm = minus.pair.value;
  rep.worst_margin = std::min({lo - lp, hi - lo, lm - hi});
  TrialRecord summary;
  summary.values = {{"lambda_plus", lp}, {"min_lambda", lo}, {"max_lambda", hi}, {"lambda_minus", lm},
                    {"slack", rep.worst_margin}};
  summary.violation = rep.worst_margin < -slack;
  summary.note = "summary";
  rep.details.push_back(summary);
  if (summary.violation) ++rep.violations;
  return rep;
}

ProbeReport ellipticity_sweep(const KernelClass& cls, const GridPtr& grid, const std::vector<double>& lambdas) {
  ProbeReport rep;
  rep.name = "ellipticity";
  rep.worst_margin = std::numeric_limits<double>::infinity();
  double prev_plus = 0.0;
  double prev_minus = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const auto [plus, minus] = half_eigenpairs(BellmanOperator::from_class(cls.with_lower_bound(lambdas[i]), grid));
    TrialRecord rec;
    rec.values = {{"lambda", lambdas[i]}, {"lambda_plus", plus.pair.value}, {"lambda_minus", minus.pair.value}};
    if (i > 0) {
      if (!(lambdas[i] > lambdas[i - 1])) throw Error(ErrorCode::InvalidArgument, "lower bounds must increase");
      const double up = plus.pair.value - prev_plus;
      const double down = prev_minus - minus.pair.value;
      rec.values["increase_plus"] = up;
      rec.values["decrease_minus"] = down;
      const double tol = 1e-8 * std::max(prev_plus, prev_minus);
      rec.violation = up < -tol || down < -tol;
      rep.worst_margin = std::min({rep.worst_margin, up, down});
    }
    prev_plus = plus.pair.value;
    prev_minus = minus.pair.value;
    rep.add(std::move(rec));
  }
  if (!std::isfinite(rep.worst_margin)) rep.worst_margin = 0.0;
  return rep;
}

}  // namespace demi
