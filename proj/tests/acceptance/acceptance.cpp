// Acceptance criteria: one PASS/FAIL line each, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "demi/analysis.hpp"
#include "demi/bifurcate.hpp"
#include "demi/errors.hpp"
#include "oracles.hpp"

using namespace demi;

namespace {

const FractionalOrder kHalf(0.5);
const EllipticityBounds kBounds(1.0, 2.0);
const KernelClass kStar = KernelClass::star(kHalf, 1, kBounds);
const DomainSpec kUnit = DomainSpec::interval(-1.0, 1.0);
constexpr int kN = 513;
constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool ok = false;
  std::string detail;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

struct Shared {
  GridPtr grid = build_grid(kUnit, kN);
  Discretization disc{kStar, grid};
  BellmanOperator op{disc};
  EigenReport plus = krein_rutman(op, Cone::Positive);
  EigenReport minus = krein_rutman(op, Cone::Negative);
};

const Shared& shared() {
  static const Shared s;
  return s;
}

GridFunction random_function(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd v(g->interior_size());
  for (auto& x : v) x = unit(rng);
  return GridFunction::from_interior(g, v);
}

Outcome degenerate_class() {
  const KernelClass one = KernelClass::star(kHalf, 1, EllipticityBounds(1.0, 1.0));
  const GridPtr g = build_grid(kUnit, kN);
  const auto p = krein_rutman(one, g, Cone::Positive);
  const auto m = krein_rutman(one, g, Cone::Negative);
  const auto a = assemble_linear(one.constant_density(1.0), one, g);
  const double lin = linear_principal_eigen(a).first;
  const auto [ref, vec] = oracle::dense_principal(a.interior);
  const double gap = std::max({rel(p.pair.value, lin), rel(m.pair.value, lin), rel(lin, ref)});
  const double fgap = oracle::sup(p.pair.eigenfunction.interior_values() - vec);
  return {gap <= 1e-8 && fgap <= 1e-6, "eigenvalue gap " + num(gap) + ", eigenvector gap " + num(fgap)};
}

Outcome ordering_chain() {
  const auto& s = shared();
  const KernelClass fam = KernelClass::finite(kHalf, 1, kBounds, sample_kernels(kStar, 4, kSeed));
  const BellmanOperator bel(s.disc.with_class(fam));
  std::mt19937_64 rng(kSeed);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const GridFunction u = random_function(s.grid, rng);
    const Eigen::VectorXd m0 = apply_extremal(s.disc, u, Extremal::MminusFull).value.interior_values();
    const Eigen::VectorXd ms = apply_extremal(s.disc, u, Extremal::MminusStar).value.interior_values();
    const Eigen::VectorXd iu = bel.apply(u);
    const Eigen::VectorXd ps = apply_extremal(s.disc, u, Extremal::MplusStar).value.interior_values();
    const Eigen::VectorXd p0 = apply_extremal(s.disc, u, Extremal::MplusFull).value.interior_values();
    worst = std::min({worst, (ms - m0).minCoeff(), (iu - ms).minCoeff(), (ps - iu).minCoeff(), (p0 - ps).minCoeff()});
  }
  return {worst >= -1e-12, "worst slack " + num(worst)};
}

Outcome duality_homogeneity() {
  const auto& s = shared();
  std::mt19937_64 rng(kSeed + 1);
  double defect = 0.0, scale = 0.0;
  for (int t = 0; t < 100; ++t) {
    const GridFunction u = random_function(s.grid, rng);
    const GridFunction neg = GridFunction::from_interior(s.grid, -u.interior_values());
    const GridFunction twice = GridFunction::from_interior(s.grid, 2.0 * u.interior_values());
    for (auto [p, m] : {std::pair{Extremal::MplusStar, Extremal::MminusStar}, {Extremal::MplusFull, Extremal::MminusFull}}) {
      const Eigen::VectorXd pu = apply_extremal(s.disc, u, p).value.interior_values();
      const Eigen::VectorXd mu = apply_extremal(s.disc, u, m).value.interior_values();
      scale = std::max(scale, oracle::sup(pu));
      defect = std::max({defect, oracle::sup(apply_extremal(s.disc, neg, p).value.interior_values() + mu),
                         oracle::sup(apply_extremal(s.disc, twice, p).value.interior_values() - 2.0 * pu)});
    }
  }
  return {defect <= 1e-13 * scale, "defect relative to sup|M u| " + num(defect / scale)};
}

Outcome sandwich() {
  const auto& s = shared();
  const ProbeReport r = sandwich_test(kStar, s.grid, 8, kSeed);
  return {r.passed() && r.worst_margin >= -1e-8 && s.plus.pair.value < s.minus.pair.value,
          "slack " + num(r.worst_margin)};
}

Outcome simplicity() {
  const auto& s = shared();
  std::mt19937_64 rng(kSeed + 2);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  double dv = 0.0, df = 0.0;
  for (const EigenReport* ref : {&s.plus, &s.minus}) {
    const double sign = ref->pair.cone == Cone::Positive ? 1.0 : -1.0;
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXd v(s.grid->interior_size());
      for (auto& x : v) x = sign * unit(rng);
      EigenOptions o;
      o.start = GridFunction::from_interior(s.grid, v);
      const EigenReport e = krein_rutman(s.op, ref->pair.cone, o);
      dv = std::max(dv, rel(e.pair.value, ref->pair.value));
      df = std::max(df, oracle::sup(e.pair.eigenfunction.interior_values() - ref->pair.eigenfunction.interior_values()));
    }
  }
  return {dv <= 1e-8 && df <= 1e-6, "value gap " + num(dv) + ", function gap " + num(df)};
}

Outcome scaling_law() {
  double worst = 0.0;
  for (double s : {0.3, 0.5, 0.7}) {
    const KernelClass c = KernelClass::star(FractionalOrder(s), 1, kBounds);
    const double l1 = krein_rutman(c, build_grid(kUnit, kN), Cone::Positive).pair.value;
    const double l2 = krein_rutman(c, build_grid(DomainSpec::interval(-2.0, 2.0), kN), Cone::Positive).pair.value;
    worst = std::max(worst, rel(l2 / l1, std::pow(2.0, -2.0 * s)));
  }
  return {worst <= 0.02, "worst relative error " + num(worst)};
}

Outcome domain_monotonicity() {
  const ProbeReport nested = domain_sweep(
      kStar, {DomainSpec::interval(-0.5, 0.5), DomainSpec::interval(-1.0, 1.0), DomainSpec::interval(-1.5, 1.5)}, kN);
  // (-1 - 1/m, 1 + 1/m) for m = 4, 8, 16, 32 on one lattice
  const ProbeReport cont = continuity_sweep(kStar, Interval{-1.0, 1.0}, {4, 8, 16, 32}, kN);
  return {nested.passed() && cont.passed(),
          std::to_string(nested.violations) + " nested, " + std::to_string(cont.violations) + " continuity violations"};
}

Outcome maximum_principle() {
  const auto& s = shared();
  const ProbeReport r = maximum_principle_probe(kStar, s.grid, 0.9 * s.plus.pair.value, 100, kSeed, 1e-10);
  return {r.passed() && r.trials == 100, std::to_string(r.violations) + " violations in " + std::to_string(r.trials)};
}

Outcome boundary_behaviour() {
  const GridPtr fine = build_grid(kUnit, 1025);
  bool ok = true;
  std::string detail;
  for (double s : {0.3, 0.5, 0.7}) {
    const EigenReport e = krein_rutman(KernelClass::star(FractionalOrder(s), 1, kBounds), fine, Cone::Positive);
    const BoundaryFit fit = boundary_fit(e.pair.eigenfunction, kUnit, FractionalOrder(s));
    ok = ok && std::abs(fit.exponent - s) <= 0.1 && fit.c1 > 0.0;
    detail += "s=" + num(s) + ": " + num(fit.exponent) + "  ";
  }
  return {ok, detail};
}

Outcome anti_maximum() {
  const auto& s = shared();
  const GridFunction f = GridFunction::sample(s.grid, [](const Point& x) {
    const double t = 1.0 - x[0] * x[0] / 0.25;
    return t > 0.0 ? -t * t : 0.0;
  });
  const ProbeReport r = anti_maximum_probe(kStar, s.grid, f, {0.01}, kSeed);
  return {r.passed(), std::to_string(r.violations) + " violations in " + std::to_string(r.trials) + " legs"};
}

Outcome isolation() {
  const auto& s = shared();
  const double lp = s.plus.pair.value, lm = s.minus.pair.value;
  const ProbeReport mid = isolation_probe(kStar, s.grid, {0.5 * (lp + lm)}, 20, kSeed);
  const ProbeReport at = isolation_probe(kStar, s.grid, {lp, lm}, 4, kSeed);
  int plus = 0, minus = 0;
  for (const auto& d : at.details) {
    if (!d.values.count("distance_plus")) continue;
    if (d.values.at("mu") == lp && d.values.at("distance_plus") <= 1e-6) ++plus;
    if (d.values.at("mu") == lm && d.values.at("distance_minus") <= 1e-6) ++minus;
  }
  return {lp < lm && mid.passed() && at.passed() && plus > 0 && minus > 0,
          std::to_string(mid.violations) + " violations at the midpoint; recovered +psi " + std::to_string(plus) +
              "x, -psi " + std::to_string(minus) + "x"};
}

Outcome bifurcation() {
  const auto& s = shared();
  bool ok = true;
  std::string detail;
  for (const EigenReport* e : {&s.plus, &s.minus}) {
    const Branch b = continue_branch(s.op, e->pair, NonlinearTerm::cubic(1.0), amplitude_schedule());
    const double mu_star = detect_bifurcation(b, 2);
    ok = ok && b.status == BranchStatus::Completed && std::abs(mu_star - e->pair.value) <= 1e-4 * e->pair.value;
    if (e == &s.plus && s.plus.pair.value < s.minus.pair.value)
      for (const auto& p : b.points) ok = ok && p.u.interior_values().minCoeff() > 0.0;
    detail += "relative mu* gap " + num(rel(mu_star, e->pair.value)) + "  ";
  }
  return {ok, detail};
}

Outcome self_convergence() {
  std::vector<double> v;
  for (int n : {129, 257, 513})
    v.push_back(krein_rutman(kStar, build_grid(kUnit, n, Placement::Staggered), Cone::Positive).pair.value);
  const double order = std::log2(std::abs(v[1] - v[0]) / std::abs(v[2] - v[1]));

  const auto start = std::chrono::steady_clock::now();
  const GridPtr ball = build_grid(DomainSpec::ball({0.0, 0.0}, 1.0), 65);
  const KernelClass star2 = KernelClass::star(kHalf, 2, kBounds);
  const auto f = GridFunction::sample(ball, [](const Point&) { return -1.0; });
  const DirichletProblem p = make_problem(star2, ball, 0.0, f);
  const SolveReport r = solve_bellman_dirichlet(p);
  const double res = oracle::sup(residual(p, r.u));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {order >= 1.0 && res <= 1e-8 && secs < 600.0,
          "order " + num(order) + ", 2-d residual " + num(res) + " in " + num(secs) + " s"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
  double limit_seconds;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"degenerate class equality", degenerate_class, 30.0},
      {"ordering chain", ordering_chain, 10.0},
      {"duality and homogeneity", duality_homogeneity, 0.0},
      {"sandwich", sandwich, 120.0},
      {"simplicity", simplicity, 0.0},
      {"scaling law", scaling_law, 0.0},
      {"domain monotonicity and continuity", domain_monotonicity, 0.0},
      {"refined maximum principle", maximum_principle, 0.0},
      {"boundary behaviour", boundary_behaviour, 0.0},
      {"anti-maximum", anti_maximum, 0.0},
      {"isolation", isolation, 0.0},
      {"bifurcation", bifurcation, 180.0},
      {"self-convergence and 2-d smoke", self_convergence, 0.0},
  };
  shared();
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const Error& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0.0 && secs >= c.limit_seconds) {
      o.ok = false;
      o.detail += " (over the time limit)";
    }
    failed += !o.ok;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.ok ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
