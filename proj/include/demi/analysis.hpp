#pragma once

// Numerical probes of the qualitative theory: maximum principles, domain
// monotonicity, boundary behaviour, anti-maximum window, isolation, and the
// sandwich between half-eigenvalues and linear eigenvalues.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "demi/eigen.hpp"

namespace demi {

struct TrialRecord {
  int index = 0;
  /// Numeric fields of this trial, keyed by name (ordered for reproducible output).
  std::map<std::string, double> values;
  bool violation = false;
  std::string note;
};

struct ProbeReport {
  std::string name;
  int trials = 0;
  int violations = 0;
  /// Smallest margin seen; a negative value beyond the tolerance is a violation.
  double worst_margin = 0.0;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> details;

  bool passed() const noexcept { return violations == 0; }
  void add(TrialRecord r);
};

/// Resolvent construction I u + mu u = g >= 0 with random g and random
/// nonpositive exterior data; every u must stay <= tolerance.
ProbeReport maximum_principle_probe(const KernelClass& cls, const GridPtr& grid, double mu, int trials,
                                    std::uint64_t seed, double tolerance = 1e-10);

/// Half-eigenvalues on nested domains sharing one lattice (built for the last,
/// largest domain with n nodes). Requires strict decrease along the list.
ProbeReport domain_sweep(const KernelClass& cls, const std::vector<DomainSpec>& domains, int n);

/// Domains (a - (b-a)/(2m), b + (b-a)/(2m)) for each m, largest first, then
/// the limit (a, b) itself; requires |Lambda(D_m) - Lambda(D)| to decrease.
ProbeReport continuity_sweep(const KernelClass& cls, const Interval& limit, std::vector<int> ms, int n);

struct BoundaryFit {
  double exponent = 0.0;
  double c1 = 0.0;
  double C = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// Band of distances used: [band_lo, band_hi].
  double band_lo = 0.0;
  double band_hi = 0.0;
  int nodes = 0;
};

/// Least-squares slope of log psi against log delta over interior nodes with
/// delta in [2h, layer * inradius]. A nonpositive psi is replaced by -psi.
BoundaryFit boundary_fit(const GridFunction& psi, const DomainSpec& domain, FractionalOrder order,
                         double layer = 0.2);

/// Solutions of I u + mu u = f at mu = Lambda^- + eps (must be < 0) and at
/// mu = Lambda^- - eps (must be > 0), eps taken relative to Lambda^-.
ProbeReport anti_maximum_probe(const KernelClass& cls, const GridPtr& grid, const GridFunction& f,
                               const std::vector<double>& relative_eps, std::uint64_t seed, int starts = 6);

/// Default isolation window half-width 0.1 (Lambda^- - Lambda^+ + 1).
double isolation_window(double lambda_plus, double lambda_minus);

/// Pinned semismooth search for nontrivial solutions of I u + mu u = 0.
/// Violation: a solution at mu away from Lambda^+- (bracket 1e-3 Lambda), or a
/// solution at Lambda^+- that is not a multiple of the eigenfunction.
ProbeReport isolation_probe(const KernelClass& cls, const GridPtr& grid, const std::vector<double>& mu_grid,
                            int restarts, std::uint64_t seed);

/// Lambda^+ <= min lambda(A_k) <= max lambda(A_k) <= Lambda^- over sampled kernels.
ProbeReport sandwich_test(const KernelClass& cls, const GridPtr& grid, int count, std::uint64_t seed,
                          double slack = 1e-8);

/// Lambda^+- as the lower ellipticity bound varies (increasing list):
/// Lambda^+ nondecreasing and Lambda^- nonincreasing.
ProbeReport ellipticity_sweep(const KernelClass& cls, const GridPtr& grid, const std::vector<double>& lambdas);

}  // namespace demi
