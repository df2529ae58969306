#pragma once

// Continuation of nontrivial solutions of M^+_* u + mu u = f(mu, u) from the
// trivial branch at (Lambda^+-, 0).

#include <optional>
#include <vector>

#include "demi/eigen.hpp"

namespace demi {

enum class TermKind { Cubic, PowerSat };

/// f(mu, t) = -c t^3 (Cubic) or -c t |t|^(p-1) (PowerSat, p > 1).
struct NonlinearTerm {
  TermKind kind = TermKind::Cubic;
  double c = 1.0;
  double p = 3.0;

  static NonlinearTerm cubic(double c);
  static NonlinearTerm power_sat(double c, double p);

  double value(double t) const;
  double derivative(double t) const;
};

enum class BranchOrigin { PlusEigen, MinusEigen };
enum class BranchStatus { Completed, FoldDetected, MaxAmplitude, CorrectorFailed };

struct BranchPoint {
  double mu = 0.0;
  /// Signed value of u at the anchor node.
  double amplitude = 0.0;
  GridFunction u;
  double residual = 0.0;
};

struct Branch {
  BranchOrigin origin = BranchOrigin::PlusEigen;
  std::vector<BranchPoint> points;
  BranchStatus status = BranchStatus::Completed;
  /// Interior index of the pinned node.
  int anchor = 0;
  /// Half-eigenvalue the branch starts from.
  double eigenvalue = 0.0;
};

struct ContinuationOptions {
  double tol = 1e-10;
  int maxit = 50;
  /// Stop once mu exceeds this value (stand-in for the next spectral value).
  std::optional<double> mu_ceiling;
};

/// Geometric schedule a0, 2 a0, 4 a0, ... (count entries).
std::vector<double> amplitude_schedule(double a0 = 1e-3, int count = 10, double ratio = 2.0);

/// Amplitude-indexed continuation with the pin u(anchor) = a; amplitudes are
/// positive magnitudes, signed by the eigenfunction at the anchor.
Branch continue_branch(const BellmanOperator& op, const EigenPair& eigen, const NonlinearTerm& term,
                       const std::vector<double>& amplitudes, const ContinuationOptions& opt = {});
Branch continue_branch(const KernelClass& cls, const GridPtr& grid, const NonlinearTerm& term, BranchOrigin origin,
                       const std::vector<double>& amplitudes, const ContinuationOptions& opt = {});

/// mu at a = 0 by polynomial extrapolation in a^2 through the k points of
/// smallest amplitude. Needs at least k + 1 points.
double detect_bifurcation(const Branch& branch, int k);

}  // namespace demi
