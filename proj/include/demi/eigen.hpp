#pragma once

// Principal half-eigenvalues by inverse power iteration on the solution map
// T v = u, I u = -v, and sub/supersolution certificates.

#include <optional>
#include <vector>

#include "demi/solve.hpp"

namespace demi {

enum class Cone { Positive, Negative };

struct EigenPair {
  double value = 0.0;
  GridFunction eigenfunction;
  Cone cone = Cone::Positive;
};

struct EigenReport {
  EigenPair pair;
  int iterations = 0;
  /// sup |I psi + value * psi|.
  double residual_inf = 0.0;
  std::vector<double> ratio_history;
};

struct EigenOptions {
  double tol = 1e-10;
  int maxit = 1000;
  /// Starting vector; its sign must match the cone. Default is a delta^s bump.
  std::optional<GridFunction> start;
};

EigenReport krein_rutman(const BellmanOperator& op, Cone cone, const EigenOptions& opt = {});
EigenReport krein_rutman(const KernelClass& cls, const GridPtr& grid, Cone cone, double tol = 1e-10,
                         int maxit = 1000);

/// Smallest eigenvalue of -A with its positive eigenvector (sup-norm 1).
std::pair<double, GridFunction> linear_principal_eigen(const NonlocalMatrix& a, double tol = 1e-12);

/// delta(x)^s sampled on interior nodes.
GridFunction boundary_bump(const GridPtr& grid, double s);

enum class CertificateSign { Plus, Minus };

struct Certificate {
  double mu = 0.0;
  CertificateSign sign = CertificateSign::Plus;
  /// Plus: min of -(I psi + mu psi); Minus: min of (I psi + mu psi).
  double margin = 0.0;
  /// Plus: min of psi / delta^s; Minus: min of -psi / delta^s.
  double positivity_floor = 0.0;
  bool valid = false;
};

/// Discrete-level evidence mu <= Lambda^+ (Plus) or mu <= Lambda^- (Minus).
Certificate certify(const KernelClass& cls, const GridFunction& psi, double mu, CertificateSign sign);
Certificate certify(const BellmanOperator& op, const GridFunction& psi, double mu, CertificateSign sign);

/// Largest mu for which certify(psi, mu, sign) is valid.
double certified_bound(const BellmanOperator& op, const GridFunction& psi, CertificateSign sign);

}  // namespace demi
