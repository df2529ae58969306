#pragma once

// Configuration-driven experiments: every command reads one JSON document and
// writes report.json plus CSV data into an output directory.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "demi/io.hpp"

namespace demi {

/// Right-hand side shapes: constant, bump(center, width) = value (1 - |x-c|^2/w^2)_+^2,
/// indicator(center, radius).
struct ShapeDescriptor {
  std::string type = "bump";
  std::vector<double> center{0.0};
  double width = 0.5;
  double value = -1.0;
};

GridFunction sample_shape(const ShapeDescriptor& f, const GridPtr& grid);

struct ExperimentConfig {
  KernelClass kernel = KernelClass::star(FractionalOrder(0.5), 1, EllipticityBounds(1.0, 2.0));
  DomainSpec domain = DomainSpec::interval(-1.0, 1.0);
  int n = 513;
  Placement placement = Placement::Margin;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int maxit = 100;

  // solve
  double mu = 0.0;
  ShapeDescriptor f;

  // probes
  int trials = 100;
  double mu_fraction = 0.9;
  int count = 8;
  std::vector<double> epsilons{0.01, 0.05, 0.1};
  std::vector<double> mu_grid;  // empty: -1, Lambda^+, midpoint, Lambda^-
  int restarts = 20;
  std::vector<DomainSpec> domains;  // empty: continuity sweep around the domain
  std::vector<int> ms{4, 8, 16, 32};
  std::vector<double> lambdas;  // empty: 5 values from lambda/4 to Lambda
  double layer = 0.2;
  double exponent_tol = 0.1;

  // certify
  std::string psi;
  std::string sign = "plus";

  // bifurcate
  NonlinearTerm term = NonlinearTerm::cubic(1.0);
  double a0 = 1e-3;
  int schedule_count = 10;
  double ratio = 2.0;
  std::vector<std::string> origins{"plus", "minus"};
  int extrapolation_k = 2;
  double bifurcation_tol = 1e-4;
  std::optional<double> mu_ceiling;
};

/// Strict parse: unknown keys and malformed values raise ConfigParseError.
ExperimentConfig parse_config(const std::string& text);
Json to_json(const ExperimentConfig& cfg);

struct VerifyResult {
  std::string property;
  bool passed = false;
  std::string detail;
};

/// Full property-verification matrix on cfg's kernel bounds and order (d = 1).
std::vector<VerifyResult> verify_all(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

enum ExitCode : int { ExitSuccess = 0, ExitAssertion = 1, ExitConfig = 2 };

/// Runs command (solve, eig, certify, sandwich, sweep, probe, antimax,
/// bifurcate, verify-all). target names the probe kind for `probe`.
/// Artifacts are written into out only when the command completes.
int run(const std::string& command, const std::string& target, bool ellipticity, const ExperimentConfig& cfg,
        const std::filesystem::path& out, std::ostream& log);

}  // namespace demi
