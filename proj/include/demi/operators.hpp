#pragma once

// Assembled linear nonlocal operators, pointwise extremal operators M^+-_*,
// M^+-_0, and the Bellman operator I u = sup_L L u with its policies.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "demi/grid.hpp"
#include "demi/kernels.hpp"
#include "demi/quadrature.hpp"

namespace demi {

/// Grid, kernel class and the quadrature weights for that pair.
class Discretization {
 public:
  Discretization(KernelClass cls, GridPtr grid, QuadratureRule rule = QuadratureRule::SecondMoment);

  const KernelClass& kernel_class() const noexcept { return class_; }
  const GridPtr& grid() const noexcept { return grid_; }
  const QuadratureWeights& weights() const noexcept { return weights_; }

  /// Same grid and weights, different class (order, dim and sectors must agree).
  Discretization with_class(KernelClass cls) const;

  /// Per-sector aggregates g(x_i, theta) = sum_{atoms in theta} w * delta u, node-major
  /// (interior_size x sectors).
  Eigen::MatrixXd sector_aggregates(const GridFunction& u) const;

 private:
  KernelClass class_;
  GridPtr grid_;
  QuadratureWeights weights_;
};

/// Discretized linear operator with rows on interior nodes.
///
/// Row i: diagonal + sum(interior off-diagonals) + sum(exterior block) +
/// far_mass = 0, off-diagonals >= 0. far_mass collects weight pointing outside
/// the box, where every grid function vanishes, and the exterior weight when the
/// exterior block is not assembled.
struct NonlocalMatrix {
  GridPtr grid;
  Eigen::MatrixXd interior;
  /// Columns follow exterior_nodes; empty when not assembled.
  Eigen::MatrixXd exterior;
  std::vector<int> exterior_nodes;
  Eigen::VectorXd far_mass;
  std::optional<AngularDensity> kernel;

  /// (A u) at interior nodes, including exterior values when u is free_exterior.
  Eigen::VectorXd apply(const GridFunction& u) const;
  /// Largest violation of the sign and row-sum invariants, relative to the diagonal.
  double invariant_defect() const;
};

/// Box nodes of grid that are outside the domain.
std::vector<int> exterior_nodes(const Grid& grid);

NonlocalMatrix assemble_linear(const AngularDensity& k, const Discretization& disc, bool with_exterior = true);
NonlocalMatrix assemble_linear(const AngularDensity& k, const KernelClass& cls, const GridPtr& grid);

/// u(x_i + h j) + u(x_i - h j) - 2 u(x_i) with the grid-function exterior rule.
double second_difference(const GridFunction& u, int box_index, const std::array<int, 2>& offset);

enum class Extremal { MplusStar, MminusStar, MplusFull, MminusFull };

struct ExtremalResult {
  GridFunction value;
  /// Optimizing angular density values, interior_size x sectors (Star only).
  Eigen::MatrixXd optimal_density;
};

ExtremalResult apply_extremal(const Discretization& disc, const GridFunction& u, Extremal which);
ExtremalResult apply_extremal(const KernelClass& cls, const GridFunction& u, Extremal which);

/// Elementwise max over family of A_k u; policy holds the lowest maximizing index.
std::pair<GridFunction, std::vector<int>> apply_bellman(std::span<const NonlocalMatrix> family,
                                                        const GridFunction& u);

/// Choice of one linear operator per node. slots choices per node, node-major.
/// Finite: member index; Star: per sector 0 = lambda, 1 = Lambda; Full: per atom.
struct Policy {
  int slots = 0;
  std::vector<std::uint16_t> choice;

  bool operator==(const Policy&) const = default;
  std::uint16_t at(int node, int slot) const {
    return choice[static_cast<std::size_t>(node) * static_cast<std::size_t>(slots) + static_cast<std::size_t>(slot)];
  }
};

/// Convex sup-operator I u = sup_L L u over a class or an explicit family.
class BellmanOperator {
 public:
  /// Star -> M^+_*, Full -> M^+_0, Finite -> max over the family.
  explicit BellmanOperator(Discretization disc);
  static BellmanOperator from_class(const KernelClass& cls, GridPtr grid,
                                    QuadratureRule rule = QuadratureRule::SecondMoment);
  static BellmanOperator from_family(std::vector<NonlocalMatrix> family);

  const GridPtr& grid() const noexcept { return grid_; }
  /// Present for class-backed operators.
  const Discretization* discretization() const noexcept { return disc_ ? &*disc_ : nullptr; }

  /// I u at interior nodes.
  Eigen::VectorXd apply(const GridFunction& u) const;
  /// Maximizing policy at u (ties to the lowest index).
  Policy improve(const GridFunction& u) const;
  /// Policy whose every choice is the given slot value (0 for the smallest kernel).
  Policy uniform_policy(std::uint16_t choice) const;
  /// Interior block of the linear operator selected by policy.
  Eigen::MatrixXd interior_matrix(const Policy& policy) const;
  /// Contribution of u's exterior values under policy (zero unless free_exterior).
  Eigen::VectorXd exterior_action(const Policy& policy, const GridFunction& u) const;

 private:
  BellmanOperator() = default;

  GridPtr grid_;
  std::optional<Discretization> disc_;
  std::vector<NonlocalMatrix> family_;
};

}  // namespace demi
