#pragma once

// Quadrature of the singular integral
//   L u(x) = 1/2 \int (u(x+y) + u(x-y) - 2u(x)) k(y/|y|) |y|^{-d-2s} dy
// on a uniform lattice. Every term is a nonnegative weight times a second
// difference, so assembled operators are monotone.

#include <array>
#include <vector>

#include "demi/grid.hpp"
#include "demi/kernels.hpp"

namespace demi {

enum class QuadratureRule {
  /// w_j = \int_{cell j} |y|^2 K / |y_j|^2: second differences of quadratics are
  /// integrated exactly on every cell.
  SecondMoment,
  /// w_j = \int_{cell j} K: plain cell averages of the radial density.
  CellAverage,
};

/// One quadrature term: weight * (u(x + h*offset) + u(x - h*offset) - 2u(x)).
/// Far atoms stand for the tail outside the truncation cube, where u = 0, so
/// their contribution is weight * (-2u(x)).
struct Atom {
  std::array<int, 2> offset{0, 0};
  double weight = 0.0;
  int sector = 0;
  bool far = false;
};

/// Weights for the kernel k = 1 split by angular sector. Multiplying each
/// atom by k(sector) gives the operator for any piecewise-constant density.
struct QuadratureWeights {
  FractionalOrder order{0.5};
  int dim = 1;
  double h = 1.0;
  /// Offsets with |j_i| <= reach are explicit.
  int reach = 0;
  int sectors = 1;
  QuadratureRule rule = QuadratureRule::SecondMoment;
  std::vector<Atom> atoms;

  /// Sum of weights of all atoms (explicit + correction + tail) times 2: the
  /// diagonal magnitude for k = 1.
  double total_mass() const;
};

/// Weights for lattice spacing h and truncation half-width R (pre: R covers the box).
QuadratureWeights radial_weights(FractionalOrder order, double h, double R, int dim = 1, int sectors = 1,
                                 QuadratureRule rule = QuadratureRule::SecondMoment);

/// Weights covering every offset between two nodes of grid.
QuadratureWeights grid_weights(FractionalOrder order, const Grid& grid, int sectors,
                               QuadratureRule rule = QuadratureRule::SecondMoment);

/// \int_{cell j} |y|^{-d-2s} dy for the lattice cell of side h centred at h*j (j != 0).
double cell_integral(FractionalOrder order, int dim, double h, const std::array<int, 2>& j);

}  // namespace demi
