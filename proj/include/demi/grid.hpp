#pragma once

// Domains, uniform lattices over a bounding box, and grid functions with the
// exterior Dirichlet rule u = 0 outside the domain.

#include <array>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace demi {

struct Interval {
  double a;
  double b;
};

struct UnionOfIntervals {
  std::vector<Interval> parts;
};

struct Ball {
  std::vector<double> center;
  double radius;
};

using Point = std::array<double, 2>;

/// Bounded open domain in d = 1 or 2.
class DomainSpec {
 public:
  using Shape = std::variant<Interval, UnionOfIntervals, Ball>;

  explicit DomainSpec(Shape shape);

  static DomainSpec interval(double a, double b) { return DomainSpec(Interval{a, b}); }
  static DomainSpec ball(std::vector<double> center, double radius) {
    return DomainSpec(Ball{std::move(center), radius});
  }

  int dim() const noexcept { return dim_; }
  const Shape& shape() const noexcept { return shape_; }

  bool contains(const Point& x) const;
  /// dist(x, complement) for x inside, 0 outside.
  double distance_to_complement(const Point& x) const;
  /// Largest value of distance_to_complement over the domain.
  double inradius() const;
  /// Smallest width of any connected component.
  double thinnest_width() const;
  /// Smallest closed distance between components (infinity for a single component).
  double smallest_gap() const;
  Point box_lo() const;
  Point box_hi() const;

 private:
  Shape shape_;
  int dim_ = 1;
};

enum class Placement {
  /// Box = bounding box padded by 1/8 of its extent on every side.
  Margin,
  /// Box chosen so the outer bounding box faces fall midway between nodes.
  Staggered,
};

/// Uniform lattice of n nodes per axis over a box containing the domain closure.
class Grid {
 public:
  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  const Point& origin() const noexcept { return origin_; }
  const DomainSpec& domain() const noexcept { return domain_; }

  int box_size() const noexcept { return static_cast<int>(slot_.size()); }
  int interior_size() const noexcept { return static_cast<int>(interior_.size()); }
  /// Box indices of interior nodes, lexicographic (x fastest).
  std::span<const int> interior() const noexcept { return interior_; }
  /// Interior index of a box node, or -1.
  int slot(int box_index) const { return slot_[static_cast<std::size_t>(box_index)]; }
  /// distance_to_complement at each interior node.
  std::span<const double> delta() const noexcept { return delta_; }

  Point coordinates(int box_index) const;
  std::array<int, 2> multi_index(int box_index) const;
  /// Box index of multi index, or -1 when outside the box.
  int box_index(int ix, int iy = 0) const;
  /// Box index of node + offset, or -1 when it leaves the box.
  int shifted(int box_index, const std::array<int, 2>& offset) const;

  double box_extent() const { return h_ * (n_ - 1); }

 private:
  friend std::shared_ptr<const Grid> make_grid(const DomainSpec&, int, double, const Point&);
  Grid(DomainSpec domain) : domain_(std::move(domain)) {}

  DomainSpec domain_;
  int dim_ = 1;
  int n_ = 0;
  double h_ = 0.0;
  Point origin_{0.0, 0.0};
  std::vector<int> interior_;
  std::vector<int> slot_;
  std::vector<double> delta_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Lattice with n nodes per axis, spacing h, lower corner origin; interior mask from domain.
GridPtr make_grid(const DomainSpec& domain, int n, double h, const Point& origin);

GridPtr build_grid(const DomainSpec& domain, int n, Placement placement = Placement::Margin);

/// Same lattice as `lattice`, interior mask taken from `domain`.
GridPtr build_grid_on(const DomainSpec& domain, const Grid& lattice);

/// Values on every box node. Nodes outside the domain hold 0 unless the function
/// is flagged free_exterior; everything outside the box is 0.
class GridFunction {
 public:
  GridFunction() = default;
  /// Zero function.
  explicit GridFunction(GridPtr grid);

  static GridFunction from_interior(GridPtr grid, const Eigen::VectorXd& interior_values);
  static GridFunction from_box(GridPtr grid, Eigen::VectorXd box_values, bool free_exterior);
  template <class F>
  static GridFunction sample(GridPtr grid, F&& f) {
    Eigen::VectorXd v(grid->interior_size());
    for (int i = 0; i < grid->interior_size(); ++i) v[i] = f(grid->coordinates(grid->interior()[i]));
    return from_interior(std::move(grid), v);
  }

  const GridPtr& grid() const noexcept { return grid_; }
  bool free_exterior() const noexcept { return free_exterior_; }
  const Eigen::VectorXd& box_values() const noexcept { return values_; }
  double at(int box_index) const { return box_index < 0 ? 0.0 : values_[box_index]; }
  Eigen::VectorXd interior_values() const;
  /// Values on box nodes outside the domain (zero function unless free_exterior).
  GridFunction exterior_part() const;

  double sup_norm() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
  bool free_exterior_ = false;
};

}  // namespace demi
