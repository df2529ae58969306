#pragma once

// Admissible 2s-stable kernels k(y/|y|) |y|^{-d-2s} and the ellipticity
// classes they are drawn from.

#include <cstdint>
#include <span>
#include <vector>

namespace demi {

/// Fractional order s, strictly inside (0, 1).
class FractionalOrder {
 public:
  explicit FractionalOrder(double s);
  double value() const noexcept { return s_; }

 private:
  double s_;
};

/// Bounds 0 < lambda <= Lambda on the angular part of every kernel.
struct EllipticityBounds {
  double lambda;
  double Lambda;

  EllipticityBounds(double lo, double hi);
  bool admits(double v) const noexcept { return v >= lambda && v <= Lambda; }
};

/// Piecewise-constant angular density on the half sphere.
///
/// In d = 1 there is a single direction (+1). In d = 2 the value with index k
/// belongs to the direction at angle k*pi/m, m = size(), and covers the sector
/// of directions nearest to it. The value at -theta is the value at theta.
class AngularDensity {
 public:
  int dim() const noexcept { return dim_; }
  int sectors() const noexcept { return static_cast<int>(values_.size()); }
  std::span<const double> values() const noexcept { return values_; }
  double value(int sector) const { return values_.at(static_cast<std::size_t>(sector)); }

  /// Index of the stored direction nearest to +-y (y != 0).
  int sector_of(std::span<const double> y) const;

  /// Unit vector of stored direction k.
  std::vector<double> direction(int sector) const;

  bool operator==(const AngularDensity&) const = default;

 private:
  friend AngularDensity make_angular_density(std::span<const double>, const EllipticityBounds&, int);
  AngularDensity(int dim, std::vector<double> values) : dim_(dim), values_(std::move(values)) {}

  int dim_;
  std::vector<double> values_;
};

AngularDensity make_angular_density(std::span<const double> values, const EllipticityBounds& bounds,
                                    int dim);

/// Sector index for a direction in dimension dim with m sectors.
int nearest_sector(std::span<const double> y, int dim, int sectors);

/// k(y/|y|) |y|^{-d-2s}; throws ZeroArgument at y = 0.
double kernel_density_at(const AngularDensity& k, FractionalOrder order, std::span<const double> y);

enum class Variant { Finite, Star, Full };

/// Ellipticity class: a finite family, the whole angular class L_*, or the
/// class L_0 of y-dependent kernels.
class KernelClass {
 public:
  static KernelClass finite(FractionalOrder order, int dim, EllipticityBounds bounds,
                            std::vector<AngularDensity> family);
  static KernelClass star(FractionalOrder order, int dim, EllipticityBounds bounds, int sectors = 0);
  static KernelClass full(FractionalOrder order, int dim, EllipticityBounds bounds, int sectors = 0);

  FractionalOrder order() const noexcept { return order_; }
  int dim() const noexcept { return dim_; }
  const EllipticityBounds& bounds() const noexcept { return bounds_; }
  Variant variant() const noexcept { return variant_; }
  const std::vector<AngularDensity>& family() const noexcept { return family_; }
  int sectors() const noexcept { return sectors_; }

  /// Constant density k = value with this class's sector layout.
  AngularDensity constant_density(double value) const;

  /// Same class with a different lower ellipticity bound (family members must stay admissible).
  KernelClass with_lower_bound(double lambda) const;

  static constexpr int default_sectors_2d = 16;

 private:
  KernelClass(FractionalOrder order, int dim, EllipticityBounds bounds, Variant variant,
              std::vector<AngularDensity> family, int sectors)
      : order_(order), dim_(dim), bounds_(bounds), variant_(variant), family_(std::move(family)),
        sectors_(sectors) {}

  FractionalOrder order_;
  int dim_;
  EllipticityBounds bounds_;
  Variant variant_;
  std::vector<AngularDensity> family_;
  int sectors_;
};

/// Deterministic draw of admissible densities from a Star or Finite class.
std::vector<AngularDensity> sample_kernels(const KernelClass& cls, int count, std::uint64_t seed);

}  // namespace demi
