#include "demi/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "demi/errors.hpp"

namespace demi {

FractionalOrder::FractionalOrder(double s) : s_(s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "fractional order must lie in (0,1), got " + std::to_string(s));
  }
}

EllipticityBounds::EllipticityBounds(double lo, double hi) : lambda(lo), Lambda(hi) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::InvalidArgument, "ellipticity bounds need 0 < lambda <= Lambda");
  }
}

int nearest_sector(std::span<const double> y, int dim, int sectors) {
  if (dim == 1 || sectors == 1) return 0;
  double phi = std::atan2(y[1], y[0]);
  if (phi < 0.0) phi += std::numbers::pi;
  const auto k = static_cast<long>(std::lround(phi * sectors / std::numbers::pi));
  return static_cast<int>(k % sectors);
}

int AngularDensity::sector_of(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != dim_) {
    throw Error(ErrorCode::DimensionMismatch, "direction has wrong dimension");
  }
  return nearest_sector(y, dim_, sectors());
}

std::vector<double> AngularDensity::direction(int sector) const {
  if (dim_ == 1) return {1.0};
  const double theta = sector * std::numbers::pi / sectors();
  return {std::cos(theta), std::sin(theta)};
}

AngularDensity make_angular_density(std::span<const double> values, const EllipticityBounds& bounds,
                                    int dim) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::DimensionMismatch, "dimension must be 1 or 2");
  if (values.empty()) throw Error(ErrorCode::EmptyDensity, "angular density needs at least one value");
  for (double v : values) {
    if (!bounds.admits(v)) {
      throw Error(ErrorCode::ValueOutOfBounds,
                  "density value " + std::to_string(v) + " outside [" + std::to_string(bounds.lambda) +
                      ", " + std::to_string(bounds.Lambda) + "]");
    }
  }
  if (dim == 1 && values.size() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "a 1-d density has exactly one direction");
  }
  return AngularDensity(dim, std::vector<double>(values.begin(), values.end()));
}

double kernel_density_at(const AngularDensity& k, FractionalOrder order, std::span<const double> y) {
  double r2 = 0.0;
  for (double c : y) r2 += c * c;
  if (r2 == 0.0) throw Error(ErrorCode::ZeroArgument, "kernel density is singular at y = 0");
  const double r = std::sqrt(r2);
  return k.value(k.sector_of(y)) * std::pow(r, -(k.dim() + 2.0 * order.value()));
}

namespace {

int resolve_sectors(int dim, int sectors) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::DimensionMismatch, "dimension must be 1 or 2");
  if (dim == 1) return 1;
  if (sectors == 0) return KernelClass::default_sectors_2d;
  if (sectors < 1) throw Error(ErrorCode::InvalidArgument, "sector count must be positive");
  return sectors;
}

}  // namespace

KernelClass KernelClass::finite(FractionalOrder order, int dim, EllipticityBounds bounds,
                                std::vector<AngularDensity> family) {
  if (family.empty()) throw Error(ErrorCode::EmptyDensity, "finite family must be nonempty");
  const int m = family.front().sectors();
  for (const auto& k : family) {
    if (k.dim() != dim || k.sectors() != m) {
      throw Error(ErrorCode::DimensionMismatch, "family members must share dimension and sector layout");
    }
    for (double v : k.values()) {
      if (!bounds.admits(v)) throw Error(ErrorCode::ValueOutOfBounds, "family member violates the class bounds");
    }
  }
  resolve_sectors(dim, m);
  return KernelClass(order, dim, bounds, Variant::Finite, std::move(family), m);
}

KernelClass KernelClass::star(FractionalOrder order, int dim, EllipticityBounds bounds, int sectors) {
  return KernelClass(order, dim, bounds, Variant::Star, {}, resolve_sectors(dim, sectors));
}

KernelClass KernelClass::full(FractionalOrder order, int dim, EllipticityBounds bounds, int sectors) {
  return KernelClass(order, dim, bounds, Variant::Full, {}, resolve_sectors(dim, sectors));
}

AngularDensity KernelClass::constant_density(double value) const {
  const std::vector<double> values(static_cast<std::size_t>(sectors_), value);
  return make_angular_density(values, bounds_, dim_);
}

KernelClass KernelClass::with_lower_bound(double lambda) const {
  KernelClass copy = *this;
  copy.bounds_ = EllipticityBounds(lambda, bounds_.Lambda);
  for (const auto& k : family_) {
    for (double v : k.values()) {
      if (!copy.bounds_.admits(v)) throw Error(ErrorCode::ValueOutOfBounds, "family member leaves the new bounds");
    }
  }
  return copy;
}

std::vector<AngularDensity> sample_kernels(const KernelClass& cls, int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<AngularDensity> out;
  out.reserve(static_cast<std::size_t>(count));
  switch (cls.variant()) {
    case Variant::Full:
      throw Error(ErrorCode::UnsupportedVariant, "members of L_0 are not angular densities");
    case Variant::Finite: {
      std::uniform_int_distribution<std::size_t> pick(0, cls.family().size() - 1);
      for (int i = 0; i < count; ++i) out.push_back(cls.family()[pick(rng)]);
      break;
    }
    case Variant::Star: {
      const auto& b = cls.bounds();
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<double> values(static_cast<std::size_t>(cls.sectors()));
      for (int i = 0; i < count; ++i) {
        // convex combination keeps every value inside [lambda, Lambda] exactly
        for (double& v : values) {
          const double t = unit(rng);
          v = std::min(b.Lambda, std::max(b.lambda, (1.0 - t) * b.lambda + t * b.Lambda));
        }
        out.push_back(make_angular_density(values, b, cls.dim()));
      }
      break;
    }
  }
  return out;
}

}  // namespace demi
