#include "demi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "demi/errors.hpp"

namespace demi {

namespace {

using boost::math::quadrature::gauss;
constexpr double pi = std::numbers::pi;

// \int over the unit-spaced cell centred at j of |y|^p, tensor Gauss rule.
double unit_cell_power(const std::array<int, 2>& j, double p) {
  const int dist = std::max(std::abs(j[0]), std::abs(j[1]));
  const int pieces = dist <= 2 ? 4 : 1;
  const double width = 1.0 / pieces;
  auto integrand_x = [&](double y1) {
    return [=](double x) { return std::pow(x * x + y1 * y1, 0.5 * p); };
  };
  double total = 0.0;
  for (int a = 0; a < pieces; ++a) {
    const double x0 = j[0] - 0.5 + a * width;
    for (int b = 0; b < pieces; ++b) {
      const double y0 = j[1] - 0.5 + b * width;
      if (dist <= 8) {
        total += gauss<double, 15>::integrate(
            [&](double y) { return gauss<double, 15>::integrate(integrand_x(y), x0, x0 + width); }, y0,
            y0 + width);
      } else {
        total += gauss<double, 5>::integrate(
            [&](double y) { return gauss<double, 5>::integrate(integrand_x(y), x0, x0 + width); }, y0,
            y0 + width);
      }
    }
  }
  return total;
}

// \int_lo^hi f(phi) dphi with breakpoints at multiples of pi/4, where
// max(|cos|, |sin|) changes branch.
template <class F>
double angular_integral(F&& f, double lo, double hi) {
  std::vector<double> cuts{lo};
  for (int k = static_cast<int>(std::floor(lo / (pi / 4))) + 1; k * (pi / 4) < hi; ++k) cuts.push_back(k * pi / 4);
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] > 0.0) total += gauss<double, 20>::integrate(f, cuts[i], cuts[i + 1]);
  }
  return total;
}

double square_radius(double half_side, double phi) {
  return half_side / std::max(std::abs(std::cos(phi)), std::abs(std::sin(phi)));
}

}  // namespace

double QuadratureWeights::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += 2.0 * a.weight;
  return m;
}

double cell_integral(FractionalOrder order, int dim, double h, const std::array<int, 2>& j) {
  const double s = order.value();
  if (j[0] == 0 && j[1] == 0) throw Error(ErrorCode::ZeroArgument, "the singular cell has no plain integral");
  if (dim == 1) {
    const double r = std::abs(j[0]);
    return (std::pow(r - 0.5, -2 * s) - std::pow(r + 0.5, -2 * s)) / (2 * s) * std::pow(h, -2 * s);
  }
  return unit_cell_power(j, -2.0 - 2.0 * s) * std::pow(h, -2 * s);
}

QuadratureWeights radial_weights(FractionalOrder order, double h, double R, int dim, int sectors,
                                 QuadratureRule rule) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::DimensionMismatch, "dimension must be 1 or 2");
  if (!(h > 0.0) || !(R >= h)) throw Error(ErrorCode::InvalidArgument, "need h > 0 and R >= h");
  if (dim == 1) sectors = 1;
  if (sectors < 1) throw Error(ErrorCode::InvalidArgument, "sector count must be positive");

  const double s = order.value();
  const double scale = std::pow(h, -2 * s);
  QuadratureWeights q;
  q.order = order;
  q.dim = dim;
  q.h = h;
  q.sectors = sectors;
  q.rule = rule;
  q.reach = static_cast<int>(std::ceil(R / h - 1e-9));
  const int M = q.reach;

  if (dim == 1) {
    q.atoms.reserve(static_cast<std::size_t>(M) + 2);
    for (int j = 1; j <= M; ++j) {
      double w = 0.0;
      if (rule == QuadratureRule::CellAverage) {
        w = (std::pow(j - 0.5, -2 * s) - std::pow(j + 0.5, -2 * s)) / (2 * s);
      } else {
        w = (std::pow(j + 0.5, 2 - 2 * s) - std::pow(j - 0.5, 2 - 2 * s)) / ((2 - 2 * s) * j * j);
      }
      q.atoms.push_back({{j, 0}, w * scale, 0, false});
    }
    // singular cell |y| < h/2: u'' replaced by the second difference at offset 1
    q.atoms.push_back({{1, 0}, std::pow(0.5, 2 - 2 * s) / (2 - 2 * s) * scale, 0, false});
    q.atoms.push_back({{0, 0}, std::pow(M + 0.5, -2 * s) / (2 * s) * scale, 0, true});
    return q;
  }

  q.atoms.reserve(static_cast<std::size_t>((2 * M + 1) * (M + 1) + 3 * sectors));
  for (int j2 = 0; j2 <= M; ++j2) {
    for (int j1 = (j2 == 0 ? 1 : -M); j1 <= M; ++j1) {
      const std::array<int, 2> j{j1, j2};
      double w = 0.0;
      if (rule == QuadratureRule::CellAverage) {
        w = unit_cell_power(j, -2.0 - 2.0 * s);
      } else {
        w = unit_cell_power(j, -2.0 * s) / static_cast<double>(j1 * j1 + j2 * j2);
      }
      const double dir[2] = {static_cast<double>(j1), static_cast<double>(j2)};
      q.atoms.push_back({j, w * scale, nearest_sector(dir, 2, sectors), false});
    }
  }

  const double half_width = pi / (2.0 * sectors);
  for (int k = 0; k < sectors; ++k) {
    const double lo = k * pi / sectors - half_width;
    const double hi = k * pi / sectors + half_width;
    // singular cell: second derivatives along the axes, sector by sector
    const double a = angular_integral(
        [&](double phi) {
          const double c = std::cos(phi);
          return c * c * std::pow(square_radius(0.5, phi), 2 - 2 * s) / (2 - 2 * s);
        },
        lo, hi);
    const double b = angular_integral(
        [&](double phi) {
          const double sn = std::sin(phi);
          return sn * sn * std::pow(square_radius(0.5, phi), 2 - 2 * s) / (2 - 2 * s);
        },
        lo, hi);
    q.atoms.push_back({{1, 0}, a * scale, k, false});
    q.atoms.push_back({{0, 1}, b * scale, k, false});
    const double tail = angular_integral(
        [&](double phi) { return std::pow(square_radius(M + 0.5, phi), -2 * s) / (2 * s); }, lo, hi);
    q.atoms.push_back({{0, 0}, tail * scale, k, true});
  }
  return q;
}

QuadratureWeights grid_weights(FractionalOrder order, const Grid& grid, int sectors, QuadratureRule rule) {
  return radial_weights(order, grid.h(), grid.h() * (grid.n() - 1), grid.dim(), sectors, rule);
}

}  // namespace demi
