#include "demi/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "demi/errors.hpp"

namespace demi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double interval_delta(const Interval& iv, double x) {
  return (x > iv.a && x < iv.b) ? std::min(x - iv.a, iv.b - x) : 0.0;
}

double ball_distance(const Ball& b, const Point& x) {
  double r2 = 0.0;
  for (std::size_t k = 0; k < b.center.size(); ++k) r2 += (x[k] - b.center[k]) * (x[k] - b.center[k]);
  return std::sqrt(r2);
}

}  // namespace

DomainSpec::DomainSpec(Shape shape) : shape_(std::move(shape)) {
  std::visit(overloaded{
                 [&](Interval& iv) {
                   if (!(iv.a < iv.b)) throw Error(ErrorCode::InvalidArgument, "interval needs a < b");
                   dim_ = 1;
                 },
                 [&](UnionOfIntervals& u) {
                   if (u.parts.empty()) throw Error(ErrorCode::InvalidArgument, "union of intervals is empty");
                   std::sort(u.parts.begin(), u.parts.end(),
                             [](const Interval& l, const Interval& r) { return l.a < r.a; });
                   for (std::size_t i = 0; i < u.parts.size(); ++i) {
                     if (!(u.parts[i].a < u.parts[i].b)) {
                       throw Error(ErrorCode::InvalidArgument, "union component needs a < b");
                     }
                     if (i > 0 && !(u.parts[i - 1].b < u.parts[i].a)) {
                       throw Error(ErrorCode::InvalidArgument, "union components overlap or touch");
                     }
                   }
                   dim_ = 1;
                 },
                 [&](Ball& b) {
                   if (b.center.size() != 1 && b.center.size() != 2) {
                     throw Error(ErrorCode::DimensionMismatch, "ball center must have 1 or 2 coordinates");
                   }
                   if (!(b.radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
                   dim_ = static_cast<int>(b.center.size());
                 },
             },
             shape_);
}

bool DomainSpec::contains(const Point& x) const { return distance_to_complement(x) > 0.0; }

double DomainSpec::distance_to_complement(const Point& x) const {
  return std::visit(overloaded{
                        [&](const Interval& iv) { return interval_delta(iv, x[0]); },
                        [&](const UnionOfIntervals& u) {
                          double d = 0.0;
                          for (const auto& iv : u.parts) d = std::max(d, interval_delta(iv, x[0]));
                          return d;
                        },
                        [&](const Ball& b) { return std::max(0.0, b.radius - ball_distance(b, x)); },
                    },
                    shape_);
}

double DomainSpec::inradius() const {
  return std::visit(overloaded{
                        [](const Interval& iv) { return 0.5 * (iv.b - iv.a); },
                        [](const UnionOfIntervals& u) {
                          double r = 0.0;
                          for (const auto& iv : u.parts) r = std::max(r, 0.5 * (iv.b - iv.a));
                          return r;
                        },
                        [](const Ball& b) { return b.radius; },
                    },
                    shape_);
}

double DomainSpec::thinnest_width() const {
  return std::visit(overloaded{
                        [](const Interval& iv) { return iv.b - iv.a; },
                        [](const UnionOfIntervals& u) {
                          double w = std::numeric_limits<double>::infinity();
                          for (const auto& iv : u.parts) w = std::min(w, iv.b - iv.a);
                          return w;
                        },
                        [](const Ball& b) { return 2.0 * b.radius; },
                    },
                    shape_);
}

double DomainSpec::smallest_gap() const {
  if (const auto* u = std::get_if<UnionOfIntervals>(&shape_)) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < u->parts.size(); ++i) g = std::min(g, u->parts[i].a - u->parts[i - 1].b);
    return g;
  }
  return std::numeric_limits<double>::infinity();
}

Point DomainSpec::box_lo() const {
  return std::visit(overloaded{
                        [](const Interval& iv) { return Point{iv.a, 0.0}; },
                        [](const UnionOfIntervals& u) { return Point{u.parts.front().a, 0.0}; },
                        [](const Ball& b) {
                          Point p{b.center[0] - b.radius, 0.0};
                          if (b.center.size() == 2) p[1] = b.center[1] - b.radius;
                          return p;
                        },
                    },
                    shape_);
}

Point DomainSpec::box_hi() const {
  return std::visit(overloaded{
                        [](const Interval& iv) { return Point{iv.b, 0.0}; },
                        [](const UnionOfIntervals& u) { return Point{u.parts.back().b, 0.0}; },
                        [](const Ball& b) {
                          Point p{b.center[0] + b.radius, 0.0};
                          if (b.center.size() == 2) p[1] = b.center[1] + b.radius;
                          return p;
                        },
                    },
                    shape_);
}

Point Grid::coordinates(int box_index) const {
  const auto m = multi_index(box_index);
  Point p{origin_[0] + h_ * m[0], 0.0};
  if (dim_ == 2) p[1] = origin_[1] + h_ * m[1];
  return p;
}

std::array<int, 2> Grid::multi_index(int box_index) const {
  if (dim_ == 1) return {box_index, 0};
  return {box_index % n_, box_index / n_};
}

int Grid::box_index(int ix, int iy) const {
  if (ix < 0 || ix >= n_) return -1;
  if (dim_ == 1) return ix;
  if (iy < 0 || iy >= n_) return -1;
  return ix + n_ * iy;
}

int Grid::shifted(int box_index_value, const std::array<int, 2>& offset) const {
  const auto m = multi_index(box_index_value);
  return box_index(m[0] + offset[0], m[1] + offset[1]);
}

GridPtr make_grid(const DomainSpec& domain, int n, double h, const Point& origin) {
  if (n < 8) throw Error(ErrorCode::InvalidArgument, "grids need at least 8 nodes per axis");
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
  auto grid = std::shared_ptr<Grid>(new Grid(domain));
  grid->dim_ = domain.dim();
  grid->n_ = n;
  grid->h_ = h;
  grid->origin_ = origin;
  const int size = grid->dim_ == 1 ? n : n * n;
  grid->slot_.assign(static_cast<std::size_t>(size), -1);

  const Point lo = domain.box_lo();
  const Point hi = domain.box_hi();
  const double far = origin[0] + h * (n - 1);
  bool inside_box = lo[0] > origin[0] && hi[0] < far;
  if (grid->dim_ == 2) inside_box = inside_box && lo[1] > origin[1] && hi[1] < origin[1] + h * (n - 1);
  if (!inside_box) throw Error(ErrorCode::GridIncompatibility, "box must strictly contain the domain closure");

  if (domain.thinnest_width() < 2.0 * h) throw Error(ErrorCode::DomainTooSmall, "domain thinner than 2h");
  if (domain.smallest_gap() < h) throw Error(ErrorCode::DomainTooSmall, "union components closer than one cell");

  const double eps = 1e-10 * h;
  for (int b = 0; b < size; ++b) {
    const double d = domain.distance_to_complement(grid->coordinates(b));
    if (d > eps) {
      grid->slot_[static_cast<std::size_t>(b)] = static_cast<int>(grid->interior_.size());
      grid->interior_.push_back(b);
      grid->delta_.push_back(d);
    }
  }
  if (grid->interior_.empty()) throw Error(ErrorCode::DomainTooSmall, "no lattice node lies inside the domain");
  return grid;
}

GridPtr build_grid(const DomainSpec& domain, int n, Placement placement) {
  if (n < 8) throw Error(ErrorCode::InvalidArgument, "grids need at least 8 nodes per axis");
  const Point lo = domain.box_lo();
  const Point hi = domain.box_hi();
  double extent = hi[0] - lo[0];
  if (domain.dim() == 2) extent = std::max(extent, hi[1] - lo[1]);

  Point origin{0.0, 0.0};
  double h = 0.0;
  if (placement == Placement::Margin) {
    const double side = 1.25 * extent;
    h = side / (n - 1);
    for (int k = 0; k < domain.dim(); ++k) origin[k] = 0.5 * (lo[k] + hi[k]) - 0.5 * side;
  } else {
    const int q = std::max(1, static_cast<int>(std::lround((n - 1) / 10.0)));
    h = extent / (n - 2 - 2 * q);
    for (int k = 0; k < domain.dim(); ++k) {
      const double axis_extent = hi[k] - lo[k];
      origin[k] = lo[k] - (q + 0.5) * h - 0.5 * (extent - axis_extent);
    }
  }
  return make_grid(domain, n, h, origin);
}

GridPtr build_grid_on(const DomainSpec& domain, const Grid& lattice) {
  if (domain.dim() != lattice.dim()) throw Error(ErrorCode::GridIncompatibility, "dimension differs from lattice");
  return make_grid(domain, lattice.n(), lattice.h(), lattice.origin());
}

GridFunction::GridFunction(GridPtr grid) : grid_(std::move(grid)) {
  values_ = Eigen::VectorXd::Zero(grid_->box_size());
}

GridFunction GridFunction::from_interior(GridPtr grid, const Eigen::VectorXd& interior_values) {
  if (interior_values.size() != grid->interior_size()) {
    throw Error(ErrorCode::DimensionMismatch, "interior vector length does not match the grid");
  }
  GridFunction f(std::move(grid));
  const auto idx = f.grid_->interior();
  for (std::size_t i = 0; i < idx.size(); ++i) f.values_[idx[i]] = interior_values[static_cast<Eigen::Index>(i)];
  return f;
}

GridFunction GridFunction::from_box(GridPtr grid, Eigen::VectorXd box_values, bool free_exterior) {
  if (box_values.size() != grid->box_size()) {
    throw Error(ErrorCode::DimensionMismatch, "box vector length does not match the grid");
  }
  GridFunction f;
  f.grid_ = std::move(grid);
  f.values_ = std::move(box_values);
  f.free_exterior_ = free_exterior;
  if (!free_exterior) {
    for (int b = 0; b < f.grid_->box_size(); ++b) {
      if (f.grid_->slot(b) < 0) f.values_[b] = 0.0;
    }
  }
  return f;
}

Eigen::VectorXd GridFunction::interior_values() const {
  const auto idx = grid_->interior();
  Eigen::VectorXd v(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) v[static_cast<Eigen::Index>(i)] = values_[idx[i]];
  return v;
}

GridFunction GridFunction::exterior_part() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(values_.size());
  if (free_exterior_) {
    for (int b = 0; b < grid_->box_size(); ++b) {
      if (grid_->slot(b) < 0) v[b] = values_[b];
    }
  }
  return from_box(grid_, std::move(v), true);
}

}  // namespace demi
