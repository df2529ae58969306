#include "demi/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "demi/errors.hpp"

namespace demi {

namespace {

struct Neighbors {
  int plus;
  int minus;
};

Neighbors neighbors(const Grid& grid, int b, const Atom& a) {
  if (a.far) return {-1, -1};
  return {grid.shifted(b, a.offset), grid.shifted(b, {-a.offset[0], -a.offset[1]})};
}

double atom_delta(const Grid& grid, const Eigen::VectorXd& box, int b, const Atom& a) {
  if (a.far) return -2.0 * box[b];
  const auto nb = neighbors(grid, b, a);
  const double up = nb.plus >= 0 ? box[nb.plus] : 0.0;
  const double um = nb.minus >= 0 ? box[nb.minus] : 0.0;
  return up + um - 2.0 * box[b];
}

// Row of a linear operator given a coefficient per atom.
template <class Coef>
void assemble_row(const Grid& grid, const QuadratureWeights& q, int row, Coef&& coef, Eigen::MatrixXd& interior,
                  Eigen::MatrixXd* exterior, const std::vector<int>* ext_slot, double& far_mass) {
  const int b = grid.interior()[static_cast<std::size_t>(row)];
  double diag = 0.0;
  for (std::size_t ai = 0; ai < q.atoms.size(); ++ai) {
    const Atom& a = q.atoms[ai];
    const double cw = coef(ai, a) * a.weight;
    diag -= 2.0 * cw;
    if (a.far) {
      far_mass += 2.0 * cw;
      continue;
    }
    const auto nb = neighbors(grid, b, a);
    for (int target : {nb.plus, nb.minus}) {
      if (target < 0) {
        far_mass += cw;
        continue;
      }
      const int col = grid.slot(target);
      if (col >= 0) {
        interior(row, col) += cw;
      } else if (exterior != nullptr) {
        (*exterior)(row, (*ext_slot)[static_cast<std::size_t>(target)]) += cw;
      } else {
        far_mass += cw;
      }
    }
  }
  interior(row, row) += diag;
}

std::vector<int> exterior_slots(const Grid& grid, const std::vector<int>& ext) {
  std::vector<int> slot(static_cast<std::size_t>(grid.box_size()), -1);
  for (std::size_t k = 0; k < ext.size(); ++k) slot[static_cast<std::size_t>(ext[k])] = static_cast<int>(k);
  return slot;
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }
double negative_part(double x) { return x < 0.0 ? -x : 0.0; }

}  // namespace

Discretization::Discretization(KernelClass cls, GridPtr grid, QuadratureRule rule)
    : class_(std::move(cls)), grid_(std::move(grid)),
      weights_(grid_weights(class_.order(), *grid_, class_.sectors(), rule)) {
  if (grid_->dim() != class_.dim()) throw Error(ErrorCode::DimensionMismatch, "grid and kernel class dimensions differ");
}

Discretization Discretization::with_class(KernelClass cls) const {
  if (cls.dim() != class_.dim() || cls.sectors() != class_.sectors() ||
      cls.order().value() != class_.order().value()) {
    throw Error(ErrorCode::DimensionMismatch, "replacement class must share order, dimension and sectors");
  }
  Discretization copy = *this;
  copy.class_ = std::move(cls);
  return copy;
}

Eigen::MatrixXd Discretization::sector_aggregates(const GridFunction& u) const {
  if (u.grid() != grid_ && u.grid()->box_size() != grid_->box_size()) {
    throw Error(ErrorCode::GridMismatch, "grid function lives on another grid");
  }
  const Grid& grid = *grid_;
  const int n = grid.interior_size();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, class_.sectors());
  const Eigen::VectorXd& box = u.box_values();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const int b = grid.interior()[static_cast<std::size_t>(i)];
    for (const Atom& a : weights_.atoms) g(i, a.sector) += a.weight * atom_delta(grid, box, b, a);
  }
  return g;
}

Eigen::VectorXd NonlocalMatrix::apply(const GridFunction& u) const {
  Eigen::VectorXd r = interior * u.interior_values();
  if (u.free_exterior()) {
    if (exterior.rows() != interior.rows()) {
      throw Error(ErrorCode::InvalidArgument, "exterior block was not assembled");
    }
    Eigen::VectorXd ext(static_cast<Eigen::Index>(exterior_nodes.size()));
    for (std::size_t k = 0; k < exterior_nodes.size(); ++k) ext[static_cast<Eigen::Index>(k)] = u.at(exterior_nodes[k]);
    r += exterior * ext;
  }
  return r;
}

double NonlocalMatrix::invariant_defect() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < interior.rows(); ++i) {
    const double diag = interior(i, i);
    double sum = diag + far_mass[i];
    double most_negative = 0.0;
    for (Eigen::Index j = 0; j < interior.cols(); ++j) {
      if (j == i) continue;
      sum += interior(i, j);
      most_negative = std::min(most_negative, interior(i, j));
    }
    for (Eigen::Index j = 0; j < exterior.cols(); ++j) {
      sum += exterior(i, j);
      most_negative = std::min(most_negative, exterior(i, j));
    }
    worst = std::max({worst, std::abs(sum) / std::abs(diag), -most_negative / std::abs(diag)});
  }
  return worst;
}

std::vector<int> exterior_nodes(const Grid& grid) {
  std::vector<int> ext;
  for (int b = 0; b < grid.box_size(); ++b) {
    if (grid.slot(b) < 0) ext.push_back(b);
  }
  return ext;
}

NonlocalMatrix assemble_linear(const AngularDensity& k, const Discretization& disc, bool with_exterior) {
  const KernelClass& cls = disc.kernel_class();
  if (k.dim() != cls.dim() || k.sectors() != cls.sectors()) {
    throw Error(ErrorCode::DimensionMismatch, "density does not match the class sector layout");
  }
  for (double v : k.values()) {
    if (!cls.bounds().admits(v)) throw Error(ErrorCode::ValueOutOfBounds, "density violates the class bounds");
  }
  const Grid& grid = *disc.grid();
  const auto& q = disc.weights();
  const int n = grid.interior_size();

  NonlocalMatrix m;
  m.grid = disc.grid();
  m.kernel = k;
  m.interior = Eigen::MatrixXd::Zero(n, n);
  m.far_mass = Eigen::VectorXd::Zero(n);
  std::vector<int> ext_slot;
  if (with_exterior) {
    m.exterior_nodes = exterior_nodes(grid);
    m.exterior = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(m.exterior_nodes.size()));
    ext_slot = exterior_slots(grid, m.exterior_nodes);
  }
  const auto coef = [&](std::size_t, const Atom& a) { return k.value(a.sector); };
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    assemble_row(grid, q, i, coef, m.interior, with_exterior ? &m.exterior : nullptr, &ext_slot, m.far_mass[i]);
  }
  if (m.invariant_defect() > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "assembled matrix violates the monotone structure");
  }
  return m;
}

NonlocalMatrix assemble_linear(const AngularDensity& k, const KernelClass& cls, const GridPtr& grid) {
  return assemble_linear(k, Discretization(cls, grid));
}

double second_difference(const GridFunction& u, int box_index, const std::array<int, 2>& offset) {
  const Grid& grid = *u.grid();
  const int p = grid.shifted(box_index, offset);
  const int m = grid.shifted(box_index, {-offset[0], -offset[1]});
  return u.at(p) + u.at(m) - 2.0 * u.at(box_index);
}

ExtremalResult apply_extremal(const Discretization& disc, const GridFunction& u, Extremal which) {
  const KernelClass& cls = disc.kernel_class();
  if (cls.variant() == Variant::Finite) {
    throw Error(ErrorCode::UnsupportedVariant, "finite families are evaluated with apply_bellman");
  }
  const double lo = cls.bounds().lambda;
  const double hi = cls.bounds().Lambda;
  const bool plus = which == Extremal::MplusStar || which == Extremal::MplusFull;
  const double up = plus ? hi : lo;    // multiplier of positive parts
  const double down = plus ? lo : hi;  // multiplier of negative parts
  const Grid& grid = *disc.grid();
  const int n = grid.interior_size();
  Eigen::VectorXd value = Eigen::VectorXd::Zero(n);
  ExtremalResult result;

  if (which == Extremal::MplusStar || which == Extremal::MminusStar) {
    const Eigen::MatrixXd g = disc.sector_aggregates(u);
    result.optimal_density.resize(n, g.cols());
    for (int i = 0; i < n; ++i) {
      for (Eigen::Index t = 0; t < g.cols(); ++t) {
        const double x = g(i, t);
        value[i] += up * positive_part(x) - down * negative_part(x);
        result.optimal_density(i, t) = x > 0.0 ? up : down;
      }
    }
  } else {
    const auto& q = disc.weights();
    const Eigen::VectorXd& box = u.box_values();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      const int b = grid.interior()[static_cast<std::size_t>(i)];
      double acc = 0.0;
      for (const Atom& a : q.atoms) {
        const double d = atom_delta(grid, box, b, a);
        acc += a.weight * (up * positive_part(d) - down * negative_part(d));
      }
      value[i] = acc;
    }
  }
  result.value = GridFunction::from_interior(disc.grid(), value);
  return result;
}

ExtremalResult apply_extremal(const KernelClass& cls, const GridFunction& u, Extremal which) {
  return apply_extremal(Discretization(cls, u.grid()), u, which);
}

std::pair<GridFunction, std::vector<int>> apply_bellman(std::span<const NonlocalMatrix> family,
                                                        const GridFunction& u) {
  if (family.empty()) throw Error(ErrorCode::InvalidArgument, "Bellman family is empty");
  for (const auto& m : family) {
    if (m.grid->box_size() != u.grid()->box_size() || m.grid->interior_size() != u.grid()->interior_size() ||
        m.grid->h() != u.grid()->h()) {
      throw Error(ErrorCode::GridMismatch, "family members and grid function live on different grids");
    }
  }
  Eigen::VectorXd best = family[0].apply(u);
  std::vector<int> policy(static_cast<std::size_t>(best.size()), 0);
  for (std::size_t k = 1; k < family.size(); ++k) {
    const Eigen::VectorXd v = family[k].apply(u);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v[i] > best[i]) {
        best[i] = v[i];
        policy[static_cast<std::size_t>(i)] = static_cast<int>(k);
      }
    }
  }
  return {GridFunction::from_interior(u.grid(), best), std::move(policy)};
}

// ---------------------------------------------------------------------------
// BellmanOperator

BellmanOperator::BellmanOperator(Discretization disc) : grid_(disc.grid()), disc_(std::move(disc)) {}

BellmanOperator BellmanOperator::from_class(const KernelClass& cls, GridPtr grid, QuadratureRule rule) {
  return BellmanOperator(Discretization(cls, std::move(grid), rule));
}

BellmanOperator BellmanOperator::from_family(std::vector<NonlocalMatrix> family) {
  if (family.empty()) throw Error(ErrorCode::InvalidArgument, "Bellman family is empty");
  for (const auto& m : family) {
    if (m.grid != family.front().grid) throw Error(ErrorCode::GridMismatch, "family matrices must share a grid");
  }
  BellmanOperator op;
  op.grid_ = family.front().grid;
  op.family_ = std::move(family);
  return op;
}

Eigen::VectorXd BellmanOperator::apply(const GridFunction& u) const {
  if (!disc_) return apply_bellman(family_, u).first.interior_values();
  const KernelClass& cls = disc_->kernel_class();
  switch (cls.variant()) {
    case Variant::Star:
      return apply_extremal(*disc_, u, Extremal::MplusStar).value.interior_values();
    case Variant::Full:
      return apply_extremal(*disc_, u, Extremal::MplusFull).value.interior_values();
    case Variant::Finite: {
      const Eigen::MatrixXd g = disc_->sector_aggregates(u);
      Eigen::VectorXd best = Eigen::VectorXd::Constant(g.rows(), -std::numeric_limits<double>::infinity());
      for (const auto& k : cls.family()) {
        const Eigen::Map<const Eigen::VectorXd> kv(k.values().data(), k.sectors());
        best = best.cwiseMax(g * kv);
      }
      return best;
    }
  }
  return {};
}

Policy BellmanOperator::improve(const GridFunction& u) const {
  Policy p;
  const int n = grid_->interior_size();
  if (!disc_) {
    p.slots = 1;
    const auto policy = apply_bellman(family_, u).second;
    p.choice.assign(policy.begin(), policy.end());
    return p;
  }
  const KernelClass& cls = disc_->kernel_class();
  switch (cls.variant()) {
    case Variant::Star: {
      const Eigen::MatrixXd g = disc_->sector_aggregates(u);
      p.slots = cls.sectors();
      p.choice.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(p.slots));
      for (int i = 0; i < n; ++i) {
        for (int t = 0; t < p.slots; ++t) p.choice[static_cast<std::size_t>(i * p.slots + t)] = g(i, t) > 0.0 ? 1 : 0;
      }
      break;
    }
    case Variant::Full: {
      const auto& atoms = disc_->weights().atoms;
      const Grid& grid = *grid_;
      const Eigen::VectorXd& box = u.box_values();
      p.slots = static_cast<int>(atoms.size());
      p.choice.resize(static_cast<std::size_t>(n) * atoms.size());
#pragma omp parallel for schedule(static)
      for (int i = 0; i < n; ++i) {
        const int b = grid.interior()[static_cast<std::size_t>(i)];
        for (std::size_t a = 0; a < atoms.size(); ++a) {
          p.choice[static_cast<std::size_t>(i) * atoms.size() + a] = atom_delta(grid, box, b, atoms[a]) > 0.0 ? 1 : 0;
        }
      }
      break;
    }
    case Variant::Finite: {
      const Eigen::MatrixXd g = disc_->sector_aggregates(u);
      p.slots = 1;
      p.choice.assign(static_cast<std::size_t>(n), 0);
      Eigen::VectorXd best = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
      for (std::size_t m = 0; m < cls.family().size(); ++m) {
        const auto& k = cls.family()[m];
        const Eigen::Map<const Eigen::VectorXd> kv(k.values().data(), k.sectors());
        const Eigen::VectorXd v = g * kv;
        for (int i = 0; i < n; ++i) {
          if (v[i] > best[i]) {
            best[i] = v[i];
            p.choice[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(m);
          }
        }
      }
      break;
    }
  }
  return p;
}

Policy BellmanOperator::uniform_policy(std::uint16_t choice) const {
  Policy p;
  const auto n = static_cast<std::size_t>(grid_->interior_size());
  if (!disc_ || disc_->kernel_class().variant() == Variant::Finite) {
    p.slots = 1;
  } else if (disc_->kernel_class().variant() == Variant::Star) {
    p.slots = disc_->kernel_class().sectors();
  } else {
    p.slots = static_cast<int>(disc_->weights().atoms.size());
  }
  p.choice.assign(n * static_cast<std::size_t>(p.slots), choice);
  return p;
}

namespace {

// Per-atom coefficient at node i under policy, for class-backed operators.
struct PolicyCoefficient {
  const KernelClass& cls;
  const Policy& policy;
  int node;

  double operator()(std::size_t atom_index, const Atom& a) const {
    const auto& b = cls.bounds();
    switch (cls.variant()) {
      case Variant::Star: return policy.at(node, a.sector) ? b.Lambda : b.lambda;
      case Variant::Full: return policy.at(node, static_cast<int>(atom_index)) ? b.Lambda : b.lambda;
      case Variant::Finite: return cls.family()[policy.at(node, 0)].value(a.sector);
    }
    return 0.0;
  }
};

}  // namespace

Eigen::MatrixXd BellmanOperator::interior_matrix(const Policy& policy) const {
  const int n = grid_->interior_size();
  if (static_cast<int>(policy.choice.size()) != n * policy.slots) {
    throw Error(ErrorCode::DimensionMismatch, "policy does not match the grid");
  }
  if (!disc_) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) a.row(i) = family_[policy.at(i, 0)].interior.row(i);
    return a;
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  const KernelClass& cls = disc_->kernel_class();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double far = 0.0;
    assemble_row(*grid_, disc_->weights(), i, PolicyCoefficient{cls, policy, i}, a, nullptr, nullptr, far);
  }
  return a;
}

Eigen::VectorXd BellmanOperator::exterior_action(const Policy& policy, const GridFunction& u) const {
  const int n = grid_->interior_size();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  if (!u.free_exterior()) return r;
  if (!disc_) {
    const auto& ext = family_.front().exterior_nodes;
    Eigen::VectorXd e(static_cast<Eigen::Index>(ext.size()));
    for (std::size_t k = 0; k < ext.size(); ++k) e[static_cast<Eigen::Index>(k)] = u.at(ext[k]);
    for (int i = 0; i < n; ++i) r[i] = family_[policy.at(i, 0)].exterior.row(i).dot(e);
    return r;
  }
  const Grid& grid = *grid_;
  const KernelClass& cls = disc_->kernel_class();
  const auto& atoms = disc_->weights().atoms;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const int b = grid.interior()[static_cast<std::size_t>(i)];
    const PolicyCoefficient coef{cls, policy, i};
    double acc = 0.0;
    for (std::size_t ai = 0; ai < atoms.size(); ++ai) {
      const Atom& a = atoms[ai];
      if (a.far) continue;
      const auto nb = neighbors(grid, b, a);
      double ext = 0.0;
      for (int t : {nb.plus, nb.minus}) {
        if (t >= 0 && grid.slot(t) < 0) ext += u.at(t);
      }
      if (ext != 0.0) acc += coef(ai, a) * a.weight * ext;
    }
    r[i] = acc;
  }
  return r;
}

}  // namespace demi
