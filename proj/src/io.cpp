#include "demi/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "demi/errors.hpp"

namespace demi {

namespace {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Finite: return "finite";
    case Variant::Star: return "star";
    case Variant::Full: return "full";
  }
  return "";
}

template <class T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::ConfigParseError, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigParseError, std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const KernelClass& cls) {
  Json j;
  j["s"] = cls.order().value();
  j["dim"] = cls.dim();
  j["lambda"] = cls.bounds().lambda;
  j["Lambda"] = cls.bounds().Lambda;
  j["variant"] = variant_name(cls.variant());
  j["densities"] = Json::array();
  for (const auto& k : cls.family()) j["densities"].push_back(std::vector<double>(k.values().begin(), k.values().end()));
  if (cls.dim() == 2) j["sectors"] = cls.sectors();
  return j;
}

KernelClass kernel_class_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigParseError, "kernel must be an object");
  const FractionalOrder order(get<double>(j, "s"));
  const int dim = get<int>(j, "dim");
  const EllipticityBounds bounds(get<double>(j, "lambda"), get<double>(j, "Lambda"));
  const auto variant = get<std::string>(j, "variant");
  const int sectors = j.contains("sectors") ? get<int>(j, "sectors") : 0;
  if (variant == "star") return KernelClass::star(order, dim, bounds, sectors);
  if (variant == "full") return KernelClass::full(order, dim, bounds, sectors);
  if (variant == "finite") {
    std::vector<AngularDensity> family;
    for (const auto& v : get<std::vector<std::vector<double>>>(j, "densities")) {
      family.push_back(make_angular_density(v, bounds, dim));
    }
    return KernelClass::finite(order, dim, bounds, std::move(family));
  }
  throw Error(ErrorCode::ConfigParseError, "unknown kernel variant '" + variant + "'");
}

Json to_json(const DomainSpec& d) {
  return std::visit(
      [](const auto& s) -> Json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Interval>) {
          return {{"type", "interval"}, {"a", s.a}, {"b", s.b}};
        } else if constexpr (std::is_same_v<S, UnionOfIntervals>) {
          Json parts = Json::array();
          for (const auto& p : s.parts) parts.push_back({p.a, p.b});
          return {{"type", "union"}, {"parts", parts}};
        } else {
          return {{"type", "ball"}, {"center", s.center}, {"radius", s.radius}};
        }
      },
      d.shape());
}

DomainSpec domain_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigParseError, "domain must be an object");
  const auto type = get<std::string>(j, "type");
  if (type == "interval") return DomainSpec::interval(get<double>(j, "a"), get<double>(j, "b"));
  if (type == "ball") return DomainSpec::ball(get<std::vector<double>>(j, "center"), get<double>(j, "radius"));
  if (type == "union") {
    UnionOfIntervals u;
    for (const auto& p : get<std::vector<std::array<double, 2>>>(j, "parts")) u.parts.push_back({p[0], p[1]});
    return DomainSpec(std::move(u));
  }
  throw Error(ErrorCode::ConfigParseError, "unknown domain type '" + type + "'");
}

namespace {

std::vector<int> written_nodes(const GridFunction& u) {
  const Grid& g = *u.grid();
  if (!u.free_exterior()) return {g.interior().begin(), g.interior().end()};
  std::vector<int> all(static_cast<std::size_t>(g.box_size()));
  for (int b = 0; b < g.box_size(); ++b) all[static_cast<std::size_t>(b)] = b;
  return all;
}

}  // namespace

void write_csv(std::ostream& os, const GridFunction& u) {
  const Grid& g = *u.grid();
  os << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
  for (int b : written_nodes(u)) {
    const Point p = g.coordinates(b);
    os << format_real(p[0]) << ',';
    if (g.dim() == 2) os << format_real(p[1]) << ',';
    os << format_real(u.at(b)) << '\n';
  }
}

GridFunction read_csv(std::istream& is, const GridPtr& grid) {
  const Grid& g = *grid;
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::ConfigParseError, "empty CSV");
  Eigen::VectorXd box = Eigen::VectorXd::Zero(g.box_size());
  std::set<int> seen;
  bool exterior = false;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        cols.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigParseError, "CSV row " + std::to_string(row) + " is not numeric");
      }
    }
    if (static_cast<int>(cols.size()) != g.dim() + 1) {
      throw Error(ErrorCode::ConfigParseError, "CSV row " + std::to_string(row) + " has the wrong column count");
    }
    int ix[2] = {0, 0};
    for (int a = 0; a < g.dim(); ++a) {
      const double t = (cols[static_cast<std::size_t>(a)] - g.origin()[static_cast<std::size_t>(a)]) / g.h();
      ix[a] = static_cast<int>(std::lround(t));
      if (std::abs(t - ix[a]) > 1e-6) throw Error(ErrorCode::GridMismatch, "CSV coordinates are off the grid");
    }
    const int b = g.box_index(ix[0], ix[1]);
    if (b < 0) throw Error(ErrorCode::GridMismatch, "CSV node lies outside the box");
    if (g.slot(b) < 0 && cols.back() != 0.0) exterior = true;
    box[b] = cols.back();
    seen.insert(b);
  }
  for (int b : g.interior()) {
    if (!seen.count(b)) throw Error(ErrorCode::GridMismatch, "CSV does not cover every interior node");
  }
  return GridFunction::from_box(grid, std::move(box), exterior);
}

Json to_json(const GridFunction& u) {
  const Grid& g = *u.grid();
  Json arr = Json::array();
  for (int b : written_nodes(u)) {
    const Point p = g.coordinates(b);
    Json row = Json::array({p[0]});
    if (g.dim() == 2) row.push_back(p[1]);
    row.push_back(u.at(b));
    arr.push_back(std::move(row));
  }
  return arr;
}

void write_triplets(std::ostream& os, const NonlocalMatrix& a) {
  for (Eigen::Index i = 0; i < a.interior.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.interior.cols(); ++j) {
      if (a.interior(i, j) != 0.0) os << i << ' ' << j << ' ' << format_real(a.interior(i, j)) << '\n';
    }
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::SingularSystem: return "SingularSystem";
    case SolveStatus::NotInResolventSet: return "NotInResolventSet";
  }
  return "";
}

std::string to_string(BranchStatus s) {
  switch (s) {
    case BranchStatus::Completed: return "Completed";
    case BranchStatus::FoldDetected: return "FoldDetected";
    case BranchStatus::MaxAmplitude: return "MaxAmplitude";
    case BranchStatus::CorrectorFailed: return "CorrectorFailed";
  }
  return "";
}

Json to_json(const SolveReport& r) {
  return {{"status", to_string(r.status)},
          {"iterations", r.iterations},
          {"residual_inf", r.residual_inf},
          {"residual_history", r.residual_history},
          {"policy_slots", r.policy.slots},
          {"policy", r.policy.choice}};
}

Json to_json(const EigenReport& r) {
  return {{"cone", r.pair.cone == Cone::Positive ? "Positive" : "Negative"},
          {"value", r.pair.value},
          {"iterations", r.iterations},
          {"residual_inf", r.residual_inf},
          {"ratio_history", r.ratio_history}};
}

Json to_json(const Certificate& c) {
  return {{"mu", c.mu},
          {"sign", c.sign == CertificateSign::Plus ? "Plus" : "Minus"},
          {"margin", c.margin},
          {"positivity_floor", c.positivity_floor},
          {"valid", c.valid},
          {"evidence", "discrete-level evidence"}};
}

Json to_json(const BoundaryFit& f) {
  return {{"exponent", f.exponent}, {"c1", f.c1},           {"C", f.C},         {"intercept", f.intercept},
          {"r2", f.r2},             {"band_lo", f.band_lo}, {"band_hi", f.band_hi}, {"nodes", f.nodes}};
}

Json to_json(const ProbeReport& r) {
  Json details = Json::array();
  for (const auto& d : r.details) {
    Json e = {{"index", d.index}, {"violation", d.violation}, {"values", d.values}};
    if (!d.note.empty()) e["note"] = d.note;
    details.push_back(std::move(e));
  }
  return {{"name", r.name},
          {"trials", r.trials},
          {"violations", r.violations},
          {"worst_margin", r.worst_margin},
          {"seed", r.seed},
          {"details", details}};
}

void write_csv(std::ostream& os, const ProbeReport& r) {
  std::set<std::string> keys;
  for (const auto& d : r.details) {
    for (const auto& [k, v] : d.values) keys.insert(k);
  }
  os << "index,violation";
  for (const auto& k : keys) os << ',' << k;
  os << ",note\n";
  for (const auto& d : r.details) {
    os << d.index << ',' << (d.violation ? 1 : 0);
    for (const auto& k : keys) {
      os << ',';
      if (auto it = d.values.find(k); it != d.values.end()) os << format_real(it->second);
    }
    os << ',' << d.note << '\n';
  }
}

Json to_json(const Branch& b) {
  Json pts = Json::array();
  for (const auto& p : b.points) {
    pts.push_back({{"amplitude", p.amplitude}, {"mu", p.mu}, {"residual", p.residual}});
  }
  return {{"origin", b.origin == BranchOrigin::PlusEigen ? "PlusEigen" : "MinusEigen"},
          {"status", to_string(b.status)},
          {"anchor", b.anchor},
          {"eigenvalue", b.eigenvalue},
          {"points", pts}};
}

void write_csv(std::ostream& os, const Branch& b) {
  os << "amplitude,mu,min_u,max_u,residual\n";
  for (const auto& p : b.points) {
    const Eigen::VectorXd u = p.u.interior_values();
    os << format_real(p.amplitude) << ',' << format_real(p.mu) << ',' << format_real(u.minCoeff()) << ','
       << format_real(u.maxCoeff()) << ',' << format_real(p.residual) << '\n';
  }
}

}  // namespace demi
