#include "demi/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "demi/errors.hpp"

namespace demi {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigParseError, what); }

template <class T>
T as(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    config_error("bad value for '" + key + "': " + e.what());
  }
}

ShapeDescriptor shape_from_json(const Json& j) {
  if (!j.is_object()) config_error("'f' must be an object");
  ShapeDescriptor f;
  for (const auto& [k, v] : j.items()) {
    if (k == "type") f.type = as<std::string>(v, k);
    else if (k == "center") f.center = as<std::vector<double>>(v, k);
    else if (k == "width" || k == "radius") f.width = as<double>(v, k);
    else if (k == "value") f.value = as<double>(v, k);
    else config_error("unknown key 'f." + k + "'");
  }
  if (f.type != "constant" && f.type != "bump" && f.type != "indicator") config_error("unknown shape '" + f.type + "'");
  if (!(f.width > 0.0)) config_error("shape width must be positive");
  return f;
}

Json to_json(const ShapeDescriptor& f) {
  return {{"type", f.type}, {"center", f.center}, {"width", f.width}, {"value", f.value}};
}

NonlinearTerm term_from_json(const Json& j) {
  if (!j.is_object()) config_error("'term' must be an object");
  std::string kind = "cubic";
  double c = 1.0;
  double p = 3.0;
  for (const auto& [k, v] : j.items()) {
    if (k == "kind") kind = as<std::string>(v, k);
    else if (k == "c") c = as<double>(v, k);
    else if (k == "p") p = as<double>(v, k);
    else config_error("unknown key 'term." + k + "'");
  }
  if (kind == "cubic") return NonlinearTerm::cubic(c);
  if (kind == "power") return NonlinearTerm::power_sat(c, p);
  config_error("unknown term kind '" + kind + "'");
}

struct Artifacts {
  std::map<std::string, std::string> files;

  void json(const std::string& name, const Json& j) { files[name] = j.dump(2) + "\n"; }
  template <class T>
  void csv(const std::string& name, const T& value) {
    std::ostringstream os;
    write_csv(os, value);
    files[name] = os.str();
  }
  void flush(const std::filesystem::path& out) const {
    std::filesystem::create_directories(out);
    for (const auto& [name, text] : files) {
      std::ofstream f(out / name, std::ios::binary);
      f << text;
      if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + (out / name).string());
    }
  }
};

Json probe_json(const ProbeReport& r, bool passed) {
  Json j = to_json(r);
  j["passed"] = passed;
  return j;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<double> default_lambdas(const KernelClass& cls) {
  const double lo = 0.25 * cls.bounds().lambda;
  const double hi = cls.bounds().Lambda;
  std::vector<double> v;
  for (int i = 0; i < 5; ++i) v.push_back(lo + (hi - lo) * i / 4.0);
  return v;
}

}  // namespace

GridFunction sample_shape(const ShapeDescriptor& f, const GridPtr& grid) {
  const int dim = grid->dim();
  if (f.type != "constant" && static_cast<int>(f.center.size()) != dim) {
    throw Error(ErrorCode::DimensionMismatch, "shape center has the wrong dimension");
  }
  return GridFunction::sample(grid, [&](const Point& x) {
    if (f.type == "constant") return f.value;
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = x[static_cast<std::size_t>(a)] - f.center[static_cast<std::size_t>(a)];
      r2 += d * d;
    }
    const double w2 = f.width * f.width;
    if (f.type == "indicator") return r2 < w2 ? f.value : 0.0;
    const double t = 1.0 - r2 / w2;
    return t > 0.0 ? f.value * t * t : 0.0;
  });
}

ExperimentConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "kernel") c.kernel = kernel_class_from_json(v);
      else if (k == "domain") c.domain = domain_from_json(v);
      else if (k == "n") c.n = as<int>(v, k);
      else if (k == "placement") {
        const auto p = as<std::string>(v, k);
        if (p == "margin") c.placement = Placement::Margin;
        else if (p == "staggered") c.placement = Placement::Staggered;
        else config_error("unknown placement '" + p + "'");
      } else if (k == "seed") c.seed = as<std::uint64_t>(v, k);
      else if (k == "tol") c.tol = as<double>(v, k);
      else if (k == "maxit") c.maxit = as<int>(v, k);
      else if (k == "mu") c.mu = as<double>(v, k);
      else if (k == "f") c.f = shape_from_json(v);
      else if (k == "trials") c.trials = as<int>(v, k);
      else if (k == "mu_fraction") c.mu_fraction = as<double>(v, k);
      else if (k == "count") c.count = as<int>(v, k);
      else if (k == "epsilons") c.epsilons = as<std::vector<double>>(v, k);
      else if (k == "mu_grid") c.mu_grid = as<std::vector<double>>(v, k);
      else if (k == "restarts") c.restarts = as<int>(v, k);
      else if (k == "domains") {
        if (!v.is_array()) config_error("'domains' must be an array");
        c.domains.clear();
        for (const auto& d : v) c.domains.push_back(domain_from_json(d));
      } else if (k == "ms") c.ms = as<std::vector<int>>(v, k);
      else if (k == "lambdas") c.lambdas = as<std::vector<double>>(v, k);
      else if (k == "layer") c.layer = as<double>(v, k);
      else if (k == "exponent_tol") c.exponent_tol = as<double>(v, k);
      else if (k == "psi") c.psi = as<std::string>(v, k);
      else if (k == "sign") {
        c.sign = as<std::string>(v, k);
        if (c.sign != "plus" && c.sign != "minus") config_error("sign must be 'plus' or 'minus'");
      } else if (k == "term") c.term = term_from_json(v);
      else if (k == "schedule") {
        if (!v.is_object()) config_error("'schedule' must be an object");
        for (const auto& [sk, sv] : v.items()) {
          if (sk == "a0") c.a0 = as<double>(sv, sk);
          else if (sk == "count") c.schedule_count = as<int>(sv, sk);
          else if (sk == "ratio") c.ratio = as<double>(sv, sk);
          else config_error("unknown key 'schedule." + sk + "'");
        }
      } else if (k == "origins") {
        c.origins = as<std::vector<std::string>>(v, k);
        for (const auto& o : c.origins) {
          if (o != "plus" && o != "minus") config_error("origins must be 'plus' or 'minus'");
        }
      } else if (k == "extrapolation_k") c.extrapolation_k = as<int>(v, k);
      else if (k == "bifurcation_tol") c.bifurcation_tol = as<double>(v, k);
      else if (k == "mu_ceiling") c.mu_ceiling = as<double>(v, k);
      else config_error("unknown key '" + k + "'");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigParseError) throw;
    config_error(e.what());
  }
  if (c.kernel.dim() != c.domain.dim()) config_error("kernel and domain dimensions differ");
  if (c.n < 8) config_error("n must be at least 8");
  if (!(c.tol > 0.0) || c.maxit < 1 || c.trials < 0 || c.count < 1 || c.restarts < 0) {
    config_error("tolerances and counts must be positive");
  }
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["kernel"] = to_json(c.kernel);
  j["domain"] = to_json(c.domain);
  j["n"] = c.n;
  j["placement"] = c.placement == Placement::Margin ? "margin" : "staggered";
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["maxit"] = c.maxit;
  j["mu"] = c.mu;
  j["f"] = to_json(c.f);
  j["trials"] = c.trials;
  j["mu_fraction"] = c.mu_fraction;
  j["count"] = c.count;
  j["epsilons"] = c.epsilons;
  j["mu_grid"] = c.mu_grid;
  j["restarts"] = c.restarts;
  j["domains"] = Json::array();
  for (const auto& d : c.domains) j["domains"].push_back(to_json(d));
  j["ms"] = c.ms;
  j["lambdas"] = c.lambdas;
  j["layer"] = c.layer;
  j["exponent_tol"] = c.exponent_tol;
  j["psi"] = c.psi;
  j["sign"] = c.sign;
  j["term"] = {{"kind", c.term.kind == TermKind::Cubic ? "cubic" : "power"}, {"c", c.term.c}, {"p", c.term.p}};
  j["schedule"] = {{"a0", c.a0}, {"count", c.schedule_count}, {"ratio", c.ratio}};
  j["origins"] = c.origins;
  j["extrapolation_k"] = c.extrapolation_k;
  j["bifurcation_tol"] = c.bifurcation_tol;
  if (c.mu_ceiling) j["mu_ceiling"] = *c.mu_ceiling;
  return j;
}

// ---------------------------------------------------------------------------
// verify-all

std::vector<VerifyResult> verify_all(const ExperimentConfig& cfg, std::ostream* progress) {
  if (cfg.kernel.dim() != 1 || !std::holds_alternative<Interval>(cfg.domain.shape())) {
    throw Error(ErrorCode::UnsupportedVariant, "verify-all runs on an interval");
  }
  const FractionalOrder order = cfg.kernel.order();
  const EllipticityBounds bounds = cfg.kernel.bounds();
  const Interval iv = std::get<Interval>(cfg.domain.shape());
  const KernelClass star = KernelClass::star(order, 1, bounds);
  const GridPtr grid = build_grid(cfg.domain, cfg.n);
  const Discretization disc(star, grid);
  const BellmanOperator op(disc);
  std::vector<VerifyResult> out;
  const auto record = [&](std::string name, bool ok, std::string detail) {
    if (progress) *progress << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    out.push_back({std::move(name), ok, std::move(detail)});
  };
  const auto fmt = [](double x) { return format_real(x); };
  const auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      record(name, false, e.what());
    }
  };

  const EigenReport plus = krein_rutman(op, Cone::Positive, {cfg.tol, 1000, std::nullopt});
  const EigenReport minus = krein_rutman(op, Cone::Negative, {cfg.tol, 1000, std::nullopt});
  const double lp = plus.pair.value;
  const double lm = minus.pair.value;

  guarded("degenerate class", [&] {
    const KernelClass one = KernelClass::star(order, 1, EllipticityBounds(bounds.lambda, bounds.lambda));
    const BellmanOperator o1 = BellmanOperator::from_class(one, grid);
    const double a = krein_rutman(o1, Cone::Positive).pair.value;
    const double b = krein_rutman(o1, Cone::Negative).pair.value;
    const double c = linear_principal_eigen(assemble_linear(one.constant_density(bounds.lambda), one, grid)).first;
    const double worst = std::max(rel(a, c), rel(b, c));
    record("degenerate class", worst <= 1e-8, "max relative gap " + fmt(worst));
  });

  guarded("ordering chain", [&] {
    const KernelClass fam = KernelClass::finite(order, 1, bounds, sample_kernels(star, 4, cfg.seed));
    const BellmanOperator bel(disc.with_class(fam));
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst = 0.0;
    double dual = 0.0;
    double scale = 1.0;
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXd v(grid->interior_size());
      for (auto& x : v) x = unit(rng);
      const GridFunction u = GridFunction::from_interior(grid, v);
      const Eigen::VectorXd m0 = apply_extremal(disc, u, Extremal::MminusFull).value.interior_values();
      const Eigen::VectorXd ms = apply_extremal(disc, u, Extremal::MminusStar).value.interior_values();
      const Eigen::VectorXd iu = bel.apply(u);
      const Eigen::VectorXd ps = apply_extremal(disc, u, Extremal::MplusStar).value.interior_values();
      const Eigen::VectorXd p0 = apply_extremal(disc, u, Extremal::MplusFull).value.interior_values();
      worst = std::min({worst, (ms - m0).minCoeff(), (iu - ms).minCoeff(), (ps - iu).minCoeff(), (p0 - ps).minCoeff()});
      scale = std::max({scale, p0.cwiseAbs().maxCoeff(), m0.cwiseAbs().maxCoeff()});
      const GridFunction neg = GridFunction::from_interior(grid, -v);
      const GridFunction twice = GridFunction::from_interior(grid, 2.0 * v);
      dual = std::max({dual, (apply_extremal(disc, neg, Extremal::MplusStar).value.interior_values() + ms).cwiseAbs().maxCoeff(),
                       (apply_extremal(disc, neg, Extremal::MplusFull).value.interior_values() + m0).cwiseAbs().maxCoeff(),
                       (apply_extremal(disc, twice, Extremal::MplusStar).value.interior_values() - 2.0 * ps).cwiseAbs().maxCoeff()});
    }
    record("ordering chain", worst >= -1e-12, "worst slack " + fmt(worst));
    record("duality and homogeneity", dual <= 1e-13 * scale, "max relative defect " + fmt(dual / scale));
  });

  guarded("sandwich", [&] {
    const ProbeReport r = sandwich_test(star, grid, cfg.count, cfg.seed);
    record("sandwich", r.passed() && lp < lm, "slack " + fmt(r.worst_margin));
  });

  guarded("simplicity", [&] {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    double dv = 0.0, df = 0.0;
    for (const EigenReport* ref : {&plus, &minus}) {
      const double sign = ref->pair.cone == Cone::Positive ? 1.0 : -1.0;
      for (int t = 0; t < 10; ++t) {
        Eigen::VectorXd v(grid->interior_size());
        for (auto& x : v) x = sign * unit(rng);
        EigenOptions o{cfg.tol, 1000, GridFunction::from_interior(grid, v)};
        const EigenReport e = krein_rutman(op, ref->pair.cone, o);
        dv = std::max(dv, rel(e.pair.value, ref->pair.value));
        df = std::max(df, (e.pair.eigenfunction.interior_values() - ref->pair.eigenfunction.interior_values())
                              .cwiseAbs()
                              .maxCoeff());
      }
    }
    record("simplicity", dv <= 1e-8 && df <= 1e-6, "value gap " + fmt(dv) + ", function gap " + fmt(df));
  });

  guarded("scaling law", [&] {
    const double mid = 0.5 * (iv.a + iv.b);
    const double half = 0.5 * (iv.b - iv.a);
    double worst = 0.0;
    for (double s : {0.3, 0.5, 0.7}) {
      const KernelClass c = KernelClass::star(FractionalOrder(s), 1, bounds);
      const double l1 = krein_rutman(c, build_grid(cfg.domain, cfg.n), Cone::Positive).pair.value;
      const double l2 =
          krein_rutman(c, build_grid(DomainSpec::interval(mid - 2 * half, mid + 2 * half), cfg.n), Cone::Positive)
              .pair.value;
      worst = std::max(worst, rel(l2 / l1, std::pow(2.0, -2.0 * s)));
    }
    record("scaling law", worst <= 0.02, "worst relative error " + fmt(worst));
  });

  guarded("domain monotonicity and continuity", [&] {
    const ProbeReport r = continuity_sweep(star, iv, {4, 8, 16, 32}, cfg.n);
    record("domain monotonicity and continuity", r.passed(), std::to_string(r.violations) + " violations");
  });

  guarded("maximum principle", [&] {
    const ProbeReport r = maximum_principle_probe(star, grid, cfg.mu_fraction * lp, cfg.trials, cfg.seed);
    record("maximum principle", r.passed(), std::to_string(r.violations) + " violations in " + std::to_string(r.trials));
  });

  guarded("boundary behaviour", [&] {
    const GridPtr fine = build_grid(cfg.domain, 1025);
    std::string detail;
    bool ok = true;
    for (double s : {0.3, 0.5, 0.7}) {
      const KernelClass c = KernelClass::star(FractionalOrder(s), 1, bounds);
      const EigenReport e = krein_rutman(c, fine, Cone::Positive);
      const BoundaryFit fit = boundary_fit(e.pair.eigenfunction, cfg.domain, FractionalOrder(s), cfg.layer);
      ok = ok && std::abs(fit.exponent - s) <= cfg.exponent_tol && fit.c1 > 0.0;
      detail += "s=" + fmt(s) + " exponent " + fmt(fit.exponent) + "; ";
    }
    record("boundary behaviour", ok, detail);
  });

  guarded("anti-maximum principle", [&] {
    const GridFunction f = sample_shape(cfg.f, grid);
    const ProbeReport r = anti_maximum_probe(star, grid, f, {0.01}, cfg.seed);
    record("anti-maximum principle", r.passed(), std::to_string(r.violations) + " violations");
  });

  guarded("isolation", [&] {
    const ProbeReport mid = isolation_probe(star, grid, {0.5 * (lp + lm)}, 20, cfg.seed);
    const ProbeReport at = isolation_probe(star, grid, {lp, lm}, 4, cfg.seed);
    record("isolation", lp < lm && mid.passed() && at.passed(),
           std::to_string(mid.violations + at.violations) + " violations");
  });

  guarded("bifurcation", [&] {
    bool ok = true;
    std::string detail;
    for (const EigenReport* e : {&plus, &minus}) {
      const Branch b = continue_branch(op, e->pair, NonlinearTerm::cubic(1.0), amplitude_schedule());
      const double mu_star = detect_bifurcation(b, 2);
      ok = ok && b.status == BranchStatus::Completed && std::abs(mu_star - e->pair.value) <= 1e-4 * e->pair.value;
      if (e == &plus && lp < lm) {
        for (const auto& p : b.points) ok = ok && p.u.interior_values().minCoeff() > 0.0;
      }
      detail += "mu* " + fmt(mu_star) + "; ";
    }
    record("bifurcation", ok, detail);
  });

  guarded("self-convergence", [&] {
    std::vector<double> v;
    for (int n : {129, 257, 513}) {
      v.push_back(krein_rutman(star, build_grid(cfg.domain, n, Placement::Staggered), Cone::Positive).pair.value);
    }
    const double order_est = std::log2(std::abs(v[1] - v[0]) / std::abs(v[2] - v[1]));
    record("self-convergence", order_est >= 1.0, "empirical order " + fmt(order_est));
  });
  return out;
}

// ---------------------------------------------------------------------------
// run

int run(const std::string& command, const std::string& target, bool ellipticity, const ExperimentConfig& cfg,
        const std::filesystem::path& out, std::ostream& log) {
  Artifacts art;
  bool passed = true;
  Json report;
  report["command"] = command;
  if (!target.empty()) report["target"] = target;
  report["config"] = to_json(cfg);
  try {
    const GridPtr grid = build_grid(cfg.domain, cfg.n, cfg.placement);
    const KernelClass& cls = cfg.kernel;
    const auto eigenpairs = [&] {
      const BellmanOperator op = BellmanOperator::from_class(cls, grid);
      return std::pair{krein_rutman(op, Cone::Positive, {cfg.tol, 1000, std::nullopt}),
                       krein_rutman(op, Cone::Negative, {cfg.tol, 1000, std::nullopt})};
    };
    const auto probe = [&](const ProbeReport& r, bool ok) {
      passed = ok;
      report["probe"] = probe_json(r, ok);
      art.csv("trials.csv", r);
    };
    const std::string kind = command == "probe" ? target : command;

    if (command == "solve") {
      DirichletProblem p = make_problem(cls, grid, cfg.mu, sample_shape(cfg.f, grid));
      SolveReport r = solve_bellman_dirichlet(p, {cfg.tol, cfg.maxit, std::nullopt});
      std::string method = "policy-iteration";
      if (!r.converged()) {
        r = solve_semismooth(p, GridFunction(grid), {cfg.tol, 2 * cfg.maxit, 1.0});
        method = "semismooth";
      }
      passed = r.converged();
      report["solve"] = to_json(r);
      report["method"] = method;
      art.csv("solution.csv", r.u);
    } else if (command == "eig") {
      const auto [p, m] = eigenpairs();
      report["lambda_plus"] = p.pair.value;
      report["lambda_minus"] = m.pair.value;
      report["residuals"] = {{"plus", p.residual_inf}, {"minus", m.residual_inf}};
      report["iterations"] = {{"plus", p.iterations}, {"minus", m.iterations}};
      report["plus"] = to_json(p);
      report["minus"] = to_json(m);
      art.csv("eigenfunction_plus.csv", p.pair.eigenfunction);
      art.csv("eigenfunction_minus.csv", m.pair.eigenfunction);
    } else if (command == "certify") {
      if (cfg.psi.empty()) throw Error(ErrorCode::ConfigParseError, "certify needs 'psi'");
      std::ifstream in(cfg.psi);
      if (!in) throw Error(ErrorCode::ConfigParseError, "cannot open " + cfg.psi);
      const GridFunction psi = read_csv(in, grid);
      const CertificateSign sign = cfg.sign == "plus" ? CertificateSign::Plus : CertificateSign::Minus;
      const BellmanOperator op = BellmanOperator::from_class(cls, grid);
      const Certificate c = certify(op, psi, cfg.mu, sign);
      passed = c.valid;
      report["certificate"] = to_json(c);
      report["largest_certified_mu"] = certified_bound(op, psi, sign);
    } else if (kind == "sandwich") {
      const ProbeReport r = sandwich_test(cls, grid, cfg.count, cfg.seed);
      probe(r, r.passed());
    } else if (kind == "sweep") {
      if (ellipticity) {
        const ProbeReport r = ellipticity_sweep(cls, grid, cfg.lambdas.empty() ? default_lambdas(cls) : cfg.lambdas);
        probe(r, r.passed());
      } else if (!cfg.domains.empty()) {
        const ProbeReport r = domain_sweep(cls, cfg.domains, cfg.n);
        probe(r, r.passed());
      } else if (const auto* iv = std::get_if<Interval>(&cfg.domain.shape())) {
        const ProbeReport r = continuity_sweep(cls, *iv, cfg.ms, cfg.n);
        probe(r, r.passed());
      } else {
        throw Error(ErrorCode::ConfigParseError, "sweep needs 'domains' or an interval domain");
      }
    } else if (kind == "max") {
      const auto lp = krein_rutman(BellmanOperator::from_class(cls, grid), Cone::Positive).pair.value;
      const ProbeReport r = maximum_principle_probe(cls, grid, cfg.mu_fraction * lp, cfg.trials, cfg.seed);
      report["lambda_plus"] = lp;
      probe(r, r.passed());
    } else if (kind == "antimax") {
      if (cfg.epsilons.empty()) throw Error(ErrorCode::ConfigParseError, "'epsilons' is empty");
      const ProbeReport r = anti_maximum_probe(cls, grid, sample_shape(cfg.f, grid), cfg.epsilons, cfg.seed);
      const double smallest = *std::min_element(cfg.epsilons.begin(), cfg.epsilons.end());
      bool ok = true;
      std::map<double, bool> uniform;
      for (const auto& d : r.details) {
        const double eps = d.values.at("eps");
        if (!uniform.count(eps)) uniform[eps] = true;
        if (d.violation) uniform[eps] = false;
        if (d.violation && eps == smallest) ok = false;
      }
      double eta = 0.0;
      for (const auto& [eps, u] : uniform) {
        if (!u) break;
        eta = eps;
      }
      report["empirical_eta"] = eta;
      probe(r, ok);
    } else if (kind == "isolation") {
      std::vector<double> grid_mu = cfg.mu_grid;
      if (grid_mu.empty()) {
        const auto [p, m] = eigenpairs();
        grid_mu = {-1.0, p.pair.value, 0.5 * (p.pair.value + m.pair.value), m.pair.value};
        report["window"] = isolation_window(p.pair.value, m.pair.value);
      }
      const ProbeReport r = isolation_probe(cls, grid, grid_mu, cfg.restarts, cfg.seed);
      probe(r, r.passed());
    } else if (kind == "boundary") {
      const EigenReport e = krein_rutman(BellmanOperator::from_class(cls, grid), Cone::Positive);
      const BoundaryFit fit = boundary_fit(e.pair.eigenfunction, cfg.domain, cls.order(), cfg.layer);
      ProbeReport r;
      r.name = "boundary";
      r.seed = cfg.seed;
      TrialRecord rec;
      rec.values = {{"exponent", fit.exponent}, {"c1", fit.c1}, {"C", fit.C}, {"r2", fit.r2}};
      rec.violation = !(std::abs(fit.exponent - cls.order().value()) <= cfg.exponent_tol && fit.c1 > 0.0);
      r.worst_margin = cfg.exponent_tol - std::abs(fit.exponent - cls.order().value());
      r.add(rec);
      report["fit"] = to_json(fit);
      probe(r, r.passed());
    } else if (command == "bifurcate") {
      if (cls.variant() != Variant::Star) throw Error(ErrorCode::ConfigParseError, "bifurcate needs a star class");
      const BellmanOperator op = BellmanOperator::from_class(cls, grid);
      const auto [p, m] = eigenpairs();
      ContinuationOptions copt{cfg.tol, 50, cfg.mu_ceiling};
      const auto schedule = amplitude_schedule(cfg.a0, cfg.schedule_count, cfg.ratio);
      report["branches"] = Json::array();
      for (const auto& o : cfg.origins) {
        const EigenReport& e = o == "plus" ? p : m;
        const Branch b = continue_branch(op, e.pair, cfg.term, schedule, copt);
        Json bj = to_json(b);
        bool ok = b.status == BranchStatus::Completed;
        if (static_cast<int>(b.points.size()) > cfg.extrapolation_k) {
          const double mu_star = detect_bifurcation(b, cfg.extrapolation_k);
          bj["mu_star"] = mu_star;
          ok = ok && std::abs(mu_star - e.pair.value) <= cfg.bifurcation_tol * e.pair.value;
        } else {
          ok = false;
        }
        if (!b.points.empty()) {
          bj["direction"] = b.points.back().mu > e.pair.value ? "increasing" : "decreasing";
        }
        if (o == "plus" && p.pair.value < m.pair.value) {
          bool positive = true;
          for (const auto& pt : b.points) positive = positive && pt.u.interior_values().minCoeff() > 0.0;
          bj["positive"] = positive;
          ok = ok && positive;
        }
        bj["passed"] = ok;
        passed = passed && ok;
        report["branches"].push_back(bj);
        art.csv("branch_" + o + ".csv", b);
      }
    } else if (command == "verify-all") {
      const auto results = verify_all(cfg, &log);
      Json rows = Json::array();
      std::string table = "property,result,detail\n";
      for (const auto& r : results) {
        rows.push_back({{"property", r.property}, {"passed", r.passed}, {"detail", r.detail}});
        table += r.property + "," + (r.passed ? "PASS" : "FAIL") + ",\"" + r.detail + "\"\n";
        passed = passed && r.passed;
      }
      report["summary"] = rows;
      art.files["summary.csv"] = table;
    } else {
      throw Error(ErrorCode::ConfigParseError, "unknown command '" + command + (target.empty() ? "" : " " + target) + "'");
    }
  } catch (const Error& e) {
    log << e.what() << "\n";
    if (e.code() == ErrorCode::ConfigParseError) return ExitConfig;
    report["error"] = e.what();
    passed = false;
  }
  report["passed"] = passed;
  art.json("report.json", report);
  art.flush(out);
  log << (passed ? "PASS" : "FAIL") << " " << command << (target.empty() ? "" : " " + target) << "\n";
  return passed ? ExitSuccess : ExitAssertion;
}

}  // namespace demi
