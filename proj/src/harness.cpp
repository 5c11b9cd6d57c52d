#include "latlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace latlab {

namespace {

constexpr int kSchemaVersion = 1;

// triangular-lattice basis (columns are the generators)
const double kTriangularBasis[4] = {1.0, 0.5, 0.0, 0.8660254037844386};

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) body(i);
    });
  for (auto& th : pool) th.join();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string classification_name(StabilityClass c) {
  switch (c) {
    case StabilityClass::stable: return "stable";
    case StabilityClass::unstable: return "unstable";
    default: return "marginal";
  }
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.experiment = j.value("experiment", "converge");
  cfg.dim = j.value("dim", 1);
  if (j.contains("epsilon_list"))
    cfg.epsilon_list = j.at("epsilon_list").get<std::vector<double>>();
  for (std::size_t i = 0; i + 1 < cfg.epsilon_list.size(); ++i)
    if (!(cfg.epsilon_list[i] > cfg.epsilon_list[i + 1]))
      throw std::invalid_argument("epsilon_list must be strictly decreasing");
  for (double e : cfg.epsilon_list)
    if (!(e > 0.0 && e <= 1.0))
      throw std::invalid_argument("epsilon values must lie in (0,1]");
  cfg.gamma = j.value("gamma", 2.0);
  if (cfg.gamma < 0.5 * cfg.dim - 1e-12 || cfg.gamma > 2.0 + 1e-12)
    throw std::invalid_argument("gamma must lie in [d/2, 2]");
  if (j.contains("perturbation")) {
    cfg.f_perturbation_scale = j["perturbation"].value("f_scale", 0.0);
    cfg.g_perturbation_scale = j["perturbation"].value("g_scale", 0.0);
  }
  cfg.seed = j.value("seed", 1ULL);
  cfg.grid_resolution = j.value("grid", 64);
  cfg.refinement_passes = j.value("refine", 3);
  cfg.method = j.value("method", "fixed_point");
  cfg.solve_tol = j.value("tol", 1e-10);
  cfg.override_hypothesis = j.value("override_hypothesis", false);
  cfg.r1 = j.value("r1", 1.0);
  cfg.r2 = j.value("r2", 1.0);
  cfg.threads = j.value("threads", 1);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return parse_config(j);
}

std::shared_ptr<const DomainShape> build_shape(const json& spec) {
  const std::string kind = spec.value("shape", "box");
  if (kind == "interval") {
    return std::make_shared<BoxShape>(1, Vec{spec.value("lo", 0.0), 0.0, 0.0},
                                      Vec{spec.value("hi", 1.0), 0.0, 0.0});
  }
  if (kind == "box") {
    const auto lo = spec.at("lo").get<std::vector<double>>();
    const auto hi = spec.at("hi").get<std::vector<double>>();
    const int d = static_cast<int>(lo.size());
    Vec l{}, h{};
    for (int i = 0; i < d; ++i) {
      l[i] = lo[i];
      h[i] = hi[i];
    }
    return std::make_shared<BoxShape>(d, l, h);
  }
  if (kind == "ball") {
    const auto c = spec.at("center").get<std::vector<double>>();
    Vec cv{};
    for (std::size_t i = 0; i < c.size(); ++i) cv[i] = c[i];
    return std::make_shared<BallShape>(static_cast<int>(c.size()), cv,
                                       spec.at("radius").get<double>());
  }
  if (kind == "polygon") {
    std::vector<std::array<double, 2>> verts;
    for (const auto& v : spec.at("vertices"))
      verts.push_back({v[0].get<double>(), v[1].get<double>()});
    return std::make_shared<PolygonShape>(std::move(verts));
  }
  throw std::invalid_argument("unknown domain shape: " + kind);
}

InteractionStencil build_stencil(const json& spec) {
  const std::string name = spec.value("stencil", "nearest_neighbor");
  if (name == "nearest_neighbor") return InteractionStencil::nearest_neighbor(spec.value("dim", 1));
  if (name == "triangular") return InteractionStencil::triangular();
  if (name == "square_with_diagonals") return InteractionStencil::square_with_diagonals();
  if (name == "explicit") {
    std::vector<IVec> dirs;
    for (const auto& v : spec.at("directions")) {
      IVec iv{};
      for (std::size_t i = 0; i < v.size(); ++i) iv[i] = v[i].get<int>();
      dirs.push_back(iv);
    }
    return InteractionStencil(spec.value("dim", 1), dirs);
  }
  throw std::invalid_argument("unknown stencil: " + name);
}

namespace {

PairPotential build_pair(const json& spec) {
  const std::string name = spec.value("pair", "lennard_jones");
  if (name == "lennard_jones") return PairPotential::lennard_jones();
  if (name == "harmonic")
    return PairPotential::harmonic_scaled(spec.value("k", 1.0), spec.value("a", 1.0));
  if (name == "morse")
    return PairPotential::morse(spec.value("de", 1.0), spec.value("a", 1.0),
                                spec.value("re", 1.0));
  throw std::invalid_argument("unknown pair potential: " + name);
}

}  // namespace

std::unique_ptr<SitePotential> build_potential(const json& spec) {
  const std::string kind = spec.value("kind", "pair_sum");
  std::unique_ptr<SitePotential> w;
  if (kind == "pair_sum") {
    w = std::make_unique<PairSumPotential>(build_stencil(spec), build_pair(spec),
                                           spec.value("floor", 1e-3));
  } else if (kind == "ft_mass_spring") {
    w = make_ft_mass_spring(spec.value("k1", 1.0), spec.value("k2", 1.0),
                            spec.value("a1", 1.0), spec.value("a2", std::sqrt(2.0)));
  } else if (kind == "quadratic_form") {
    InteractionStencil st = build_stencil(spec);
    const auto a0 = spec.at("A0").get<std::vector<double>>();
    const BondMatrix bonds = bonds_from_matrix(st, a0.data());
    auto kmat = spec.at("K").get<std::vector<double>>();
    w = std::make_unique<QuadraticFormPotential>(std::move(st), std::move(kmat), bonds);
  } else {
    throw std::invalid_argument("unknown potential kind: " + kind);
  }
  if (spec.contains("admissible_radius"))
    w->set_admissible_radius(spec["admissible_radius"].get<double>());
  return w;
}

ManufacturedDeformation build_solution(const json& spec, int dim) {
  const auto a0 = spec.at("A0").get<std::vector<double>>();
  if (static_cast<int>(a0.size()) != dim * dim)
    throw std::invalid_argument("A0 must be a d x d row-major list");
  const double delta = spec.value("delta", 0.0);
  const std::string family = spec.value("family", "trigonometric");
  if (family == "trigonometric") {
    Vec coef{};
    IVec freq{};
    const auto cs = spec.value("coef", std::vector<double>(dim, 1.0));
    const auto fs = spec.value("freq", std::vector<int>(dim, 1));
    for (int i = 0; i < dim; ++i) {
      coef[i] = i < static_cast<int>(cs.size()) ? cs[i] : 0.0;
      freq[i] = i < static_cast<int>(fs.size()) ? fs[i] : 1;
    }
    return ManufacturedDeformation::trigonometric(dim, a0.data(), coef, freq, delta);
  }
  if (family == "polynomial") {
    std::vector<ManufacturedDeformation::Monomial> terms;
    for (const auto& t : spec.at("terms")) {
      ManufacturedDeformation::Monomial m;
      m.component = t.at("component").get<int>();
      m.coef = t.at("coef").get<double>();
      const auto ps = t.at("powers").get<std::vector<int>>();
      for (std::size_t i = 0; i < ps.size(); ++i) m.powers[i] = ps[i];
      terms.push_back(m);
    }
    return ManufacturedDeformation::polynomial(dim, a0.data(), std::move(terms), delta);
  }
  throw std::invalid_argument("unknown solution family: " + family);
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& rows) {
  RateFit fit;
  std::vector<std::pair<double, double>> pts;
  for (const auto& [eps, err] : rows) {
    if (err > 0.0)
      pts.emplace_back(std::log(eps), std::log(err));
    else
      fit.note += fit.note.empty() ? "nonpositive errors excluded" : "";
  }
  if (pts.size() < 3) {
    if (pts.empty() && !rows.empty()) throw std::runtime_error("insufficient data for rate");
    throw std::runtime_error("insufficient data for rate");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(pts.size());
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& [x, y] : pts) {
    const double pred = fit.slope * x + fit.intercept;
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - sy / n) * (y - sy / n);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.done = true;
  return fit;
}

namespace {

// ell^2 norm of the base-point residual -f_tilde - div DW(D base)
double base_residual_l2(const LatticeDomain& dom, const SitePotential& w,
                        const DiscreteField& base, const DiscreteField& f_tilde) {
  const int d = dom.dim();
  const int m = dom.stencil().size();
  BondField M(dom);
  for (std::size_t r = 0; r < dom.semi_interior().size(); ++r) {
    const BondMatrix B = discrete_gradient(base, dom.semi_interior()[r]);
    const std::vector<double> g = w.derivatives(B, 1);
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < d; ++j) M.entry(static_cast<int>(r), a)[j] = g[a * d + j];
  }
  DiscreteField res(dom, Support::interior_only);
  for (int idx : dom.interior()) {
    const Vec div = discrete_divergence(M, idx);
    for (int j = 0; j < d; ++j) res.at(idx)[j] = -f_tilde.at(idx)[j] - div[j];
  }
  return lattice_norm(res, NormKind::l2_interior);
}

// perturbation direction with the exact target norm under `measure`
DiscreteField scaled_perturbation(const LatticeDomain& dom, Support support,
                                  const std::vector<int>& carrier, unsigned long long seed,
                                  double target,
                                  const std::function<double(const DiscreteField&)>& measure) {
  DiscreteField f(dom, support);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int idx : carrier)
    for (int j = 0; j < dom.dim(); ++j) f.at(idx)[j] = gauss(rng);
  const double raw = measure(f);
  if (raw == 0.0) return f;
  const double s = target / raw;
  for (double& x : f.values) x *= s;
  return f;
}

// One fully assembled boundary-value problem at a given spacing. The domain
// lives on the heap because AtomisticProblem keeps a pointer to it.
struct AssembledCase {
  std::unique_ptr<LatticeDomain> dom;
  DiscreteField base;
  AtomisticProblem prob;
  IFTConstants consts;
};

AssembledCase assemble_case(const ExperimentConfig& cfg,
                            const std::shared_ptr<const DomainShape>& shape,
                            const SitePotential& w, const ManufacturedDeformation& y,
                            const Mollifier& eta, double lambda, double eps,
                            std::size_t row_index) {
  const int d = shape->dim();
  const double eg = std::pow(eps, cfg.gamma);
  AssembledCase c;
  c.dom = std::make_unique<LatticeDomain>(shape, eps, w.stencil());
  const LatticeDomain& dom = *c.dom;
  c.base = sample_mollified(y, eta, dom);

  DiscreteField f_tilde(dom, Support::interior_only);
  for (int idx : dom.interior()) {
    const Vec f = body_force_cell_average(w, y, eps, dom.position(idx));
    for (int j = 0; j < d; ++j) f_tilde.at(idx)[j] = f[j];
  }

  DiscreteField f_atom = f_tilde;
  if (cfg.f_perturbation_scale > 0.0) {
    const DiscreteField pert = scaled_perturbation(
        dom, Support::interior_only, dom.interior(),
        cfg.seed * 1000003ULL + 2 * row_index, cfg.f_perturbation_scale * eg,
        [](const DiscreteField& f) { return lattice_norm(f, NormKind::h_minus1); });
    for (std::size_t k = 0; k < f_atom.values.size(); ++k)
      f_atom.values[k] += pert.values[k];
  }

  DiscreteField g_atom(dom, Support::all_points);
  for (int idx : dom.boundary_layer())
    for (int j = 0; j < d; ++j) g_atom.at(idx)[j] = c.base.at(idx)[j];
  if (cfg.g_perturbation_scale > 0.0) {
    const DiscreteField pert = scaled_perturbation(
        dom, Support::all_points, dom.boundary_layer(),
        cfg.seed * 1000003ULL + 2 * row_index + 1, cfg.g_perturbation_scale * eg,
        [](const DiscreteField& f) { return lattice_norm(f, NormKind::boundary_seminorm); });
    for (int idx : dom.boundary_layer())
      for (int j = 0; j < d; ++j) g_atom.at(idx)[j] += pert.at(idx)[j];
  }

  c.prob = assemble_problem(dom, w, c.base, std::move(g_atom), std::move(f_atom),
                            std::move(f_tilde), cfg.gamma);
  c.consts = ift_constants(c.prob, lambda, cfg.r1, cfg.r2);
  return c;
}

}  // namespace

ConvergenceReport run_convergence(const ExperimentConfig& cfg) {
  ConvergenceReport rep;
  rep.config_echo = cfg.raw;
  if (cfg.epsilon_list.size() < 1)
    throw std::invalid_argument("epsilon_list must not be empty");

  const auto shape = build_shape(cfg.raw.at("domain"));
  const auto potential = build_potential(cfg.raw.at("potential"));
  const int d = shape->dim();
  const ManufacturedDeformation y = build_solution(cfg.raw.at("solution"), d);
  const Mollifier eta(d);

  const LinearizationTensor K = linearize(*potential, y.base_gradient());
  const StabilityReport stab = lambda_atom(K, potential->stencil(), cfg.grid_resolution,
                                           cfg.refinement_passes);

  rep.rows.resize(cfg.epsilon_list.size());
  bool have_constants = false;
  for (std::size_t i = 0; i < cfg.epsilon_list.size(); ++i) {
    ConvergenceRow& row = rep.rows[i];
    row.eps = cfg.epsilon_list[i];
    try {
      const double eps = row.eps;
      const double eg = std::pow(eps, cfg.gamma);
      AssembledCase c = assemble_case(cfg, shape, *potential, y, eta,
                                      stab.lambda_atom_estimate, eps, i);
      const LatticeDomain& dom = *c.dom;

      SolveOptions opts;
      opts.tol = cfg.solve_tol;
      opts.constants = c.consts;
      opts.override_hypothesis = cfg.override_hypothesis;
      const SolveMethod method =
          cfg.method == "newton" ? SolveMethod::newton : SolveMethod::fixed_point;
      const SolveReport sr = solve_bvp(c.prob, method, opts);

      row.error_h1_vs_sy = sr.distance_to_base;
      DiscreteField exact(dom, Support::all_points);
      double yv[3];
      for (int idx = 0; idx < dom.num_points(); ++idx) {
        y.eval(dom.position(idx), 0, yv);
        for (int j = 0; j < d; ++j)
          exact.at(idx)[j] = sr.solution.at(idx)[j] - yv[j];
      }
      row.error_h1_vs_y = lattice_norm(exact, NormKind::h1);
      row.residual_l2 = base_residual_l2(dom, *potential, c.base, c.prob.f_tilde);
      row.iterations = sr.iterations;
      row.certified_min = certify_minimizer(c.prob, sr.solution);
      rep.k3_measured = std::max(rep.k3_measured, row.error_h1_vs_sy / eg);
      rep.constants = c.consts;
      have_constants = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }

  std::vector<std::pair<double, double>> pts_sy, pts_y;
  int successes = 0;
  bool any_positive = false;
  for (const auto& row : rep.rows)
    if (row.error.empty()) {
      ++successes;
      pts_sy.emplace_back(row.eps, row.error_h1_vs_sy);
      pts_y.emplace_back(row.eps, row.error_h1_vs_y);
      any_positive = any_positive || row.error_h1_vs_sy > 0.0;
    }
  if (successes < 3) throw std::runtime_error("insufficient data for rate");
  if (!any_positive) {
    rep.rate_vs_sy.note = "exact";
    rep.rate_vs_y.note = "exact";
  } else {
    rep.rate_vs_sy = fit_rate(pts_sy);
    rep.rate_vs_y = fit_rate(pts_y);
  }
  (void)have_constants;
  return rep;
}

json run_solve_once(const ExperimentConfig& cfg) {
  if (cfg.epsilon_list.empty())
    throw std::invalid_argument("epsilon_list must not be empty");
  const auto shape = build_shape(cfg.raw.at("domain"));
  const auto potential = build_potential(cfg.raw.at("potential"));
  const ManufacturedDeformation y = build_solution(cfg.raw.at("solution"), shape->dim());
  const Mollifier eta(shape->dim());

  const LinearizationTensor K = linearize(*potential, y.base_gradient());
  const StabilityReport stab = lambda_atom(K, potential->stencil(), cfg.grid_resolution,
                                           cfg.refinement_passes);
  const double eps = cfg.epsilon_list.front();
  AssembledCase c =
      assemble_case(cfg, shape, *potential, y, eta, stab.lambda_atom_estimate, eps, 0);

  SolveOptions opts;
  opts.tol = cfg.solve_tol;
  opts.constants = c.consts;
  opts.override_hypothesis = cfg.override_hypothesis;
  const SolveMethod method =
      cfg.method == "newton" ? SolveMethod::newton : SolveMethod::fixed_point;
  const SolveReport sr = solve_bvp(c.prob, method, opts);
  const double cert = certify_minimizer(c.prob, sr.solution);

  json consts = {{"A", c.consts.A},
                 {"M1", c.consts.M1},
                 {"M2", c.consts.M2},
                 {"M3", c.consts.M3},
                 {"M4", c.consts.M4},
                 {"r1", c.consts.r1},
                 {"r2", c.consts.r2},
                 {"lambda1", c.consts.lambda1},
                 {"lambda2", c.consts.lambda2},
                 {"rho_eps", c.consts.rho_eps},
                 {"tau_eps", c.consts.tau_eps},
                 {"hypothesis_ok", c.consts.hypothesis_ok}};
  return json{{"schema_version", kSchemaVersion},
              {"experiment", "solve"},
              {"config", cfg.raw},
              {"eps", eps},
              {"lambda_atom", stab.lambda_atom_estimate},
              {"ift_constants", consts},
              {"iterations", sr.iterations},
              {"contraction_estimates", sr.contraction_estimates},
              {"final_residual_hminus1", sr.final_residual_hminus1},
              {"distance_to_base", sr.distance_to_base},
              {"certified_min", cert}};
}

ResidualOrderReport run_residual_order(const ExperimentConfig& cfg) {
  ResidualOrderReport rep;
  rep.config_echo = cfg.raw;
  const auto shape = build_shape(cfg.raw.at("domain"));
  const auto potential = build_potential(cfg.raw.at("potential"));
  const int d = shape->dim();
  const ManufacturedDeformation y = build_solution(cfg.raw.at("solution"), d);
  const Mollifier eta(d);

  double prev = -1.0;
  for (double eps : cfg.epsilon_list) {
    ResidualOrderRow row;
    row.eps = eps;
    try {
      LatticeDomain dom(shape, eps, potential->stencil());
      const DiscreteField res = discrete_residual_field(*potential, y, eta, dom);
      row.residual_l2 = lattice_norm(res, NormKind::l2_interior);
      if (prev > 0.0 && row.residual_l2 > 0.0) row.ratio = prev / row.residual_l2;
      prev = row.residual_l2;
    } catch (const std::exception& e) {
      row.error = e.what();
      prev = -1.0;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

PhaseDiagramReport run_phase_diagram(const ExperimentConfig& cfg) {
  PhaseDiagramReport rep;
  rep.config_echo = cfg.raw;
  rep.family = cfg.raw.value("family", "triangular");

  const json sweep = cfg.raw.value("sweep", json::object());
  auto axis = [&](const char* key, double def_lo, double def_hi, int def_n) {
    std::vector<double> vals;
    const json a = sweep.value(key, json::object());
    const double lo = a.value("min", def_lo), hi = a.value("max", def_hi);
    const int n = a.value("count", def_n);
    for (int i = 0; i < n; ++i)
      vals.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1.0));
    return vals;
  };

  if (rep.family == "triangular") {
    rep.param1 = "t";
    rep.param2 = "";
    const PairPotential v = build_pair(cfg.raw.value("potential", json::object()));
    const InteractionStencil st = InteractionStencil::triangular();
    const std::vector<double> ts = axis("t", 0.9, 1.3, 21);

    auto eval_at = [&](double t) {
      double a0[4];
      for (int i = 0; i < 4; ++i) a0[i] = t * kTriangularBasis[i];
      PairSumPotential w(st, v, 1e-3);
      const LinearizationTensor K = linearize(w, a0);
      return lambda_atom(K, st, cfg.grid_resolution, cfg.refinement_passes);
    };

    rep.rows.resize(ts.size());
    parallel_for(static_cast<int>(ts.size()), cfg.threads, [&](int i) {
      const double t = ts[i];
      const StabilityReport s = eval_at(t);
      PhaseDiagramRow row;
      row.p1 = t;
      row.lambda_atom = s.lambda_atom_estimate;
      row.lambda_LH_tilde = s.lambda_LH_tilde;
      row.closed_form = closed_form_triangular(v, t);
      row.classification = classification_name(s.classification);
      row.minimizing_k = s.minimizing_k;
      rep.rows[i] = row;
    });

    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
      const bool s0 = rep.rows[i].lambda_atom > 0.0;
      const bool s1 = rep.rows[i + 1].lambda_atom > 0.0;
      if (s0 == s1) continue;
      double lo = rep.rows[i].p1, hi = rep.rows[i + 1].p1;
      while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if ((eval_at(mid).lambda_atom_estimate > 0.0) == s0)
          lo = mid;
        else
          hi = mid;
      }
      rep.boundary_estimates.push_back(0.5 * (lo + hi));
    }
    return rep;
  }

  if (rep.family == "ft_mass_spring") {
    rep.param1 = "alpha";
    rep.param2 = "kappa";
    const std::vector<double> alphas = axis("alpha", 0.05, 0.95, 20);
    const std::vector<double> kappas = axis("kappa", 0.1, 4.0, 20);

    auto eval_at = [&](double alpha, double kappa) {
      const double a1 = 1.0, k1 = 1.0;
      const double a2 = std::sqrt(2.0) * alpha * a1;
      const double k2 = kappa * k1;
      const auto w = make_ft_mass_spring(k1, k2, a1, a2);
      const FtStabilityRecord rec = ft_stability(k1, k2, a1, a2);
      double a0[4] = {rec.r_star, 0.0, 0.0, rec.r_star};
      const LinearizationTensor K = linearize(*w, a0);
      return std::make_pair(
          lambda_atom(K, w->stencil(), cfg.grid_resolution, cfg.refinement_passes), rec);
    };

    const int n1 = static_cast<int>(alphas.size());
    const int n2 = static_cast<int>(kappas.size());
    rep.rows.resize(std::size_t(n1) * n2);
    parallel_for(n1 * n2, cfg.threads, [&](int cell) {
      const int i = cell / n2, k = cell % n2;
      const auto [s, rec] = eval_at(alphas[i], kappas[k]);
      PhaseDiagramRow row;
      row.p1 = alphas[i];
      row.p2 = kappas[k];
      row.lambda_atom = s.lambda_atom_estimate;
      row.lambda_LH_tilde = s.lambda_LH_tilde;
      row.closed_form = rec.lambda_LH_tilde;
      row.classification = classification_name(s.classification);
      row.minimizing_k = s.minimizing_k;
      rep.rows[cell] = row;
    });

    for (int i = 0; i < n1; ++i) {
      double found = std::numeric_limits<double>::quiet_NaN();
      for (int k = 0; k + 1 < n2; ++k) {
        const bool s0 = rep.rows[std::size_t(i) * n2 + k].lambda_atom > 0.0;
        const bool s1 = rep.rows[std::size_t(i) * n2 + k + 1].lambda_atom > 0.0;
        if (s0 == s1) continue;
        double lo = kappas[k], hi = kappas[k + 1];
        while (hi - lo > 1e-3) {
          const double mid = 0.5 * (lo + hi);
          if ((eval_at(alphas[i], mid).first.lambda_atom_estimate > 0.0) == s0)
            lo = mid;
          else
            hi = mid;
        }
        found = 0.5 * (lo + hi);
        break;
      }
      rep.boundary_estimates.push_back(found);
    }
    return rep;
  }

  throw std::invalid_argument("unknown phase-diagram family: " + rep.family);
}

json to_json(const ConvergenceReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"eps", r.eps},
                    {"error_h1_vs_sy", r.error_h1_vs_sy},
                    {"error_h1_vs_y", r.error_h1_vs_y},
                    {"residual_l2", r.residual_l2},
                    {"iterations", r.iterations},
                    {"certified_min", r.certified_min},
                    {"error", r.error}});
  json fit_sy = {{"slope", rep.rate_vs_sy.slope},
                 {"r2", rep.rate_vs_sy.r2},
                 {"done", rep.rate_vs_sy.done},
                 {"note", rep.rate_vs_sy.note}};
  json fit_y = {{"slope", rep.rate_vs_y.slope},
                {"r2", rep.rate_vs_y.r2},
                {"done", rep.rate_vs_y.done},
                {"note", rep.rate_vs_y.note}};
  json consts = {{"A", rep.constants.A},           {"M1", rep.constants.M1},
                 {"M2", rep.constants.M2},         {"M3", rep.constants.M3},
                 {"M4", rep.constants.M4},         {"lambda1", rep.constants.lambda1},
                 {"lambda2", rep.constants.lambda2}, {"rho_eps", rep.constants.rho_eps},
                 {"tau_eps", rep.constants.tau_eps},
                 {"hypothesis_ok", rep.constants.hypothesis_ok}};
  return json{{"schema_version", kSchemaVersion}, {"experiment", "converge"},
              {"config", rep.config_echo},        {"rows", rows},
              {"fit_vs_sy", fit_sy},              {"fit_vs_y", fit_y},
              {"k3_measured", rep.k3_measured},   {"ift_constants", consts}};
}

json to_json(const ResidualOrderReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"eps", r.eps},
                    {"residual_l2", r.residual_l2},
                    {"ratio", r.ratio},
                    {"error", r.error}});
  return json{{"schema_version", kSchemaVersion},
              {"experiment", "residual_order"},
              {"config", rep.config_echo},
              {"rows", rows}};
}

json to_json(const PhaseDiagramReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row = {{rep.param1, r.p1},
                {"lambda_atom", r.lambda_atom},
                {"lambda_LH_tilde", r.lambda_LH_tilde},
                {"classification", r.classification},
                {"min_k", {r.minimizing_k[0], r.minimizing_k[1], r.minimizing_k[2]}}};
    if (!rep.param2.empty()) row[rep.param2] = r.p2;
    if (std::isfinite(r.closed_form)) row["closed_form"] = r.closed_form;
    rows.push_back(row);
  }
  json boundary = json::array();
  for (double b : rep.boundary_estimates) {
    if (std::isfinite(b))
      boundary.push_back(b);
    else
      boundary.push_back(nullptr);
  }
  return json{{"schema_version", kSchemaVersion},
              {"experiment", "phase_diagram"},
              {"family", rep.family},
              {"config", rep.config_echo},
              {"rows", rows},
              {"boundary_estimates", boundary}};
}

std::string to_csv(const ConvergenceReport& rep) {
  std::string out = "eps,error_h1_vs_sy,error_h1_vs_y,residual_l2,iterations,certified_min,error\n";
  for (const auto& r : rep.rows)
    out += fmt(r.eps) + "," + fmt(r.error_h1_vs_sy) + "," + fmt(r.error_h1_vs_y) + "," +
           fmt(r.residual_l2) + "," + std::to_string(r.iterations) + "," +
           fmt(r.certified_min) + "," + r.error + "\n";
  return out;
}

std::string to_csv(const ResidualOrderReport& rep) {
  std::string out = "eps,residual_l2,ratio,error\n";
  for (const auto& r : rep.rows)
    out += fmt(r.eps) + "," + fmt(r.residual_l2) + "," + fmt(r.ratio) + "," + r.error + "\n";
  return out;
}

std::string to_csv(const PhaseDiagramReport& rep) {
  std::string out = rep.param1;
  if (!rep.param2.empty()) out += "," + rep.param2;
  out += ",lambda_atom,lambda_LH_tilde,classification\n";
  for (const auto& r : rep.rows) {
    out += fmt(r.p1);
    if (!rep.param2.empty()) out += "," + fmt(r.p2);
    out += "," + fmt(r.lambda_atom) + "," + fmt(r.lambda_LH_tilde) + "," +
           r.classification + "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace latlab
