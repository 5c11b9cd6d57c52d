#include "latlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace latlab {

namespace {

DiscreteField field_sum(const DiscreteField& a, const DiscreteField& b) {
  DiscreteField out(*a.domain, Support::all_points);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = a.values[i] + b.values[i];
  return out;
}

// interior residual of -f - div DW(Dy) for a full deformation field
DiscreteField raw_residual(const LatticeDomain& dom, const SitePotential& w,
                           const DiscreteField& y, const DiscreteField& f) {
  const int d = dom.dim();
  const int m = dom.stencil().size();
  BondField M(dom);
  for (std::size_t r = 0; r < dom.semi_interior().size(); ++r) {
    const BondMatrix B = discrete_gradient(y, dom.semi_interior()[r]);
    const std::vector<double> g = w.derivatives(B, 1);
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < d; ++j) M.entry(static_cast<int>(r), a)[j] = g[a * d + j];
  }
  DiscreteField out(dom, Support::interior_only);
  for (int idx : dom.interior()) {
    const Vec div = discrete_divergence(M, idx);
    for (int j = 0; j < d; ++j) out.at(idx)[j] = -f.at(idx)[j] - div[j];
  }
  return out;
}

// largest |T[v,v,v]| of a symmetric n^3 tensor by higher-order power method
double third_order_norm(const std::vector<double>& T, int n) {
  bool all_zero = true;
  for (double t : T)
    if (t != 0.0) {
      all_zero = false;
      break;
    }
  if (all_zero) return 0.0;

  double best = 0.0;
  std::mt19937_64 rng(0x3d3d3dULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int start = 0; start < 3; ++start) {
    std::vector<double> v(n);
    for (double& x : v) x = gauss(rng);
    double nv = 0.0;
    for (double x : v) nv += x * x;
    for (double& x : v) x /= std::sqrt(nv);
    for (int it = 0; it < 200; ++it) {
      std::vector<double> w(n, 0.0);
      double lam = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double vij = v[i] * v[j];
          if (vij == 0.0) continue;
          const double* row = T.data() + (std::size_t(i) * n + j) * n;
          for (int k = 0; k < n; ++k) w[k] += row[k] * vij;
        }
      for (int k = 0; k < n; ++k) lam += w[k] * v[k];
      best = std::max(best, std::abs(lam));
      double nw = 0.0;
      for (double x : w) nw += x * x;
      nw = std::sqrt(nw);
      if (nw == 0.0) break;
      const double sgn = lam >= 0.0 ? 1.0 : -1.0;
      for (int k = 0; k < n; ++k) v[k] = sgn * w[k] / nw;
    }
  }
  return best;
}

}  // namespace

AtomisticProblem assemble_problem(const LatticeDomain& dom, const SitePotential& w,
                                  DiscreteField base_point, DiscreteField g_atom,
                                  DiscreteField f_atom, DiscreteField f_tilde,
                                  double gamma) {
  AtomisticProblem p;
  p.domain = &dom;
  p.potential = &w;
  p.base_point = std::move(base_point);
  p.g_atom = std::move(g_atom);
  p.f_atom = std::move(f_atom);
  p.f_tilde = std::move(f_tilde);
  p.gamma = gamma;

  const int d = dom.dim();
  DiscreteField mismatch(dom, Support::all_points);
  for (int idx : dom.boundary_layer())
    for (int j = 0; j < d; ++j)
      mismatch.at(idx)[j] = p.g_atom.at(idx)[j] - p.base_point.at(idx)[j];
  p.boundary_lift = harmonic_extension(mismatch);
  p.g_mismatch_seminorm = lattice_norm(p.boundary_lift, NormKind::h1);

  DiscreteField df(dom, Support::interior_only);
  for (int idx : dom.interior())
    for (int j = 0; j < d; ++j) df.at(idx)[j] = p.f_atom.at(idx)[j] - p.f_tilde.at(idx)[j];
  p.f_mismatch_hminus1 = lattice_norm(df, NormKind::h_minus1);
  return p;
}

DiscreteField total_deformation(const AtomisticProblem& p, const DiscreteField& u) {
  DiscreteField y = field_sum(p.base_point, p.boundary_lift);
  for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += u.values[i];
  return y;
}

DiscreteField residual(const AtomisticProblem& p, const DiscreteField& u) {
  return raw_residual(*p.domain, *p.potential, total_deformation(p, u), p.f_atom);
}

HessianOperator::HessianOperator(const AtomisticProblem& p, const DiscreteField& lin_point)
    : dom_(p.domain), n_(p.potential->n()) {
  const auto& semi = dom_->semi_interior();
  site_k_.resize(semi.size() * std::size_t(n_) * n_);
  for (std::size_t r = 0; r < semi.size(); ++r) {
    const BondMatrix B = discrete_gradient(lin_point, semi[r]);
    const std::vector<double> k2 = p.potential->derivatives(B, 2);
    std::copy(k2.begin(), k2.end(), site_k_.begin() + r * std::size_t(n_) * n_);
  }
}

void HessianOperator::apply(const DiscreteField& v, DiscreteField& out) const {
  const LatticeDomain& dom = *dom_;
  const int d = dom.dim();
  const int m = dom.stencil().size();
  BondField M(dom);
  for (std::size_t r = 0; r < dom.semi_interior().size(); ++r) {
    const BondMatrix B = discrete_gradient(v, dom.semi_interior()[r]);
    const double* K = site_k_.data() + r * std::size_t(n_) * n_;
    double* Mr = M.entry(static_cast<int>(r), 0);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      const double* row = K + std::size_t(i) * n_;
      for (int j = 0; j < n_; ++j) s += row[j] * B.v[j];
      Mr[i] = s;
    }
  }
  std::fill(out.values.begin(), out.values.end(), 0.0);
  for (int idx : dom.interior()) {
    const Vec div = discrete_divergence(M, idx);
    for (int j = 0; j < d; ++j) out.at(idx)[j] = -div[j];
  }
}

DiscreteField linear_solve(const AtomisticProblem& p, const HessianOperator& h,
                           const DiscreteField& rhs, double rel_tol) {
  DiscreteField u;
  CgOptions opts;
  opts.rel_tol = rel_tol;
  const CgOutcome res = cg_solve(
      *p.domain, [&](const DiscreteField& v, DiscreteField& out) { h.apply(v, out); },
      rhs, u, opts);
  if (res.negative_curvature)
    throw std::runtime_error("stability lost at linearization point");
  if (!res.converged && !p.domain->interior().empty()) {
    std::ostringstream msg;
    msg << "linear solve failed; relative residual " << res.rel_residual << " after "
        << res.iterations << " iterations";
    throw std::runtime_error(msg.str());
  }
  return u;
}

IFTConstants ift_constants(const AtomisticProblem& p, double lambda_atom, double r1,
                           double r2) {
  if (!(lambda_atom > 0.0)) throw std::runtime_error("unstable reference");
  const LatticeDomain& dom = *p.domain;
  const double eps = dom.spacing();
  const double cp = dom.diameter() + 1.0;

  IFTConstants c;
  c.r1 = r1;
  c.r2 = r2;
  const DiscreteField res0 = raw_residual(dom, *p.potential, p.base_point, p.f_tilde);
  c.A = cp * lattice_norm(res0, NormKind::l2_interior) / (eps * eps);
  c.M1 = 2.0 / lambda_atom;

  // sup of |D^2 W| and |D^3 W| over the admissible ball, sampled
  const int n = p.potential->n();
  const double radius = p.potential->admissible_radius();
  std::mt19937_64 rng(0xadb0110ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto& semi = dom.semi_interior();
  double sup2 = 0.0, sup3 = 0.0;
  const int samples = 1000;
  for (int s = 0; s < samples; ++s) {
    const int site = semi[(s * 2654435761u) % semi.size()];
    BondMatrix B = discrete_gradient(p.base_point, site);
    // uniform draw from the ball of the trusted radius
    double dir[24];
    double nd = 0.0;
    for (int i = 0; i < n; ++i) {
      dir[i] = gauss(rng);
      nd += dir[i] * dir[i];
    }
    nd = std::sqrt(nd);
    const double r = radius * std::pow(uni(rng), 1.0 / n);
    for (int i = 0; i < n; ++i) B.v[i] += r * dir[i] / nd;
    try {
      sup2 = std::max(sup2, tensor_operator_norm(p.potential->derivatives(B, 2), n));
      sup3 = std::max(sup3, third_order_norm(p.potential->derivatives(B, 3), n));
    } catch (const std::exception&) {
      continue;  // sample fell outside the admissible set
    }
  }
  c.M2 = 1.0 + 1.1 * sup2;
  c.M3 = 1.1 * sup3;
  c.M4 = c.M3;

  const double inf = std::numeric_limits<double>::infinity();
  const double cubic = c.M3 > 0.0 ? 1.0 / (3.0 * c.M1 * c.M3) : inf;
  c.lambda1 = std::min(r1, cubic);
  c.lambda2 = std::min({r2, cubic, c.lambda1 / (3.0 * c.M1 * c.M2)});
  const double eg = std::pow(eps, p.gamma);
  c.rho_eps = c.lambda1 * eg;
  c.tau_eps = c.lambda2 * eg;
  const double bound =
      std::min(r1 / (3.0 * c.M1), c.M3 > 0.0 ? 1.0 / (9.0 * c.M1 * c.M1 * c.M3) : inf);
  c.hypothesis_ok = c.A <= bound;
  return c;
}

SolveReport solve_bvp(const AtomisticProblem& p, SolveMethod method,
                      const SolveOptions& opts) {
  if (method == SolveMethod::fixed_point && opts.constants &&
      !opts.constants->hypothesis_ok && !opts.override_hypothesis)
    throw std::runtime_error("IFT hypothesis violated; pass the override to proceed");

  const LatticeDomain& dom = *p.domain;
  SolveReport rep;
  DiscreteField u(dom, Support::zero_on_boundary_layer);

  std::unique_ptr<HessianOperator> frozen;
  if (method == SolveMethod::fixed_point)
    frozen = std::make_unique<HessianOperator>(p, total_deformation(p, u));

  if (opts.initial_guess) {
    u = *opts.initial_guess;
    u.support = Support::zero_on_boundary_layer;
    u.enforce_support();
  }

  DiscreteField r = residual(p, u);
  double res_h = lattice_norm(r, NormKind::h_minus1);
  const double target = opts.tol * std::max(1.0, res_h);

  double prev_step = -1.0;
  int bad_ratios = 0;
  while (res_h > target && rep.iterations < opts.max_iter) {
    const HessianOperator* h = frozen.get();
    std::unique_ptr<HessianOperator> fresh;
    if (method == SolveMethod::newton) {
      fresh = std::make_unique<HessianOperator>(p, total_deformation(p, u));
      h = fresh.get();
    }
    const DiscreteField delta = linear_solve(p, *h, r);
    const double step = lattice_norm(delta, NormKind::h1);
    if (prev_step > 0.0 && step > 0.0) {
      const double ratio = step / prev_step;
      rep.contraction_estimates.push_back(ratio);
      bad_ratios = ratio >= 1.0 ? bad_ratios + 1 : 0;
      if (bad_ratios >= 3) throw std::runtime_error("solver divergence");
    }
    prev_step = step;
    for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] -= delta.values[i];
    u.enforce_support();

    if (method == SolveMethod::fixed_point && opts.constants) {
      const double un = lattice_norm(u, NormKind::h1);
      if (un > opts.constants->rho_eps * (1.0 + 1e-12))
        throw std::runtime_error("iterate left the invariance ball");
    }

    r = residual(p, u);
    res_h = lattice_norm(r, NormKind::h_minus1);
    ++rep.iterations;
  }
  if (res_h > target) throw std::runtime_error("solver did not reach tolerance");

  rep.solution = total_deformation(p, u);
  rep.final_residual_hminus1 = res_h;
  DiscreteField diff(dom, Support::all_points);
  for (std::size_t i = 0; i < diff.values.size(); ++i)
    diff.values[i] = rep.solution.values[i] - p.base_point.values[i];
  rep.distance_to_base = lattice_norm(diff, NormKind::h1);
  return rep;
}

namespace {

// one inverse-iteration / power-method step bookkeeping
double pencil_rayleigh(const AtomisticProblem& p, const HessianOperator& h,
                       const DiscreteField& v) {
  DiscreteField hv(*p.domain, Support::interior_only);
  h.apply(v, hv);
  const double num = l2_inner_interior(hv, v);
  const double den = h1_inner(v, v);
  return num / den;
}

DiscreteField random_test_field(const LatticeDomain& dom, unsigned seed) {
  DiscreteField v(dom, Support::zero_on_boundary_layer);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int idx : dom.interior())
    for (int j = 0; j < dom.dim(); ++j) v.at(idx)[j] = gauss(rng);
  return v;
}

void h1_normalize(DiscreteField& v) {
  const double n = lattice_norm(v, NormKind::h1);
  if (n > 0.0)
    for (double& x : v.values) x /= n;
}

}  // namespace

double certify_minimizer(const AtomisticProblem& p, const DiscreteField& y_atom,
                         double tol) {
  const LatticeDomain& dom = *p.domain;
  const HessianOperator h(p, y_atom);
  if (dom.interior().empty()) throw std::runtime_error("no interior degrees of freedom");

  DiscreteField v = random_test_field(dom, 0xcafe01u);
  h1_normalize(v);

  // try inverse iteration first (positive-definite fast path)
  try {
    double lam = pencil_rayleigh(p, h, v);
    for (int it = 0; it < 500; ++it) {
      DiscreteField gv(dom, Support::interior_only);
      bond_laplacian(v, gv);
      v = linear_solve(p, h, gv, 1e-10);
      h1_normalize(v);
      const double next = pencil_rayleigh(p, h, v);
      if (std::abs(next - lam) <= tol * std::max(1.0, std::abs(next))) return next;
      lam = next;
    }
    throw std::runtime_error("inverse iteration stagnation");
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()) != "stability lost at linearization point") throw;
  }

  // indefinite case: shift past the pencil's top eigenvalue, then power-iterate
  auto g_solve = [&](const DiscreteField& rhs) {
    DiscreteField out;
    CgOptions o;
    o.rel_tol = 1e-12;
    const CgOutcome res = cg_solve(
        dom, [](const DiscreteField& a, DiscreteField& b) { bond_laplacian(a, b); }, rhs,
        out, o);
    if (!res.converged) throw std::runtime_error("gram solve failed");
    return out;
  };

  v = random_test_field(dom, 0xcafe02u);
  h1_normalize(v);
  double top = pencil_rayleigh(p, h, v);
  for (int it = 0; it < 300; ++it) {
    DiscreteField hv(dom, Support::interior_only);
    h.apply(v, hv);
    v = g_solve(hv);
    v.enforce_support();
    h1_normalize(v);
    const double next = pencil_rayleigh(p, h, v);
    if (std::abs(next - top) <= 1e-8 * std::max(1.0, std::abs(next)) && it > 5) {
      top = next;
      break;
    }
    top = next;
  }
  const double shift = std::abs(top) * 1.1 + 1.0;

  v = random_test_field(dom, 0xcafe03u);
  h1_normalize(v);
  double lam = pencil_rayleigh(p, h, v);
  for (int it = 0; it < 5000; ++it) {
    DiscreteField hv(dom, Support::interior_only);
    h.apply(v, hv);
    DiscreteField w = g_solve(hv);  // G^{-1} H v
    for (std::size_t i = 0; i < v.values.size(); ++i)
      w.values[i] = shift * v.values[i] - w.values[i];
    v = std::move(w);
    v.enforce_support();
    h1_normalize(v);
    const double next = pencil_rayleigh(p, h, v);
    if (std::abs(next - lam) <= tol * 1e-2 * std::max(1.0, std::abs(next)) && it > 10)
      return next;
    lam = next;
  }
  return lam;
}

EnergyValue energy(const AtomisticProblem& p, const DiscreteField& y) {
  const LatticeDomain& dom = *p.domain;
  const int d = dom.dim();
  double scale = 0.0;
  for (double x : p.g_atom.values) scale = std::max(scale, std::abs(x));
  for (int idx : dom.boundary_layer())
    for (int j = 0; j < d; ++j)
      if (std::abs(y.at(idx)[j] - p.g_atom.at(idx)[j]) > 1e-12 * std::max(1.0, scale))
        return EnergyValue{true, 0.0};

  double e = 0.0;
  for (int idx : dom.semi_interior())
    e += p.potential->energy(discrete_gradient(y, idx));
  double force = 0.0;
  for (int idx : dom.interior())
    for (int j = 0; j < d; ++j) force += y.at(idx)[j] * p.f_atom.at(idx)[j];
  return EnergyValue{false, dom.cell_volume() * (e - force)};
}

}  // namespace latlab
