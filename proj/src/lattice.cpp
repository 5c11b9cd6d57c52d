#include "latlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "latlab/kernels.hpp"

namespace latlab {

LatticeDomain::LatticeDomain(std::shared_ptr<const DomainShape> shape, double spacing,
                             InteractionStencil stencil)
    : shape_(std::move(shape)), eps_(spacing), stencil_(std::move(stencil)) {
  if (!(eps_ > 0.0)) throw std::invalid_argument("spacing must be positive");
  if (stencil_.dim() != shape_->dim()) throw std::invalid_argument("invalid stencil");
  const int d = shape_->dim();

  Vec lo{}, hi{};
  shape_->bounding_box(lo, hi);
  IVec ilo{}, ihi{};
  for (int i = 0; i < d; ++i) {
    ilo[i] = static_cast<int>(std::floor(lo[i] / eps_)) - 1;
    ihi[i] = static_cast<int>(std::ceil(hi[i] / eps_)) + 1;
  }

  // Lexicographic enumeration of the bounding grid.
  IVec c = ilo;
  while (true) {
    Vec p{};
    for (int i = 0; i < d; ++i) p[i] = c[i] * eps_;
    if (shape_->contains(p)) coords_.push_back(c);
    int axis = d - 1;
    while (axis >= 0 && ++c[axis] > ihi[axis]) c[axis--] = ilo[axis];
    if (axis < 0) break;
  }
  if (coords_.empty()) throw std::runtime_error("degenerate discretization");

  const double t_semi = eps_ * stencil_.r0();
  const double t_int = 2.0 * eps_ * stencil_.r0();
  semi_rank_.assign(num_points(), -1);
  interior_rank_.assign(num_points(), -1);
  for (int idx = 0; idx < num_points(); ++idx) {
    const double dist = -shape_->signed_distance(position(idx));
    if (dist > t_semi) {
      semi_rank_[idx] = static_cast<int>(semi_.size());
      semi_.push_back(idx);
    }
    if (dist > t_int) {
      interior_rank_[idx] = static_cast<int>(interior_.size());
      interior_.push_back(idx);
    } else {
      boundary_.push_back(idx);
    }
  }

  const int m = stencil_.size();
  neighbors_.assign(static_cast<std::size_t>(num_points()) * m, -1);
  for (int idx = 0; idx < num_points(); ++idx)
    for (int a = 0; a < m; ++a) {
      IVec n = coords_[idx];
      for (int i = 0; i < d; ++i) n[i] += stencil_.dir(a)[i];
      neighbors_[idx * m + a] = index_of(n);
    }
}

Vec LatticeDomain::position(int idx) const {
  Vec p{};
  for (int i = 0; i < dim(); ++i) p[i] = coords_[idx][i] * eps_;
  return p;
}

int LatticeDomain::index_of(const IVec& c) const {
  auto it = std::lower_bound(coords_.begin(), coords_.end(), c);
  if (it == coords_.end() || *it != c) return -1;
  return static_cast<int>(it - coords_.begin());
}

double LatticeDomain::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= eps_;
  return v;
}

void DiscreteField::enforce_support() {
  const int d = domain->dim();
  if (support == Support::zero_on_boundary_layer) {
    for (int idx : domain->boundary_layer())
      for (int j = 0; j < d; ++j) at(idx)[j] = 0.0;
  } else if (support == Support::interior_only) {
    for (int idx = 0; idx < domain->num_points(); ++idx)
      if (!domain->is_interior(idx))
        for (int j = 0; j < d; ++j) at(idx)[j] = 0.0;
  }
}

BondMatrix discrete_gradient(const DiscreteField& y, int point_idx) {
  const LatticeDomain& dom = *y.domain;
  if (!dom.is_semi_interior(point_idx))
    throw std::runtime_error("stencil leaves domain");
  const int d = dom.dim();
  const int m = dom.stencil().size();
  BondMatrix B;
  B.m = m;
  B.d = d;
  const double inv_eps = 1.0 / dom.spacing();
  const double* yx = y.at(point_idx);
  for (int a = 0; a < m; ++a) {
    const int nb = dom.neighbor(point_idx, a);
    if (nb < 0) throw std::runtime_error("stencil leaves domain");
    const double* yn = y.at(nb);
    for (int j = 0; j < d; ++j) B.at(a, j) = (yn[j] - yx[j]) * inv_eps;
  }
  return B;
}

Vec discrete_divergence(const BondField& M, int point_idx) {
  const LatticeDomain& dom = *M.domain;
  if (!dom.is_interior(point_idx))
    throw std::runtime_error("divergence requires an interior point");
  const int d = dom.dim();
  const int m = dom.stencil().size();
  const int here = dom.semi_rank(point_idx);
  Vec out{};
  const double inv_eps = 1.0 / dom.spacing();
  for (int a = 0; a < m; ++a) {
    const int back = dom.semi_rank(dom.neighbor(point_idx, dom.stencil().negation_index(a)));
    const double* Mx = M.entry(here, a);
    const double* Mb = M.entry(back, a);
    for (int j = 0; j < d; ++j) out[j] += (Mx[j] - Mb[j]) * inv_eps;
  }
  return out;
}

BondField gradient_field(const DiscreteField& y) {
  const LatticeDomain& dom = *y.domain;
  BondField G(dom);
  const int d = dom.dim();
  const int m = dom.stencil().size();
  for (std::size_t r = 0; r < dom.semi_interior().size(); ++r) {
    const BondMatrix B = discrete_gradient(y, dom.semi_interior()[r]);
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < d; ++j) G.entry(static_cast<int>(r), a)[j] = B.at(a, j);
  }
  return G;
}

double l2_inner_interior(const DiscreteField& u, const DiscreteField& v) {
  const LatticeDomain& dom = *u.domain;
  const int d = dom.dim();
  double s = 0.0;
  for (int idx : dom.interior())
    for (int j = 0; j < d; ++j) s += u.at(idx)[j] * v.at(idx)[j];
  return dom.cell_volume() * s;
}

double h1_inner(const DiscreteField& u, const DiscreteField& v) {
  const LatticeDomain& dom = *u.domain;
  const int d = dom.dim();
  const int m = dom.stencil().size();
  double s = 0.0;
  for (int idx : dom.semi_interior()) {
    const BondMatrix Du = discrete_gradient(u, idx);
    const BondMatrix Dv = discrete_gradient(v, idx);
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < d; ++j) s += Du.at(a, j) * Dv.at(a, j);
  }
  return dom.cell_volume() * s;
}

void bond_laplacian(const DiscreteField& v, DiscreteField& out) {
  const LatticeDomain& dom = *v.domain;
  const int d = dom.dim();
  const int m = dom.stencil().size();
  const double inv_eps2 = 1.0 / (dom.spacing() * dom.spacing());
  std::fill(out.values.begin(), out.values.end(), 0.0);
  for (int idx : dom.interior()) {
    double* o = out.at(idx);
    const double* vx = v.at(idx);
    for (int a = 0; a < m; ++a) {
      const double* vp = v.at(dom.neighbor(idx, a));
      const double* vm = v.at(dom.neighbor(idx, dom.stencil().negation_index(a)));
      for (int j = 0; j < d; ++j)
        o[j] -= (vp[j] - 2.0 * vx[j] + vm[j]) * inv_eps2;
    }
  }
}

namespace {

void gather_interior(const LatticeDomain& dom, const DiscreteField& f, std::vector<double>& x) {
  const int d = dom.dim();
  x.resize(dom.interior().size() * d);
  std::size_t k = 0;
  for (int idx : dom.interior())
    for (int j = 0; j < d; ++j) x[k++] = f.at(idx)[j];
}

void scatter_interior(const LatticeDomain& dom, const std::vector<double>& x, DiscreteField& f) {
  const int d = dom.dim();
  std::fill(f.values.begin(), f.values.end(), 0.0);
  std::size_t k = 0;
  for (int idx : dom.interior())
    for (int j = 0; j < d; ++j) f.at(idx)[j] = x[k++];
}

}  // namespace

CgOutcome cg_solve(const LatticeDomain& dom, const InteriorOperator& apply,
                   const DiscreteField& rhs, DiscreteField& u, const CgOptions& opts) {
  namespace ker = kernels;
  CgOutcome out;
  u = DiscreteField(dom, Support::zero_on_boundary_layer);

  std::vector<double> b;
  gather_interior(dom, rhs, b);
  const std::size_t n = b.size();
  const double bnorm = std::sqrt(ker::norm2_squared(b.data(), n));
  if (bnorm == 0.0 || n == 0) {
    out.converged = true;
    return out;
  }

  std::vector<double> x(n, 0.0), r = b, p = b, Ap(n);
  DiscreteField scratch(dom, Support::zero_on_boundary_layer);
  DiscreteField applied(dom, Support::interior_only);

  double rr = ker::norm2_squared(r.data(), n);
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * n + 100);
  for (int it = 0; it < max_iter; ++it) {
    scatter_interior(dom, p, scratch);
    apply(scratch, applied);
    gather_interior(dom, applied, Ap);
    const double pAp = ker::dot(p.data(), Ap.data(), n);
    if (!(pAp > 1e-14 * ker::norm2_squared(p.data(), n))) {
      out.negative_curvature = true;
      out.iterations = it;
      out.rel_residual = std::sqrt(rr) / bnorm;
      return out;
    }
    const double alpha = rr / pAp;
    ker::axpy(alpha, p.data(), x.data(), n);
    ker::axpy(-alpha, Ap.data(), r.data(), n);
    const double rr_new = ker::norm2_squared(r.data(), n);
    out.iterations = it + 1;
    out.rel_residual = std::sqrt(rr_new) / bnorm;
    if (out.rel_residual <= opts.rel_tol) {
      out.converged = true;
      break;
    }
    ker::xpby(r.data(), rr_new / rr, p.data(), n);
    rr = rr_new;
  }
  scatter_interior(dom, x, u);
  return out;
}

DiscreteField harmonic_extension(const DiscreteField& g) {
  const LatticeDomain& dom = *g.domain;
  const int d = dom.dim();
  if (dom.boundary_layer().empty()) throw std::runtime_error("empty boundary data");

  DiscreteField g_ext(dom, Support::all_points);
  for (int idx : dom.boundary_layer())
    for (int j = 0; j < d; ++j) g_ext.at(idx)[j] = g.at(idx)[j];

  DiscreteField rhs(dom, Support::interior_only);
  bond_laplacian(g_ext, rhs);
  for (double& v : rhs.values) v = -v;

  DiscreteField u;
  CgOptions opts;
  const CgOutcome res = cg_solve(
      dom, [](const DiscreteField& v, DiscreteField& out) { bond_laplacian(v, out); },
      rhs, u, opts);
  if (!res.converged && !dom.interior().empty()) {
    std::ostringstream msg;
    msg << "harmonic extension solve failed; relative residual " << res.rel_residual;
    throw std::runtime_error(msg.str());
  }
  DiscreteField y(dom, Support::all_points);
  for (std::size_t i = 0; i < y.values.size(); ++i)
    y.values[i] = g_ext.values[i] + u.values[i];
  return y;
}

double lattice_norm(const DiscreteField& u, NormKind kind) {
  const LatticeDomain& dom = *u.domain;
  const int d = dom.dim();
  switch (kind) {
    case NormKind::l2_interior:
      return std::sqrt(std::max(0.0, l2_inner_interior(u, u)));
    case NormKind::l2_points: {
      double s = 0.0;
      for (int idx = 0; idx < dom.num_points(); ++idx)
        for (int j = 0; j < d; ++j) s += u.at(idx)[j] * u.at(idx)[j];
      return std::sqrt(dom.cell_volume() * s);
    }
    case NormKind::h1:
      return std::sqrt(std::max(0.0, h1_inner(u, u)));
    case NormKind::h_minus1: {
      DiscreteField w;
      const CgOutcome res = cg_solve(
          dom, [](const DiscreteField& v, DiscreteField& out) { bond_laplacian(v, out); },
          u, w);
      if (!res.converged && !(res.rel_residual == 0.0)) {
        std::ostringstream msg;
        msg << "h_minus1 Riesz solve failed; relative residual " << res.rel_residual;
        throw std::runtime_error(msg.str());
      }
      return std::sqrt(std::max(0.0, l2_inner_interior(u, w)));
    }
    case NormKind::boundary_seminorm:
      return lattice_norm(harmonic_extension(u), NormKind::h1);
  }
  return 0.0;
}

}  // namespace latlab
