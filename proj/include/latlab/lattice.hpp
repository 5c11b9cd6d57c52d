#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "latlab/geometry.hpp"
#include "latlab/stencil.hpp"

namespace latlab {

// Bond-difference matrix: one R^d vector per stencil direction.
// Fixed capacity (|R| <= 8, d <= 3) keeps gradient evaluation allocation-free.
struct BondMatrix {
  int m = 0;  // number of directions
  int d = 0;
  std::array<double, 24> v{};

  double* row(int a) { return v.data() + a * d; }
  const double* row(int a) const { return v.data() + a * d; }
  double& at(int a, int j) { return v[a * d + j]; }
  double at(int a, int j) const { return v[a * d + j]; }
};

// Ω ∩ εZ^d with the three point classes. Points are ordered
// lexicographically by integer coordinates; all classifications use strict
// inequalities against ε·r0 and 2ε·r0.
class LatticeDomain {
 public:
  LatticeDomain(std::shared_ptr<const DomainShape> shape, double spacing,
                InteractionStencil stencil);

  int dim() const { return shape_->dim(); }
  double spacing() const { return eps_; }
  const InteractionStencil& stencil() const { return stencil_; }
  const DomainShape& shape() const { return *shape_; }
  double diameter() const { return shape_->diameter(); }

  int num_points() const { return static_cast<int>(coords_.size()); }
  const std::vector<IVec>& lattice_coords() const { return coords_; }
  Vec position(int idx) const;
  int index_of(const IVec& c) const;  // -1 if absent

  bool is_semi_interior(int idx) const { return semi_rank_[idx] >= 0; }
  bool is_interior(int idx) const { return interior_rank_[idx] >= 0; }
  bool is_boundary_layer(int idx) const { return !is_interior(idx); }
  int semi_rank(int idx) const { return semi_rank_[idx]; }
  int interior_rank(int idx) const { return interior_rank_[idx]; }

  const std::vector<int>& semi_interior() const { return semi_; }
  const std::vector<int>& interior() const { return interior_; }
  const std::vector<int>& boundary_layer() const { return boundary_; }

  // Point index of x + ε·ρ_a, or -1 when that lattice point is not in Ω.
  int neighbor(int idx, int a) const { return neighbors_[idx * stencil_.size() + a]; }

  // ε^d, the volume weight of the discrete sums.
  double cell_volume() const;

 private:
  std::shared_ptr<const DomainShape> shape_;
  double eps_;
  InteractionStencil stencil_;
  std::vector<IVec> coords_;
  std::vector<int> semi_, interior_, boundary_;
  std::vector<int> semi_rank_, interior_rank_;
  std::vector<int> neighbors_;
};

enum class Support { all_points, zero_on_boundary_layer, interior_only };

// Dense R^d-valued lattice function; storage always covers all points so
// index arithmetic is uniform across support classes.
struct DiscreteField {
  const LatticeDomain* domain = nullptr;
  Support support = Support::all_points;
  std::vector<double> values;

  DiscreteField() = default;
  DiscreteField(const LatticeDomain& dom, Support s)
      : domain(&dom), support(s), values(dom.num_points() * dom.dim(), 0.0) {}

  double* at(int idx) { return values.data() + idx * domain->dim(); }
  const double* at(int idx) const { return values.data() + idx * domain->dim(); }

  // Zero out entries outside the declared support class.
  void enforce_support();
};

// Bond matrices stored for every semi-interior point (divergence input).
struct BondField {
  const LatticeDomain* domain = nullptr;
  std::vector<double> values;  // num_semi * |R| * d, semi-rank major

  explicit BondField(const LatticeDomain& dom)
      : domain(&dom),
        values(dom.semi_interior().size() * dom.stencil().size() * dom.dim(), 0.0) {}

  double* entry(int semi_rank, int a) {
    const int d = domain->dim();
    return values.data() + (semi_rank * domain->stencil().size() + a) * d;
  }
  const double* entry(int semi_rank, int a) const {
    const int d = domain->dim();
    return values.data() + (semi_rank * domain->stencil().size() + a) * d;
  }
};

// D_{R,ε} y at a semi-interior point; throws "stencil leaves domain" otherwise.
BondMatrix discrete_gradient(const DiscreteField& y, int point_idx);

// div_{R,ε} M at an interior point: Σ_ρ (M_ρ(x) − M_ρ(x−ερ))/ε.
Vec discrete_divergence(const BondField& M, int point_idx);

// BondField of gradients over all semi-interior points.
BondField gradient_field(const DiscreteField& y);

double l2_inner_interior(const DiscreteField& u, const DiscreteField& v);
double h1_inner(const DiscreteField& u, const DiscreteField& v);

enum class NormKind { l2_interior, l2_points, h1, h_minus1, boundary_seminorm };
double lattice_norm(const DiscreteField& u, NormKind kind);

// T_ε g: matches g on the boundary layer, discrete-harmonic on the interior.
DiscreteField harmonic_extension(const DiscreteField& g);

// Conjugate gradients on A_ε(Ω,0) for operators v ↦ field on interior.
struct CgOptions {
  double rel_tol = 1e-12;
  int max_iter = 0;  // 0: 10 * dofs + 100
};
struct CgOutcome {
  bool converged = false;
  bool negative_curvature = false;
  int iterations = 0;
  double rel_residual = 0.0;
};
using InteriorOperator = std::function<void(const DiscreteField&, DiscreteField&)>;
CgOutcome cg_solve(const LatticeDomain& dom, const InteriorOperator& apply,
                   const DiscreteField& rhs, DiscreteField& u,
                   const CgOptions& opts = {});

// −div_{R,ε} D_{R,ε} v on the interior (the discrete Laplacian of the norms).
void bond_laplacian(const DiscreteField& v, DiscreteField& out);

}  // namespace latlab
