#pragma once

#include <vector>

#include "latlab/potentials.hpp"

namespace latlab {

// y(x) = A0 x + delta * u(x) with closed-form derivatives through order 4.
// Two families: per-component trigonometric products and polynomials of
// degree <= 3.
class ManufacturedDeformation {
 public:
  // u_j(x) = coef[j] * prod_i sin(pi * freq[i] * x_i)
  static ManufacturedDeformation trigonometric(int dim, const double* A0, Vec coef,
                                               IVec freq, double delta);

  struct Monomial {
    int component = 0;
    double coef = 0.0;
    IVec powers{};  // total degree <= 3
  };
  static ManufacturedDeformation polynomial(int dim, const double* A0,
                                            std::vector<Monomial> terms, double delta);

  int dim() const { return d_; }
  double amplitude() const { return delta_; }
  const double* base_gradient() const { return A0_; }

  // order 0: y(x), d values; order r >= 1: tensor out[j, i1, ..., ir] =
  // d_{i1} ... d_{ir} y_j(x), d^(r+1) values row-major.
  void eval(const Vec& x, int order, double* out) const;

 private:
  friend class SeparableSampler;
  ManufacturedDeformation() = default;
  enum class Family { trigonometric, polynomial };
  Family family_ = Family::trigonometric;
  int d_ = 0;
  double delta_ = 0.0;
  double A0_[9] = {0.0};
  Vec coef_{};
  IVec freq_{};
  std::vector<Monomial> terms_;
};

// Normalized bump c * exp(-1/(1-|z|^2)) on the unit ball; the normalization
// and second moments are precomputed by refined midpoint quadrature.
class Mollifier {
 public:
  explicit Mollifier(int dim);

  int dim() const { return d_; }
  double value(const Vec& z) const;
  double second_moment(int i, int j) const { return m2_[i * d_ + j]; }

 private:
  int d_;
  double c_ = 1.0;
  double m2_[9] = {0.0};
};

// S_eps y (x) = integral of eta(z) y(x - eps z) dz; midpoint tensor
// quadrature refined until the relative change drops below 1e-10.
Vec mollified_sample(const ManufacturedDeformation& y, const Mollifier& eta, double eps,
                     const Vec& x);

// f(x) = -div DW_CB(grad y(x)), the body force that makes y the exact
// continuum solution.
Vec body_force(const SitePotential& w, const ManufacturedDeformation& y, const Vec& x);

// Cell average of the body force over Q_eps(x), 4-point Gauss per axis.
Vec body_force_cell_average(const SitePotential& w, const ManufacturedDeformation& y,
                            double eps, const Vec& x);

// S_eps y sampled on every lattice point.
DiscreteField sample_mollified(const ManufacturedDeformation& y, const Mollifier& eta,
                               const LatticeDomain& dom);

// -f_tilde(x) - div_{R,eps}( DW_atom(D_{R,eps} S_eps y) )(x) on the interior.
DiscreteField discrete_residual_field(const SitePotential& w,
                                      const ManufacturedDeformation& y,
                                      const Mollifier& eta, const LatticeDomain& dom);

}  // namespace latlab
