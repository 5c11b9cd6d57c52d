#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "latlab/lattice.hpp"
#include "latlab/stencil.hpp"

namespace latlab {

// Scalar pair interaction with derivatives to third order. `singular_at`
// is the largest r where the potential blows up (0 for globally smooth).
struct PairPotential {
  std::function<double(double)> v, dv, ddv, dddv;
  double singular_at = 0.0;

  static PairPotential lennard_jones();           // r^{-12} - 2 r^{-6}, minimum at r=1
  static PairPotential harmonic(double a);        // (r - a)^2
  static PairPotential harmonic_scaled(double k, double a);  // k (r - a)^2
  static PairPotential morse(double de, double a, double re);
};

// Point reflection T(A)_rho = -A_{-rho}.
BondMatrix reflect(const InteractionStencil& stencil, const BondMatrix& A);

// Site energy as a function of the bond matrix, with analytic derivatives
// to order 3. Derivative tensors are dense over n = |R|*d slots, flat index
// a*d + j (direction-major), row-major for higher orders.
class SitePotential {
 public:
  enum class Kind { pair_sum, ft_mass_spring, quadratic_form, user_composite };

  virtual ~SitePotential() = default;

  Kind kind() const { return kind_; }
  const InteractionStencil& stencil() const { return stencil_; }
  int dim() const { return stencil_.dim(); }
  int n() const { return stencil_.size() * stencil_.dim(); }

  // Radius (in max bond-vector norm) around the reference bond matrix
  // within which derivative bounds are trusted.
  double admissible_radius() const { return admissible_radius_; }
  void set_admissible_radius(double r) { admissible_radius_ = r; }

  virtual double energy(const BondMatrix& A) const = 0;
  // order 1: n values; order 2: n*n; order 3: n*n*n.
  virtual std::vector<double> derivatives(const BondMatrix& A, int order) const = 0;

 protected:
  SitePotential(Kind kind, InteractionStencil stencil)
      : kind_(kind), stencil_(std::move(stencil)) {}

  // Constructor-time randomized check of W(T(A)) = W(A).
  void verify_reflection_symmetry(double scale) const;

  Kind kind_;
  InteractionStencil stencil_;
  double admissible_radius_ = 1.0;
};

// W(A) = sum_rho V_rho(|A_rho|); V may differ per direction (used by the
// mass-spring lattice where axis and diagonal springs have different
// stiffness). Bond lengths below `floor` raise "potential singularity".
class PairSumPotential final : public SitePotential {
 public:
  PairSumPotential(InteractionStencil stencil, PairPotential v, double floor = 1e-3);
  PairSumPotential(InteractionStencil stencil, std::vector<PairPotential> per_direction,
                   double floor, Kind kind);

  double energy(const BondMatrix& A) const override;
  std::vector<double> derivatives(const BondMatrix& A, int order) const override;

 private:
  double bond_length(const BondMatrix& A, int a) const;
  std::vector<PairPotential> v_;
  double floor_;
};

// Axis springs (K1, a1) plus diagonal springs (K2, a2) on the square
// lattice with diagonals; each spring enters as (K/4)(r - a)^2.
std::unique_ptr<SitePotential> make_ft_mass_spring(double k1, double k2, double a1,
                                                   double a2);

// W(A) = (1/2) K[A - A0, A - A0]; returns K verbatim from linearize.
class QuadraticFormPotential final : public SitePotential {
 public:
  QuadraticFormPotential(InteractionStencil stencil, std::vector<double> K,
                         BondMatrix A0);

  double energy(const BondMatrix& A) const override;
  std::vector<double> derivatives(const BondMatrix& A, int order) const override;

 private:
  std::vector<double> K_;  // n x n, symmetrized
  BondMatrix A0_;
};

// Host-supplied evaluator; derivative callbacks optional (central finite
// differences of the best available order otherwise).
class UserCompositePotential final : public SitePotential {
 public:
  using EnergyFn = std::function<double(const BondMatrix&)>;
  using Deriv1Fn = std::function<std::vector<double>(const BondMatrix&)>;

  UserCompositePotential(InteractionStencil stencil, EnergyFn energy,
                         Deriv1Fn d1 = nullptr, double fd_step = 1e-5);

  double energy(const BondMatrix& A) const override;
  std::vector<double> derivatives(const BondMatrix& A, int order) const override;

 private:
  EnergyFn e_;
  Deriv1Fn d1_;
  double h_;
};

// K = D^2 W_atom((A0 rho)_rho) as a dense symmetric n x n matrix.
struct LinearizationTensor {
  int d = 0;
  int m = 0;  // stencil size; n = m*d
  std::vector<double> K;
  double operator_norm = 0.0;

  int n() const { return m * d; }
  double entry(int j, int a, int l, int b) const { return K[(a * d + j) * n() + (b * d + l)]; }
  double& entry(int j, int a, int l, int b) { return K[(a * d + j) * n() + (b * d + l)]; }
  // K[H1, H2]
  double form(const BondMatrix& h1, const BondMatrix& h2) const;
};

// L_{jklm} = sum_{rho,sigma} K_{j rho l sigma} rho_k sigma_m.
struct ContinuumTensor {
  int d = 0;
  std::array<double, 81> L{};
  double at(int j, int k, int l, int m) const { return L[((j * d + k) * d + l) * d + m]; }
  double& at(int j, int k, int l, int m) { return L[((j * d + k) * d + l) * d + m]; }
  // L[xi (x) eta, xi (x) eta]
  double rank_one_form(const Vec& xi, const Vec& eta) const;
};

// (F rho)_rho for a row-major d x d matrix F.
BondMatrix bonds_from_matrix(const InteractionStencil& stencil, const double* F);

double cauchy_born_energy(const SitePotential& w, const double* F);
// DW_CB(F), row-major d x d
std::vector<double> cauchy_born_stress(const SitePotential& w, const double* F);
ContinuumTensor cauchy_born_tensor(const LinearizationTensor& K,
                                   const InteractionStencil& stencil);

// with_operator_norm=false skips the power iteration for hot paths that
// only contract against K's entries.
LinearizationTensor linearize(const SitePotential& w, const double* A0,
                              bool with_operator_norm = true);
// Spectral norm of the symmetric matrix representation (power iteration).
double tensor_operator_norm(const std::vector<double>& sym, int n, double tol = 1e-8);

}  // namespace latlab
