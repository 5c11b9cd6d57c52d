#pragma once

#include <optional>
#include <string>
#include <vector>

#include "latlab/lattice.hpp"
#include "latlab/potentials.hpp"

namespace latlab {

// Dirichlet boundary-value problem around a smooth base configuration.
// The boundary mismatch is carried by a harmonic extension computed once
// at assembly; the interior correction u lives in A_eps(Omega, 0).
struct AtomisticProblem {
  const LatticeDomain* domain = nullptr;
  const SitePotential* potential = nullptr;
  DiscreteField base_point;  // all points
  DiscreteField g_atom;      // boundary layer values (all-points storage)
  DiscreteField f_atom;      // interior
  DiscreteField f_tilde;     // interior, reference cell averages
  double gamma = 2.0;

  // cached at assembly
  DiscreteField boundary_lift;  // T_eps(g_atom - base|boundary)
  double g_mismatch_seminorm = 0.0;
  double f_mismatch_hminus1 = 0.0;
};

AtomisticProblem assemble_problem(const LatticeDomain& dom, const SitePotential& w,
                                  DiscreteField base_point, DiscreteField g_atom,
                                  DiscreteField f_atom, DiscreteField f_tilde,
                                  double gamma = 2.0);

// base + boundary lift + u
DiscreteField total_deformation(const AtomisticProblem& p, const DiscreteField& u);

// F(u)(x) = -f_atom(x) - div_{R,eps}( DW(D(base + lift + u)) )(x) on the interior.
DiscreteField residual(const AtomisticProblem& p, const DiscreteField& u);

// Matrix-free lattice Hessian at a fixed linearization point; per-site
// second derivatives are cached at construction.
class HessianOperator {
 public:
  HessianOperator(const AtomisticProblem& p, const DiscreteField& lin_point);
  void apply(const DiscreteField& v, DiscreteField& out) const;

 private:
  const LatticeDomain* dom_;
  int n_;
  std::vector<double> site_k_;  // per semi-interior point, n x n
};

// CG solve H u = rhs over A_eps(Omega,0); negative curvature surfaces as
// "stability lost at linearization point".
DiscreteField linear_solve(const AtomisticProblem& p, const HessianOperator& h,
                           const DiscreteField& rhs, double rel_tol = 1e-12);

struct IFTConstants {
  double A = 0.0;
  double M1 = 0.0, M2 = 0.0, M3 = 0.0, M4 = 0.0;
  double r1 = 0.0, r2 = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;
  double rho_eps = 0.0, tau_eps = 0.0;
  bool hypothesis_ok = false;
};

// Constants of the quantitative fixed-point argument, with the base-point
// residual measured rather than bounded.
IFTConstants ift_constants(const AtomisticProblem& p, double lambda_atom, double r1,
                           double r2);

enum class SolveMethod { fixed_point, newton };

struct SolveReport {
  DiscreteField solution;  // y_atom on all points
  int iterations = 0;
  std::vector<double> contraction_estimates;
  double final_residual_hminus1 = 0.0;
  double certified_min_rayleigh = 0.0;
  double distance_to_base = 0.0;  // h1 of y_atom - base
};

struct SolveOptions {
  double tol = 1e-10;  // residual h^-1, relative to max(1, initial)
  int max_iter = 100;
  // fixed-point ball invariance check; skipped when absent
  std::optional<IFTConstants> constants;
  bool override_hypothesis = false;
  // starting interior correction u0 (zero when absent)
  std::optional<DiscreteField> initial_guess;
};

SolveReport solve_bvp(const AtomisticProblem& p, SolveMethod method,
                      const SolveOptions& opts = {});

// Minimal Rayleigh quotient <Hv,v>/|v|_{h1}^2 over A_eps(Omega,0): inverse
// iteration against the h1 Gram form, with a two-phase power-method
// fallback when the Hessian is indefinite.
double certify_minimizer(const AtomisticProblem& p, const DiscreteField& y_atom,
                         double tol = 1e-6);

// E_eps(y) with the out-of-domain sentinel as a tagged value.
struct EnergyValue {
  bool infinite = false;
  double value = 0.0;
};
EnergyValue energy(const AtomisticProblem& p, const DiscreteField& y);

}  // namespace latlab
