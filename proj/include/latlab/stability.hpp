#pragma once

#include <complex>
#include <utility>

#include "latlab/potentials.hpp"

namespace latlab {

// H(k)_{jl} = sum_{rho,sigma} K_{j rho l sigma} z_rho conj(z_sigma) with
// z_rho = cos(rho.k) - 1 + i sin(rho.k); denominator = sum_rho |z_rho|^2.
struct DynamicalMatrix {
  int d = 0;
  Vec k{};
  std::array<std::complex<double>, 9> H{};
  double denominator = 0.0;

  std::complex<double> at(int j, int l) const { return H[j * d + l]; }
  std::complex<double>& at(int j, int l) { return H[j * d + l]; }
};

DynamicalMatrix dynamical_matrix(const LinearizationTensor& K,
                                 const InteractionStencil& stencil, const Vec& k);

// Minimal eigenvalue of a hermitian d x d matrix (d <= 3); throws on
// non-hermitian input.
double smallest_eigenvalue(const std::complex<double>* H, int d);

enum class StabilityClass { stable, unstable, marginal };

struct StabilityReport {
  double lambda_atom_estimate = 0.0;
  Vec minimizing_k{};
  double lambda_LH = 0.0;
  double lambda_LH_tilde = 0.0;
  int grid_resolution = 0;
  int refinement_passes = 0;
  StabilityClass classification = StabilityClass::marginal;
};

// Rayleigh-ratio infimum over [0,2pi)^d: uniform grid, local refinement
// around the incumbent (halved spacing per pass), and the long-wavelength
// direction-scan limit folded in as min(grid value, lambda_LH_tilde).
StabilityReport lambda_atom(const LinearizationTensor& K, const InteractionStencil& stencil,
                            int grid_resolution = 64, int refinement_passes = 3,
                            double marginal_tol = 1e-6);

double lambda_LH(const ContinuumTensor& L);
double lambda_LH_tilde(const LinearizationTensor& K, const InteractionStencil& stencil);

enum class BruteforceMode { zero_bc, periodic };

// mu_{0,N} / mu_{per,N} by dense generalized symmetric eigensolve
// (constants projected out in periodic mode). Guarded by a dense size cap.
double mu_bruteforce(const LinearizationTensor& K, const InteractionStencil& stencil,
                     int N, BruteforceMode mode, int dense_cap = 4096);

// min over the discrete dual grid of h(k)/denominator, k in (2pi/N)Z^d \ {0}.
double mu_periodic_fourier(const LinearizationTensor& K, const InteractionStencil& stencil,
                           int N);

// (1/2)(V'' + V'/t) - (1/4)|V'' - V'/t| at t, the triangular-lattice
// stability constant of a single pair potential.
double closed_form_triangular(const PairPotential& v, double t);

struct FtStabilityRecord {
  double r_star = 0.0;
  double alpha = 0.0;
  double kappa = 0.0;
  double beta = 0.0;
  double lambda_LH_tilde = 0.0;
  bool atomistically_stable = false;
};
FtStabilityRecord ft_stability(double k1, double k2, double a1, double a2);

// (|lambda_atom(K) - lambda_atom(K2)|, |K - K2| spectral estimate).
std::pair<double, double> stability_sensitivity(const LinearizationTensor& K,
                                                const LinearizationTensor& K2,
                                                const InteractionStencil& stencil,
                                                int grid_resolution = 64,
                                                int refinement_passes = 3);

}  // namespace latlab
