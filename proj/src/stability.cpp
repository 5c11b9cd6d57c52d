#include "latlab/stability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace latlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Cyclic Jacobi for real symmetric n x n, n <= 6; returns min eigenvalue.
double jacobi_min_eigenvalue(double* A, int n) {
  auto off2 = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += A[i * n + j] * A[i * n + j];
    return s;
  };
  double scale = 0.0;
  for (int i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(A[i]));
  const double tol = 1e-12 * std::max(1.0, scale);
  for (int sweep = 0; sweep < 100 && off2() > tol * tol; ++sweep) {
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = A[p * n + q];
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (A[q * n + q] - A[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = A[i * n + p], aiq = A[i * n + q];
          A[i * n + p] = c * aip - s * aiq;
          A[i * n + q] = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = A[p * n + i], aqi = A[q * n + i];
          A[p * n + i] = c * api - s * aqi;
          A[q * n + i] = s * api + c * aqi;
        }
      }
  }
  double lam = A[0];
  for (int i = 1; i < n; ++i) lam = std::min(lam, A[i * n + i]);
  return lam;
}

double symmetric_min_eigenvalue(const double* S, int d) {
  if (d == 1) return S[0];
  if (d == 2) {
    const double mean = 0.5 * (S[0] + S[3]);
    const double half = 0.5 * (S[0] - S[3]);
    return mean - std::sqrt(half * half + S[1] * S[1]);
  }
  double A[9];
  std::copy(S, S + 9, A);
  return jacobi_min_eigenvalue(A, 3);
}

double rho_dot_k(const IVec& rho, const Vec& k, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += rho[i] * k[i];
  return s;
}

// Rayleigh ratio at one wavevector; +inf when the denominator degenerates.
double ratio_at(const LinearizationTensor& K, const InteractionStencil& st, const Vec& k) {
  const DynamicalMatrix D = dynamical_matrix(K, st, k);
  if (D.denominator <= 1e-9)
    return std::numeric_limits<double>::infinity();
  return smallest_eigenvalue(D.H.data(), D.d) / D.denominator;
}

double golden_section(const std::function<double(double)>& f, double a, double b,
                      double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? fc : fd;
}

// Minimize a function of a unit direction; deterministic seeding per spec.
double minimize_over_sphere(int d, const std::function<double(const Vec&)>& f) {
  if (d == 1) return f(Vec{1.0, 0.0, 0.0});
  if (d == 2) {
    const int n = 1024;
    double best = std::numeric_limits<double>::infinity();
    double best_phi = 0.0;
    for (int i = 0; i < n; ++i) {
      const double phi = kPi * i / n;  // ratio is even under eta -> -eta
      const double v = f(Vec{std::cos(phi), std::sin(phi), 0.0});
      if (v < best) {
        best = v;
        best_phi = phi;
      }
    }
    const double h = kPi / n;
    return std::min(best,
                    golden_section(
                        [&](double phi) {
                          return f(Vec{std::cos(phi), std::sin(phi), 0.0});
                        },
                        best_phi - h, best_phi + h, 1e-10));
  }
  // d == 3: Fibonacci-sphere seeding + shrinking tangent search
  const int n = 4096;
  const double ga = kPi * (3.0 - std::sqrt(5.0));
  Vec best_eta{0.0, 0.0, 1.0};
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec eta{r * std::cos(ga * i), r * std::sin(ga * i), z};
    const double v = f(eta);
    if (v < best) {
      best = v;
      best_eta = eta;
    }
  }
  double radius = 2.0 / std::sqrt(double(n));
  while (radius > 1e-9) {
    // tangent frame at the incumbent
    Vec t1{}, t2{};
    const Vec& e = best_eta;
    if (std::abs(e[0]) < 0.9)
      t1 = Vec{0.0, -e[2], e[1]};
    else
      t1 = Vec{-e[2], 0.0, e[0]};
    double nt = norm(t1, 3);
    for (int i = 0; i < 3; ++i) t1[i] /= nt;
    t2 = Vec{e[1] * t1[2] - e[2] * t1[1], e[2] * t1[0] - e[0] * t1[2],
             e[0] * t1[1] - e[1] * t1[0]};
    bool improved = false;
    for (int i = 0; i < 16; ++i) {
      const double a = 2.0 * kPi * i / 16.0;
      Vec cand{};
      for (int j = 0; j < 3; ++j)
        cand[j] = e[j] + radius * (std::cos(a) * t1[j] + std::sin(a) * t2[j]);
      const double nc = norm(cand, 3);
      for (int j = 0; j < 3; ++j) cand[j] /= nc;
      const double v = f(cand);
      if (v < best) {
        best = v;
        best_eta = cand;
        improved = true;
      }
    }
    if (!improved) radius *= 0.5;
  }
  return best;
}

}  // namespace

DynamicalMatrix dynamical_matrix(const LinearizationTensor& K,
                                 const InteractionStencil& stencil, const Vec& k) {
  const int d = K.d;
  const int m = K.m;
  DynamicalMatrix D;
  D.d = d;
  D.k = k;
  std::array<std::complex<double>, 8> z;
  for (int a = 0; a < m; ++a) {
    const double rk = rho_dot_k(stencil.dir(a), k, d);
    z[a] = std::complex<double>(std::cos(rk) - 1.0, std::sin(rk));
    D.denominator += std::norm(z[a]);
  }
  for (int j = 0; j < d; ++j)
    for (int l = 0; l < d; ++l) {
      std::complex<double> s(0.0, 0.0);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const double kv = K.entry(j, a, l, b);
          if (kv != 0.0) s += kv * z[a] * std::conj(z[b]);
        }
      D.at(j, l) = s;
    }
  return D;
}

double smallest_eigenvalue(const std::complex<double>* H, int d) {
  double scale = 0.0;
  for (int i = 0; i < d * d; ++i) scale = std::max(scale, std::abs(H[i]));
  const double tol = 1e-10 * std::max(1.0, scale);
  for (int j = 0; j < d; ++j)
    for (int l = 0; l < d; ++l)
      if (std::abs(H[j * d + l] - std::conj(H[l * d + j])) > tol)
        throw std::invalid_argument("matrix not hermitian");

  if (d == 1) return H[0].real();
  if (d == 2) {
    const double a = H[0].real(), c = H[3].real();
    const double mean = 0.5 * (a + c), half = 0.5 * (a - c);
    return mean - std::sqrt(half * half + std::norm(H[1]));
  }
  // d == 3: real 6x6 embedding [[A, -B], [B, A]] has the same spectrum twice.
  double M[36] = {0.0};
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) {
      const double re = 0.5 * (H[j * 3 + l].real() + H[l * 3 + j].real());
      const double im = 0.5 * (H[j * 3 + l].imag() - H[l * 3 + j].imag());
      M[j * 6 + l] = re;
      M[(j + 3) * 6 + (l + 3)] = re;
      M[j * 6 + (l + 3)] = -im;
      M[(j + 3) * 6 + l] = im;
    }
  return jacobi_min_eigenvalue(M, 6);
}

double lambda_LH(const ContinuumTensor& L) {
  const int d = L.d;
  return minimize_over_sphere(d, [&](const Vec& eta) {
    double Q[9] = {0.0};
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) {
        double s = 0.0;
        for (int k = 0; k < d; ++k)
          for (int m = 0; m < d; ++m) s += L.at(j, k, l, m) * eta[k] * eta[m];
        Q[j * d + l] = s;
      }
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < j; ++l) {
        const double s = 0.5 * (Q[j * d + l] + Q[l * d + j]);
        Q[j * d + l] = Q[l * d + j] = s;
      }
    return symmetric_min_eigenvalue(Q, d);
  });
}

double lambda_LH_tilde(const LinearizationTensor& K, const InteractionStencil& stencil) {
  const int d = K.d;
  const int m = K.m;
  return minimize_over_sphere(d, [&](const Vec& eta) {
    double b[8];
    double denom = 0.0;
    for (int a = 0; a < m; ++a) {
      b[a] = rho_dot_k(stencil.dir(a), eta, d);
      denom += b[a] * b[a];
    }
    double Q[9] = {0.0};
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) {
        double s = 0.0;
        for (int a = 0; a < m; ++a)
          for (int c = 0; c < m; ++c) s += K.entry(j, a, l, c) * b[a] * b[c];
        Q[j * d + l] = s;
      }
    return symmetric_min_eigenvalue(Q, d) / denom;
  });
}

StabilityReport lambda_atom(const LinearizationTensor& K, const InteractionStencil& stencil,
                            int grid_resolution, int refinement_passes,
                            double marginal_tol) {
  if (grid_resolution < 4)
    throw std::invalid_argument("grid resolution must be at least 4 per axis");
  const int d = K.d;

  StabilityReport rep;
  rep.grid_resolution = grid_resolution;
  rep.refinement_passes = refinement_passes;

  double best = std::numeric_limits<double>::infinity();
  Vec best_k{};
  IVec idx{};
  const double h0 = 2.0 * kPi / grid_resolution;
  while (true) {
    Vec k{};
    for (int i = 0; i < d; ++i) k[i] = idx[i] * h0;
    const double v = ratio_at(K, stencil, k);
    if (v < best) {
      best = v;
      best_k = k;
    }
    int axis = d - 1;
    while (axis >= 0 && ++idx[axis] >= grid_resolution) idx[axis--] = 0;
    if (axis < 0) break;
  }

  double h = h0;
  for (int pass = 0; pass < refinement_passes; ++pass) {
    h *= 0.5;
    const Vec center = best_k;
    IVec off{};
    for (int i = 0; i < d; ++i) off[i] = -2;
    while (true) {
      Vec k{};
      for (int i = 0; i < d; ++i) {
        k[i] = center[i] + off[i] * h;
        k[i] -= 2.0 * kPi * std::floor(k[i] / (2.0 * kPi));
      }
      const double v = ratio_at(K, stencil, k);
      if (v < best) {
        best = v;
        best_k = k;
      }
      int axis = d - 1;
      while (axis >= 0 && ++off[axis] > 2) off[axis--] = -2;
      if (axis < 0) break;
    }
  }

  rep.lambda_LH_tilde = lambda_LH_tilde(K, stencil);
  rep.lambda_LH = lambda_LH(cauchy_born_tensor(K, stencil));
  rep.minimizing_k = best_k;
  rep.lambda_atom_estimate = best;
  if (rep.lambda_LH_tilde < best) {
    rep.lambda_atom_estimate = rep.lambda_LH_tilde;
    rep.minimizing_k = Vec{};  // long-wavelength limit
  }
  if (std::abs(rep.lambda_atom_estimate) < marginal_tol)
    rep.classification = StabilityClass::marginal;
  else
    rep.classification = rep.lambda_atom_estimate > 0.0 ? StabilityClass::stable
                                                        : StabilityClass::unstable;
  return rep;
}

double mu_periodic_fourier(const LinearizationTensor& K, const InteractionStencil& stencil,
                           int N) {
  if (N < 2) throw std::invalid_argument("N must be >= 2");
  const int d = K.d;
  double best = std::numeric_limits<double>::infinity();
  IVec idx{};
  while (true) {
    bool zero = true;
    for (int i = 0; i < d; ++i) zero = zero && idx[i] == 0;
    if (!zero) {
      Vec k{};
      for (int i = 0; i < d; ++i) k[i] = 2.0 * kPi * idx[i] / N;
      best = std::min(best, ratio_at(K, stencil, k));
    }
    int axis = d - 1;
    while (axis >= 0 && ++idx[axis] >= N) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return best;
}

double mu_bruteforce(const LinearizationTensor& K, const InteractionStencil& stencil,
                     int N, BruteforceMode mode, int dense_cap) {
  const int d = K.d;
  const int m = K.m;
  if (N < 2) throw std::invalid_argument("N must be >= 2");
  if (mode == BruteforceMode::zero_bc && !(N > 4.0 * stencil.r0()))
    throw std::invalid_argument("N too small for zero-boundary mode");

  // enumerate sites and degrees of freedom
  std::vector<IVec> sites;
  const int reach = static_cast<int>(std::ceil(stencil.r_max()));
  const int lo = mode == BruteforceMode::periodic ? 0 : -reach;
  const int hi = mode == BruteforceMode::periodic ? N - 1 : N + reach;
  IVec c{};
  for (int i = 0; i < d; ++i) c[i] = lo;
  while (true) {
    sites.push_back(c);
    int axis = d - 1;
    while (axis >= 0 && ++c[axis] > hi) c[axis--] = lo;
    if (axis < 0) break;
  }
  const int span = hi - lo + 1;
  auto site_index = [&](IVec z) {
    int s = 0;
    for (int i = 0; i < d; ++i) {
      if (mode == BruteforceMode::periodic) z[i] = ((z[i] % N) + N) % N;
      s = s * span + (z[i] - lo);
    }
    return s;
  };

  // free dofs: all sites (periodic) or sites away from the boundary (zero bc)
  std::vector<int> dof_of(sites.size(), -1);
  int ndof_sites = 0;
  for (std::size_t s = 0; s < sites.size(); ++s) {
    if (mode == BruteforceMode::periodic) {
      dof_of[s] = ndof_sites++;
    } else {
      double dist = std::numeric_limits<double>::infinity();
      for (int i = 0; i < d; ++i)
        dist = std::min({dist, double(sites[s][i]), double(N - sites[s][i])});
      if (dist > 2.0 * stencil.r0()) dof_of[s] = ndof_sites++;
    }
  }
  if (ndof_sites == 0) throw std::invalid_argument("N too small for zero-boundary mode");
  const int n = ndof_sites * d;
  if (n > dense_cap)
    throw std::runtime_error("dense size cap exceeded; use the Fourier route");

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);

  // sum the two quadratic forms over all stencil evaluations touching dofs
  const int xlo = mode == BruteforceMode::periodic ? 0 : lo;
  const int xhi = mode == BruteforceMode::periodic ? N - 1 : hi - reach;
  for (int i = 0; i < d; ++i) c[i] = xlo;
  while (true) {
    // dof indices of x and of each neighbor x + rho_a (-1: pinned to zero)
    int center = dof_of[site_index(c)];
    int nb[8];
    bool touches = center >= 0;
    for (int a = 0; a < m; ++a) {
      IVec z = c;
      for (int i = 0; i < d; ++i) z[i] += stencil.dir(a)[i];
      bool in_range = true;
      if (mode == BruteforceMode::zero_bc)
        for (int i = 0; i < d; ++i) in_range = in_range && z[i] >= lo && z[i] <= hi;
      nb[a] = in_range ? dof_of[site_index(z)] : -1;
      touches = touches || nb[a] >= 0;
    }
    if (touches) {
      // Du(x)_{a j} = u_j(x + rho_a) - u_j(x); accumulate K-form and |Du|^2
      auto add = [&](Eigen::MatrixXd& Mtx, int r, int cc, double v) {
        if (r >= 0 && cc >= 0) Mtx(r, cc) += v;
      };
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          for (int j = 0; j < d; ++j)
            for (int l = 0; l < d; ++l) {
              const double kv = K.entry(j, a, l, b);
              if (kv == 0.0) continue;
              const int pj = nb[a] >= 0 ? nb[a] * d + j : -1;
              const int xj = center >= 0 ? center * d + j : -1;
              const int pl = nb[b] >= 0 ? nb[b] * d + l : -1;
              const int xl = center >= 0 ? center * d + l : -1;
              add(A, pj, pl, kv);
              add(A, pj, xl, -kv);
              add(A, xj, pl, -kv);
              add(A, xj, xl, kv);
            }
      for (int a = 0; a < m; ++a)
        for (int j = 0; j < d; ++j) {
          const int pj = nb[a] >= 0 ? nb[a] * d + j : -1;
          const int xj = center >= 0 ? center * d + j : -1;
          add(B, pj, pj, 1.0);
          add(B, pj, xj, -1.0);
          add(B, xj, pj, -1.0);
          add(B, xj, xj, 1.0);
        }
    }
    int axis = d - 1;
    while (axis >= 0 && ++c[axis] > xhi) c[axis--] = xlo;
    if (axis < 0) break;
  }

  A = 0.5 * (A + A.transpose()).eval();
  B = 0.5 * (B + B.transpose()).eval();

  if (mode == BruteforceMode::periodic) {
    // project out the d constant fields (kernel of both forms)
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, d);
    for (int s = 0; s < ndof_sites; ++s)
      for (int j = 0; j < d; ++j) C(s * d + j, j) = 1.0;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(C);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd P = Q.rightCols(n - d);
    Eigen::MatrixXd Ar = P.transpose() * A * P;
    Eigen::MatrixXd Br = P.transpose() * B * P;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ar, Br);
    return es.eigenvalues()(0);
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
  return es.eigenvalues()(0);
}

double closed_form_triangular(const PairPotential& v, double t) {
  const double d1 = v.dv(t), d2 = v.ddv(t);
  return 0.5 * (d2 + d1 / t) - 0.25 * std::abs(d2 - d1 / t);
}

FtStabilityRecord ft_stability(double k1, double k2, double a1, double a2) {
  if (!(k1 > 0.0 && k2 > 0.0 && a1 > 0.0 && a2 > 0.0))
    throw std::invalid_argument("ft parameters must be positive");
  FtStabilityRecord r;
  r.r_star = (k1 * a1 + std::sqrt(2.0) * k2 * a2) / (k1 + 2.0 * k2);
  r.alpha = a2 / (std::sqrt(2.0) * a1);
  r.kappa = k2 / k1;
  r.beta = (1.0 + 2.0 * r.kappa) / (1.0 + 2.0 * r.alpha * r.kappa);
  r.lambda_LH_tilde = (k1 / 12.0) * r.beta * std::min(1.0, 2.0 * r.alpha * r.kappa);
  r.atomistically_stable = r.beta < 2.0;
  return r;
}

std::pair<double, double> stability_sensitivity(const LinearizationTensor& K,
                                                const LinearizationTensor& K2,
                                                const InteractionStencil& stencil,
                                                int grid_resolution,
                                                int refinement_passes) {
  const StabilityReport a = lambda_atom(K, stencil, grid_resolution, refinement_passes);
  const StabilityReport b = lambda_atom(K2, stencil, grid_resolution, refinement_passes);
  std::vector<double> diff(K.K.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = K.K[i] - K2.K[i];
  const double dk = tensor_operator_norm(diff, K.n());
  return {std::abs(a.lambda_atom_estimate - b.lambda_atom_estimate), dk};
}

}  // namespace latlab
