#include "latlab/potentials.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace latlab {

PairPotential PairPotential::lennard_jones() {
  PairPotential p;
  p.v = [](double r) { return std::pow(r, -12.0) - 2.0 * std::pow(r, -6.0); };
  p.dv = [](double r) { return -12.0 * std::pow(r, -13.0) + 12.0 * std::pow(r, -7.0); };
  p.ddv = [](double r) { return 156.0 * std::pow(r, -14.0) - 84.0 * std::pow(r, -8.0); };
  p.dddv = [](double r) { return -2184.0 * std::pow(r, -15.0) + 672.0 * std::pow(r, -9.0); };
  p.singular_at = 0.0;
  return p;
}

PairPotential PairPotential::harmonic(double a) { return harmonic_scaled(1.0, a); }

PairPotential PairPotential::harmonic_scaled(double k, double a) {
  PairPotential p;
  p.v = [k, a](double r) { return k * (r - a) * (r - a); };
  p.dv = [k, a](double r) { return 2.0 * k * (r - a); };
  p.ddv = [k](double) { return 2.0 * k; };
  p.dddv = [](double) { return 0.0; };
  return p;
}

PairPotential PairPotential::morse(double de, double a, double re) {
  PairPotential p;
  p.v = [=](double r) {
    const double e = std::exp(-a * (r - re));
    return de * (1.0 - e) * (1.0 - e);
  };
  p.dv = [=](double r) {
    const double e = std::exp(-a * (r - re));
    return 2.0 * de * a * e * (1.0 - e);
  };
  p.ddv = [=](double r) {
    const double e = std::exp(-a * (r - re));
    return 2.0 * de * a * a * e * (2.0 * e - 1.0);
  };
  p.dddv = [=](double r) {
    const double e = std::exp(-a * (r - re));
    return 2.0 * de * a * a * a * e * (1.0 - 4.0 * e);
  };
  return p;
}

BondMatrix reflect(const InteractionStencil& stencil, const BondMatrix& A) {
  BondMatrix T;
  T.m = A.m;
  T.d = A.d;
  for (int a = 0; a < A.m; ++a) {
    const int na = stencil.negation_index(a);
    for (int j = 0; j < A.d; ++j) T.at(a, j) = -A.at(na, j);
  }
  return T;
}

void SitePotential::verify_reflection_symmetry(double scale) const {
  std::mt19937_64 rng(0x5e1fcafeULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const int d = dim();
  const int m = stencil_.size();
  int checked = 0;
  for (int attempt = 0; attempt < 200 && checked < 16; ++attempt) {
    BondMatrix A;
    A.m = m;
    A.d = d;
    // reflection-compatible base (B rho) plus a free perturbation
    double B[9];
    for (int i = 0; i < d * d; ++i) B[i] = scale * (1.0 + 0.1 * uni(rng));
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += B[j * d + k] * stencil_.dir(a)[k];
        A.at(a, j) = s + 0.05 * scale * uni(rng);
      }
    double e1, e2;
    try {
      e1 = energy(A);
      e2 = energy(reflect(stencil_, A));
    } catch (const std::exception&) {
      continue;  // inadmissible sample; draw again
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(e1));
    if (std::abs(e1 - e2) > tol)
      throw std::invalid_argument("potential violates reflection symmetry");
    ++checked;
  }
  if (checked == 0)
    throw std::invalid_argument("potential admits no admissible sample");
}

PairSumPotential::PairSumPotential(InteractionStencil stencil, PairPotential v,
                                   double floor)
    : SitePotential(Kind::pair_sum, std::move(stencil)),
      v_(stencil_.size(), v),
      floor_(floor) {
  verify_reflection_symmetry(1.0);
}

PairSumPotential::PairSumPotential(InteractionStencil stencil,
                                   std::vector<PairPotential> per_direction,
                                   double floor, Kind kind)
    : SitePotential(kind, std::move(stencil)),
      v_(std::move(per_direction)),
      floor_(floor) {
  if (static_cast<int>(v_.size()) != stencil_.size())
    throw std::invalid_argument("one pair potential per stencil direction required");
  verify_reflection_symmetry(1.0);
}

double PairSumPotential::bond_length(const BondMatrix& A, int a) const {
  double r2 = 0.0;
  for (int j = 0; j < A.d; ++j) r2 += A.at(a, j) * A.at(a, j);
  const double r = std::sqrt(r2);
  if (r < std::max(floor_, v_[a].singular_at))
    throw std::runtime_error("potential singularity");
  return r;
}

double PairSumPotential::energy(const BondMatrix& A) const {
  double e = 0.0;
  for (int a = 0; a < A.m; ++a) e += v_[a].v(bond_length(A, a));
  return e;
}

std::vector<double> PairSumPotential::derivatives(const BondMatrix& A, int order) const {
  const int d = A.d;
  const int nn = n();
  if (order < 1 || order > 3) throw std::invalid_argument("order must be 1..3");
  std::vector<double> out;
  if (order == 1) out.assign(nn, 0.0);
  if (order == 2) out.assign(std::size_t(nn) * nn, 0.0);
  if (order == 3) out.assign(std::size_t(nn) * nn * nn, 0.0);

  for (int a = 0; a < A.m; ++a) {
    const double r = bond_length(A, a);
    double nvec[3];
    for (int j = 0; j < d; ++j) nvec[j] = A.at(a, j) / r;
    const double d1 = v_[a].dv(r), d2 = v_[a].ddv(r), d3 = v_[a].dddv(r);
    if (order == 1) {
      for (int j = 0; j < d; ++j) out[a * d + j] = d1 * nvec[j];
    } else if (order == 2) {
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) {
          const double proj = (j == l ? 1.0 : 0.0) - nvec[j] * nvec[l];
          out[std::size_t(a * d + j) * nn + (a * d + l)] =
              d2 * nvec[j] * nvec[l] + (d1 / r) * proj;
        }
    } else {
      const double c = (d2 - d1 / r) / r;
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l)
          for (int q = 0; q < d; ++q) {
            const double pjl = (j == l ? 1.0 : 0.0) - nvec[j] * nvec[l];
            const double pjq = (j == q ? 1.0 : 0.0) - nvec[j] * nvec[q];
            const double plq = (l == q ? 1.0 : 0.0) - nvec[l] * nvec[q];
            const double val = d3 * nvec[j] * nvec[l] * nvec[q] +
                               c * (pjl * nvec[q] + pjq * nvec[l] + plq * nvec[j]);
            out[(std::size_t(a * d + j) * nn + (a * d + l)) * nn + (a * d + q)] = val;
          }
    }
  }
  return out;
}

std::unique_ptr<SitePotential> make_ft_mass_spring(double k1, double k2, double a1,
                                                   double a2) {
  InteractionStencil st = InteractionStencil::square_with_diagonals();
  std::vector<PairPotential> per;
  for (int a = 0; a < st.size(); ++a) {
    const IVec& rho = st.dir(a);
    const int len2 = rho[0] * rho[0] + rho[1] * rho[1];
    per.push_back(len2 == 1 ? PairPotential::harmonic_scaled(k1 / 4.0, a1)
                            : PairPotential::harmonic_scaled(k2 / 4.0, a2));
  }
  return std::make_unique<PairSumPotential>(std::move(st), std::move(per), 1e-6,
                                            SitePotential::Kind::ft_mass_spring);
}

QuadraticFormPotential::QuadraticFormPotential(InteractionStencil stencil,
                                               std::vector<double> K, BondMatrix A0)
    : SitePotential(Kind::quadratic_form, std::move(stencil)), K_(std::move(K)), A0_(A0) {
  const int nn = n();
  if (static_cast<int>(K_.size()) != nn * nn)
    throw std::invalid_argument("quadratic form: K must be n x n");
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < i; ++j) {
      const double s = 0.5 * (K_[i * nn + j] + K_[j * nn + i]);
      K_[i * nn + j] = K_[j * nn + i] = s;
    }
  verify_reflection_symmetry(1.0);
}

double QuadraticFormPotential::energy(const BondMatrix& A) const {
  const int nn = n();
  double e = 0.0;
  for (int i = 0; i < nn; ++i) {
    double ki = 0.0;
    for (int j = 0; j < nn; ++j) ki += K_[i * nn + j] * (A.v[j] - A0_.v[j]);
    e += (A.v[i] - A0_.v[i]) * ki;
  }
  return 0.5 * e;
}

std::vector<double> QuadraticFormPotential::derivatives(const BondMatrix& A,
                                                        int order) const {
  const int nn = n();
  if (order == 1) {
    std::vector<double> g(nn, 0.0);
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < nn; ++j) g[i] += K_[i * nn + j] * (A.v[j] - A0_.v[j]);
    return g;
  }
  if (order == 2) return K_;
  if (order == 3) return std::vector<double>(std::size_t(nn) * nn * nn, 0.0);
  throw std::invalid_argument("order must be 1..3");
}

UserCompositePotential::UserCompositePotential(InteractionStencil stencil, EnergyFn energy,
                                               Deriv1Fn d1, double fd_step)
    : SitePotential(Kind::user_composite, std::move(stencil)),
      e_(std::move(energy)),
      d1_(std::move(d1)),
      h_(fd_step) {
  verify_reflection_symmetry(1.0);
}

double UserCompositePotential::energy(const BondMatrix& A) const { return e_(A); }

std::vector<double> UserCompositePotential::derivatives(const BondMatrix& A,
                                                        int order) const {
  const int nn = n();
  if (order == 1) {
    if (d1_) return d1_(A);
    std::vector<double> g(nn);
    BondMatrix B = A;
    for (int i = 0; i < nn; ++i) {
      B.v[i] = A.v[i] + h_;
      const double ep = e_(B);
      B.v[i] = A.v[i] - h_;
      const double em = e_(B);
      B.v[i] = A.v[i];
      g[i] = (ep - em) / (2.0 * h_);
    }
    return g;
  }
  if (order == 2 || order == 3) {
    // central differences of the next-lower derivative
    const int lower = order - 1;
    const std::size_t block = lower == 1 ? nn : std::size_t(nn) * nn;
    std::vector<double> out(block * nn);
    BondMatrix B = A;
    const double h = order == 2 ? h_ : std::max(h_, 1e-4);
    for (int i = 0; i < nn; ++i) {
      B.v[i] = A.v[i] + h;
      const std::vector<double> gp = derivatives(B, lower);
      B.v[i] = A.v[i] - h;
      const std::vector<double> gm = derivatives(B, lower);
      B.v[i] = A.v[i];
      for (std::size_t k = 0; k < block; ++k)
        out[k * nn + i] = (gp[k] - gm[k]) / (2.0 * h);
    }
    return out;
  }
  throw std::invalid_argument("order must be 1..3");
}

double LinearizationTensor::form(const BondMatrix& h1, const BondMatrix& h2) const {
  const int nn = n();
  double s = 0.0;
  for (int i = 0; i < nn; ++i) {
    double ki = 0.0;
    for (int j = 0; j < nn; ++j) ki += K[i * nn + j] * h2.v[j];
    s += h1.v[i] * ki;
  }
  return s;
}

double ContinuumTensor::rank_one_form(const Vec& xi, const Vec& eta) const {
  double s = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        for (int m = 0; m < d; ++m) s += at(j, k, l, m) * xi[j] * eta[k] * xi[l] * eta[m];
  return s;
}

BondMatrix bonds_from_matrix(const InteractionStencil& stencil, const double* F) {
  const int d = stencil.dim();
  BondMatrix A;
  A.m = stencil.size();
  A.d = d;
  for (int a = 0; a < A.m; ++a)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += F[j * d + k] * stencil.dir(a)[k];
      A.at(a, j) = s;
    }
  return A;
}

double cauchy_born_energy(const SitePotential& w, const double* F) {
  return w.energy(bonds_from_matrix(w.stencil(), F));
}

std::vector<double> cauchy_born_stress(const SitePotential& w, const double* F) {
  const int d = w.dim();
  const std::vector<double> g = w.derivatives(bonds_from_matrix(w.stencil(), F), 1);
  std::vector<double> s(d * d, 0.0);
  for (int a = 0; a < w.stencil().size(); ++a)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) s[j * d + k] += g[a * d + j] * w.stencil().dir(a)[k];
  return s;
}

ContinuumTensor cauchy_born_tensor(const LinearizationTensor& K,
                                   const InteractionStencil& stencil) {
  ContinuumTensor L;
  L.d = K.d;
  for (int a = 0; a < K.m; ++a)
    for (int b = 0; b < K.m; ++b)
      for (int j = 0; j < K.d; ++j)
        for (int l = 0; l < K.d; ++l) {
          const double kv = K.entry(j, a, l, b);
          if (kv == 0.0) continue;
          for (int k = 0; k < K.d; ++k)
            for (int m = 0; m < K.d; ++m)
              L.at(j, k, l, m) += kv * stencil.dir(a)[k] * stencil.dir(b)[m];
        }
  return L;
}

double tensor_operator_norm(const std::vector<double>& sym, int n, double tol) {
  std::vector<double> v(n), w(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * (i + 1);
  double nv = 0.0;
  for (double x : v) nv += x * x;
  nv = std::sqrt(nv);
  for (double& x : v) x /= nv;
  double lam = 0.0;
  for (int it = 0; it < 20000; ++it) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += sym[std::size_t(i) * n + j] * v[j];
      w[i] = s;
    }
    double nw = 0.0;
    for (double x : w) nw += x * x;
    nw = std::sqrt(nw);
    if (nw == 0.0) return 0.0;
    const double lam_new = nw;
    for (int i = 0; i < n; ++i) v[i] = w[i] / nw;
    if (std::abs(lam_new - lam) <= tol * std::max(1.0, lam_new) && it > 3) return lam_new;
    lam = lam_new;
  }
  return lam;
}

LinearizationTensor linearize(const SitePotential& w, const double* A0,
                              bool with_operator_norm) {
  const BondMatrix bonds = bonds_from_matrix(w.stencil(), A0);
  LinearizationTensor K;
  K.d = w.dim();
  K.m = w.stencil().size();
  K.K = w.derivatives(bonds, 2);
  const int nn = K.n();
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < i; ++j) {
      const double s = 0.5 * (K.K[i * nn + j] + K.K[j * nn + i]);
      K.K[i * nn + j] = K.K[j * nn + i] = s;
    }
  if (with_operator_norm) K.operator_norm = tensor_operator_norm(K.K, nn);
  return K;
}

}  // namespace latlab
