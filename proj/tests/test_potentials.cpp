#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "latlab/potentials.hpp"

using namespace latlab;

namespace {

// Hexagonal reference basis in the square-lattice chart: columns (1,0) and
// (1/2, sqrt(3)/2); all six triangular stencil bonds have unit length.
const double kTriBasis[4] = {1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0};

BondMatrix scaled_triangular_bonds(const InteractionStencil& st, double t) {
  double F[4] = {t * kTriBasis[0], t * kTriBasis[1], t * kTriBasis[2],
                 t * kTriBasis[3]};
  return bonds_from_matrix(st, F);
}

BondMatrix random_bonds(const InteractionStencil& st, double center, double spread,
                        unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-spread, spread);
  BondMatrix A;
  A.m = st.size();
  A.d = st.dim();
  for (int a = 0; a < A.m; ++a)
    for (int j = 0; j < A.d; ++j)
      A.at(a, j) = center * st.dir(a)[j] + uni(rng);
  return A;
}

double lj_v(double r) { return std::pow(r, -12.0) - 2.0 * std::pow(r, -6.0); }
double lj_dv(double r) { return -12.0 * std::pow(r, -13.0) + 12.0 * std::pow(r, -7.0); }
double lj_ddv(double r) { return 156.0 * std::pow(r, -14.0) - 84.0 * std::pow(r, -8.0); }

}  // namespace

TEST_CASE("pair potential families match their closed forms") {
  auto lj = PairPotential::lennard_jones();
  CHECK(lj.v(1.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(lj.dv(1.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(lj.v(1.3) == doctest::Approx(lj_v(1.3)).epsilon(1e-14));
  CHECK(lj.dv(1.3) == doctest::Approx(lj_dv(1.3)).epsilon(1e-13));
  CHECK(lj.ddv(1.3) == doctest::Approx(lj_ddv(1.3)).epsilon(1e-13));

  auto h = PairPotential::harmonic_scaled(3.0, 1.5);
  CHECK(h.v(2.0) == doctest::Approx(3.0 * 0.25).epsilon(1e-14));
  CHECK(h.dv(2.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(h.ddv(2.0) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(h.dddv(2.0) == 0.0);
}

TEST_CASE("triangular Lennard-Jones energy at the natural state") {
  // site energy convention: full sum over directed bonds, so six unit-length
  // bonds at V(1) = -1 give -6
  PairSumPotential w(InteractionStencil::triangular(), PairPotential::lennard_jones());
  BondMatrix A = scaled_triangular_bonds(w.stencil(), 1.0);
  CHECK(w.energy(A) == doctest::Approx(-6.0).epsilon(1e-13));

  // first derivative vanishes at the energy minimum
  auto d1 = w.derivatives(A, 1);
  for (double g : d1) CHECK(std::abs(g) <= 1e-12);
}

TEST_CASE("bond length floor raises potential singularity") {
  PairSumPotential w(InteractionStencil::nearest_neighbor(1),
                     PairPotential::lennard_jones(), 1e-3);
  BondMatrix A;
  A.m = 2;
  A.d = 1;
  A.at(0, 0) = 1e-5;
  A.at(1, 0) = -1e-5;
  CHECK_THROWS_WITH_AS(w.energy(A), "potential singularity", std::runtime_error);
}

TEST_CASE("point reflection symmetry of energy and derivatives (orders 1,2)") {
  PairSumPotential w(InteractionStencil::triangular(), PairPotential::lennard_jones());
  const auto& st = w.stencil();
  for (unsigned s = 0; s < 4; ++s) {
    BondMatrix A0 = random_bonds(st, 1.0, 0.08, 500 + s);
    BondMatrix TA = reflect(st, A0);
    CHECK(w.energy(TA) == doctest::Approx(w.energy(A0)).epsilon(1e-12));

    // Derivative tensors at a reflection-fixed point (A0 = (B rho)_rho) are
    // invariant under applying T to each argument.
    double B[4] = {1.05, 0.45, -0.03, 0.9};
    BondMatrix Afix = bonds_from_matrix(st, B);
    const int n = w.n();
    const int d = st.dim();
    auto d1 = w.derivatives(Afix, 1);
    auto d2 = w.derivatives(Afix, 2);
    BondMatrix H1 = random_bonds(st, 0.0, 1.0, 600 + s);
    BondMatrix H2 = random_bonds(st, 0.0, 1.0, 700 + s);
    BondMatrix TH1 = reflect(st, H1);
    BondMatrix TH2 = reflect(st, H2);
    auto pair1 = [&](const BondMatrix& H) {
      double v = 0.0;
      for (int a = 0; a < st.size(); ++a)
        for (int j = 0; j < d; ++j) v += d1[a * d + j] * H.at(a, j);
      return v;
    };
    auto pair2 = [&](const BondMatrix& Ha, const BondMatrix& Hb) {
      double v = 0.0;
      for (int a = 0; a < st.size(); ++a)
        for (int j = 0; j < d; ++j)
          for (int b = 0; b < st.size(); ++b)
            for (int l = 0; l < d; ++l)
              v += d2[(a * d + j) * n + (b * d + l)] * Ha.at(a, j) * Hb.at(b, l);
      return v;
    };
    CHECK(pair1(TH1) == doctest::Approx(pair1(H1)).epsilon(1e-10));
    CHECK(pair2(TH1, TH2) == doctest::Approx(pair2(H1, H2)).epsilon(1e-10));
  }
}

TEST_CASE("finite differences reproduce analytic derivatives, orders 1..3") {
  PairSumPotential w(InteractionStencil::triangular(), PairPotential::lennard_jones());
  const auto& st = w.stencil();
  const int d = st.dim();
  const int n = w.n();
  BondMatrix A = random_bonds(st, 1.0, 0.05, 42);
  const double h = 1e-5;

  auto perturbed = [&](int slot, double step) {
    BondMatrix B = A;
    B.at(slot / d, slot % d) += step;
    return B;
  };

  auto d1 = w.derivatives(A, 1);
  auto d2 = w.derivatives(A, 2);
  auto d3 = w.derivatives(A, 3);

  for (int i = 0; i < n; ++i) {
    const double fd =
        (w.energy(perturbed(i, h)) - w.energy(perturbed(i, -h))) / (2.0 * h);
    CHECK(fd == doctest::Approx(d1[i]).epsilon(1e-6));
  }
  for (int i = 0; i < n; ++i) {
    auto gp = w.derivatives(perturbed(i, h), 1);
    auto gm = w.derivatives(perturbed(i, -h), 1);
    for (int j = 0; j < n; ++j) {
      const double fd = (gp[j] - gm[j]) / (2.0 * h);
      const double ref = d2[i * n + j];
      CHECK(fd == doctest::Approx(ref).epsilon(1e-5).scale(1.0));
    }
  }
  for (int i = 0; i < n; ++i) {
    auto hp = w.derivatives(perturbed(i, h), 2);
    auto hm = w.derivatives(perturbed(i, -h), 2);
    for (int jk = 0; jk < n * n; ++jk) {
      const double fd = (hp[jk] - hm[jk]) / (2.0 * h);
      const double ref = d3[i * n * n + jk];
      CHECK(fd == doctest::Approx(ref).epsilon(1e-4).scale(10.0));
    }
  }
}

TEST_CASE("quadratic form kind: exact expansion and verbatim K") {
  auto st = InteractionStencil::nearest_neighbor(2);
  const int n = st.size() * st.dim();
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> K(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = gauss(rng);
      K[i * n + j] = v;
      K[j * n + i] = v;
    }
  // make it positive enough that the constructor's symmetry sampling is tame
  for (int i = 0; i < n; ++i) K[i * n + i] += 4.0;
  // enforce reflection symmetry K_{j rho l sigma} = K_{j(-rho) l(-sigma)}
  const int d = st.dim();
  for (int a = 0; a < st.size(); ++a)
    for (int b = 0; b < st.size(); ++b)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) {
          const int i1 = (a * d + j) * n + (b * d + l);
          const int i2 = (st.negation_index(a) * d + j) * n +
                         (st.negation_index(b) * d + l);
          const double avg = 0.5 * (K[i1] + K[i2]);
          K[i1] = avg;
          K[i2] = avg;
        }

  double F0[4] = {1.0, 0.1, -0.1, 1.0};
  BondMatrix A0 = bonds_from_matrix(st, F0);
  QuadraticFormPotential w(st, K, A0);

  CHECK(w.energy(A0) == doctest::Approx(0.0).scale(1.0));

  BondMatrix H = random_bonds(st, 0.0, 0.5, 321);
  BondMatrix A = A0;
  for (int a = 0; a < st.size(); ++a)
    for (int j = 0; j < d; ++j) A.at(a, j) += H.at(a, j);
  double quad = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      quad += K[i * n + j] * H.v[i] * H.v[j];
  CHECK(w.energy(A) - w.energy(A0) == doctest::Approx(0.5 * quad).epsilon(1e-12));

  auto lin = linearize(w, F0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      CHECK(lin.K[i * n + j] == doctest::Approx(K[i * n + j]).epsilon(1e-12));
}

TEST_CASE("Cauchy-Born density: triangular identity and natural-state value") {
  PairSumPotential w(InteractionStencil::triangular(), PairPotential::lennard_jones());
  auto lj = PairPotential::lennard_jones();

  // W_CB(F) equals the sum of the pair potential over the three bond classes,
  // doubled because the stencil contains each direction and its negation.
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(-0.1, 0.1);
  for (int trial = 0; trial < 5; ++trial) {
    double F[4] = {1.0 + uni(rng), 0.5 + uni(rng), uni(rng),
                   std::sqrt(3.0) / 2.0 + uni(rng)};
    const double c1 = std::hypot(F[0], F[2]);
    const double c2 = std::hypot(F[1], F[3]);
    const double c3 = std::hypot(F[1] - F[0], F[3] - F[2]);
    const double expect = 2.0 * (lj.v(c1) + lj.v(c2) + lj.v(c3));
    CHECK(cauchy_born_energy(w, F) == doctest::Approx(expect).epsilon(1e-12));
  }

  double Fnat[4] = {kTriBasis[0], kTriBasis[1], kTriBasis[2], kTriBasis[3]};
  CHECK(cauchy_born_energy(w, Fnat) == doctest::Approx(-6.0).epsilon(1e-13));
  auto stress = cauchy_born_stress(w, Fnat);
  for (double s : stress) CHECK(std::abs(s) <= 1e-12);
}

TEST_CASE("linearization of the triangular pair potential matches the closed form") {
  PairSumPotential w(InteractionStencil::triangular(), PairPotential::lennard_jones());
  const auto& st = w.stencil();
  const int d = 2;
  for (double t : {0.95, 1.0, 1.05}) {
    double F[4] = {t * kTriBasis[0], t * kTriBasis[1], t * kTriBasis[2],
                   t * kTriBasis[3]};
    auto lin = linearize(w, F);
    const double vp = lj_dv(t);
    const double vpp = lj_ddv(t);
    for (int a = 0; a < st.size(); ++a)
      for (int b = 0; b < st.size(); ++b)
        for (int j = 0; j < d; ++j)
          for (int l = 0; l < d; ++l) {
            double expect = 0.0;
            if (a == b) {
              // unit bond direction M rho for |M rho| = 1
              const double u0 =
                  kTriBasis[0] * st.dir(a)[0] + kTriBasis[1] * st.dir(a)[1];
              const double u1 =
                  kTriBasis[2] * st.dir(a)[0] + kTriBasis[3] * st.dir(a)[1];
              const double uj = (j == 0) ? u0 : u1;
              const double ul = (l == 0) ? u0 : u1;
              expect = (vp / t) * ((j == l ? 1.0 : 0.0) - uj * ul) + vpp * uj * ul;
            }
            CHECK(lin.entry(j, a, l, b) == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
          }
  }
}

TEST_CASE("mass-spring lattice linearization at the relaxed state") {
  const double k1 = 1.3, k2 = 0.7, a1 = 1.0, a2 = 1.2;
  auto w = make_ft_mass_spring(k1, k2, a1, a2);
  const double rstar = (k1 * a1 + std::sqrt(2.0) * k2 * a2) / (k1 + 2.0 * k2);
  double F[4] = {rstar, 0.0, 0.0, rstar};
  auto lin = linearize(*w, F);
  const auto& st = w->stencil();
  const int d = 2;
  const double s2 = std::sqrt(2.0);
  for (int a = 0; a < st.size(); ++a)
    for (int b = 0; b < st.size(); ++b)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) {
          double expect = 0.0;
          if (a == b) {
            const IVec& rho = st.dir(a);
            const double len2 = double(rho[0] * rho[0] + rho[1] * rho[1]);
            const double del = (j == l) ? 1.0 : 0.0;
            const double rr = double(rho[j]) * double(rho[l]);
            if (len2 == 1.0) {
              expect = del * (k1 / 2.0) * (1.0 - a1 / rstar) +
                       rr * k1 * a1 / (2.0 * rstar);
            } else {
              expect = del * (k2 / 2.0) * (1.0 - a2 / (s2 * rstar)) +
                       rr * k2 * a2 / (4.0 * s2 * rstar);
            }
          }
          CHECK(lin.entry(j, a, l, b) ==
                doctest::Approx(expect).epsilon(1e-10).scale(1.0));
        }
}

TEST_CASE("linearization tensor symmetries and operator norm") {
  PairSumPotential w(InteractionStencil::triangular(), PairPotential::lennard_jones());
  double F[4] = {1.02 * kTriBasis[0], 1.02 * kTriBasis[1], 1.02 * kTriBasis[2],
                 1.02 * kTriBasis[3]};
  auto lin = linearize(w, F);
  const auto& st = w.stencil();
  const int d = 2;
  const int n = lin.n();
  for (int a = 0; a < st.size(); ++a)
    for (int b = 0; b < st.size(); ++b)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) {
          // major symmetry
          CHECK(lin.entry(j, a, l, b) ==
                doctest::Approx(lin.entry(l, b, j, a)).epsilon(1e-12).scale(1.0));
          // reflection symmetry
          CHECK(lin.entry(j, a, l, b) ==
                doctest::Approx(lin.entry(j, st.negation_index(a), l,
                                          st.negation_index(b)))
                    .epsilon(1e-12)
                    .scale(1.0));
        }

  CHECK(lin.operator_norm > 0.0);
  // Rayleigh quotient of any vector is a lower bound for the spectral norm
  std::mt19937_64 rng(88);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = gauss(rng);
  std::vector<double> Kv(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Kv[i] += lin.K[i * n + j] * v[j];
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += Kv[i] * Kv[i];
    den += v[i] * v[i];
  }
  CHECK(std::sqrt(num / den) <= lin.operator_norm * (1.0 + 1e-6));
}

TEST_CASE("continuum tensor agrees with the bond-map contraction of K") {
  PairSumPotential w(InteractionStencil::triangular(), PairPotential::lennard_jones());
  double F[4] = {kTriBasis[0], kTriBasis[1], kTriBasis[2], kTriBasis[3]};
  auto lin = linearize(w, F);
  ContinuumTensor L = cauchy_born_tensor(lin, w.stencil());

  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto& st = w.stencil();
  for (int trial = 0; trial < 5; ++trial) {
    double A[4], B[4];
    for (double& x : A) x = gauss(rng);
    for (double& x : B) x = gauss(rng);
    // L[A, B]
    double lab = 0.0;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m)
            lab += L.at(j, k, l, m) * A[j * 2 + k] * B[l * 2 + m];
    // K[(A rho)_rho, (B rho)_rho]
    BondMatrix Ab = bonds_from_matrix(st, A);
    BondMatrix Bb = bonds_from_matrix(st, B);
    CHECK(lab == doctest::Approx(lin.form(Ab, Bb)).epsilon(1e-10).scale(1.0));
  }

  // rank-one form matches the explicit contraction
  Vec xi{0.3, -1.1, 0.0}, eta{0.7, 0.2, 0.0};
  double ref = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m)
          ref += L.at(j, k, l, m) * xi[j] * eta[k] * xi[l] * eta[m];
  CHECK(L.rank_one_form(xi, eta) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
}
