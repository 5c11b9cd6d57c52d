#include "latlab/continuum.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace latlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// sin with phase shifts: phase counts derivatives mod 4
double trig_phase(double t, int phase) {
  switch (phase & 3) {
    case 0: return std::sin(t);
    case 1: return std::cos(t);
    case 2: return -std::sin(t);
    default: return -std::cos(t);
  }
}

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

ManufacturedDeformation ManufacturedDeformation::trigonometric(int dim, const double* A0,
                                                               Vec coef, IVec freq,
                                                               double delta) {
  ManufacturedDeformation y;
  y.family_ = Family::trigonometric;
  y.d_ = dim;
  y.delta_ = delta;
  std::memcpy(y.A0_, A0, sizeof(double) * dim * dim);
  y.coef_ = coef;
  y.freq_ = freq;
  return y;
}

ManufacturedDeformation ManufacturedDeformation::polynomial(int dim, const double* A0,
                                                            std::vector<Monomial> terms,
                                                            double delta) {
  for (const auto& t : terms) {
    int deg = 0;
    for (int i = 0; i < dim; ++i) deg += t.powers[i];
    if (deg > 3) throw std::invalid_argument("polynomial degree must be <= 3");
  }
  ManufacturedDeformation y;
  y.family_ = Family::polynomial;
  y.d_ = dim;
  y.delta_ = delta;
  std::memcpy(y.A0_, A0, sizeof(double) * dim * dim);
  y.terms_ = std::move(terms);
  return y;
}

void ManufacturedDeformation::eval(const Vec& x, int order, double* out) const {
  if (order < 0 || order > 4) throw std::invalid_argument("derivative order must be 0..4");
  const int d = d_;
  const int per_component = ipow(d, order);

  for (int j = 0; j < d; ++j)
    for (int t = 0; t < per_component; ++t) {
      // decode the multi-index (i1..ir) and count derivatives per axis
      int counts[3] = {0, 0, 0};
      int rem = t;
      for (int r = 0; r < order; ++r) {
        counts[rem % d] += 1;
        rem /= d;
      }
      double val = 0.0;
      if (family_ == Family::trigonometric) {
        double prod = delta_ * coef_[j];
        for (int i = 0; i < d; ++i) {
          const double w = kPi * freq_[i];
          for (int c = 0; c < counts[i]; ++c) prod *= w;
          prod *= trig_phase(w * x[i], counts[i]);
        }
        val = prod;
      } else {
        for (const auto& mono : terms_) {
          if (mono.component != j) continue;
          double prod = delta_ * mono.coef;
          bool alive = true;
          for (int i = 0; i < d && alive; ++i) {
            const int p = mono.powers[i];
            if (counts[i] > p) {
              alive = false;
              break;
            }
            for (int c = 0; c < counts[i]; ++c) prod *= (p - c);
            prod *= std::pow(x[i], p - counts[i]);
          }
          if (alive) val += prod;
        }
      }
      out[j * per_component + t] = val;
    }

  // affine part
  if (order == 0)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += A0_[j * d + k] * x[k];
      out[j] += s;
    }
  else if (order == 1)
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) out[j * d + i] += A0_[j * d + i];
}

namespace {

// midpoint tensor quadrature of g over [-1,1]^d with n points per axis
template <typename F>
double midpoint_integral(int d, int n, F&& g) {
  const double h = 2.0 / n;
  double s = 0.0;
  IVec idx{};
  while (true) {
    Vec z{};
    for (int i = 0; i < d; ++i) z[i] = -1.0 + (idx[i] + 0.5) * h;
    s += g(z);
    int axis = d - 1;
    while (axis >= 0 && ++idx[axis] >= n) idx[axis--] = 0;
    if (axis < 0) break;
  }
  double w = 1.0;
  for (int i = 0; i < d; ++i) w *= h;
  return s * w;
}

double bump_raw(const Vec& z, int d) {
  double r2 = 0.0;
  for (int i = 0; i < d; ++i) r2 += z[i] * z[i];
  if (r2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r2));
}

int quad_cap(int d) { return d == 1 ? 8192 : d == 2 ? 1024 : 160; }

}  // namespace

Mollifier::Mollifier(int dim) : d_(dim) {
  double mass = 0.0, prev = -1.0;
  for (int n = 8; n <= quad_cap(d_); n *= 2) {
    mass = midpoint_integral(d_, n, [&](const Vec& z) { return bump_raw(z, d_); });
    if (prev > 0.0 && std::abs(mass - prev) <= 1e-12 * mass) break;
    prev = mass;
  }
  c_ = 1.0 / mass;
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) {
      double m = 0.0;
      prev = -1.0;
      for (int n = 8; n <= quad_cap(d_); n *= 2) {
        m = midpoint_integral(d_, n, [&](const Vec& z) {
          return bump_raw(z, d_) * z[i] * z[j];
        });
        if (prev >= 0.0 && std::abs(m - prev) <= 1e-12 * std::max(1e-6, m)) break;
        prev = m;
      }
      m2_[i * d_ + j] = c_ * m;
    }
}

double Mollifier::value(const Vec& z) const { return c_ * bump_raw(z, d_); }

// The mollification integral of both solution families factorizes per axis
// (the trig family via angle addition, the polynomial family via binomial
// expansion), so each quadrature level reduces to a small table of weighted
// basis sums that is independent of the sample point. Building each level's
// table once and reusing it across all lattice points turns field sampling
// from O(points * nodes) into O(points + nodes) basis evaluations.
class SeparableSampler {
 public:
  SeparableSampler(const ManufacturedDeformation& y, const Mollifier& eta, double eps)
      : y_(y), eta_(eta), eps_(eps), d_(y.dim()) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must be in (0,1]");
  }

  Vec sample(const Vec& x) {
    Vec result{}, prev{};
    bool have_prev = false;
    int level = 0;
    for (int n = 8; n <= quad_cap(d_) * 2; n *= 2, ++level) {
      const Vec acc = evaluate(level_tables(level, n), x);
      if (have_prev) {
        double diff = 0.0, scale = 0.0;
        for (int i = 0; i < d_; ++i) {
          diff += (acc[i] - prev[i]) * (acc[i] - prev[i]);
          scale += acc[i] * acc[i];
        }
        if (diff <= 1e-20 * std::max(1.0, scale)) return acc;
      }
      prev = acc;
      have_prev = true;
      result = acc;
    }
    return result;  // converged to the refinement cap
  }

 private:
  static constexpr int kBasis = 4;  // {1, z, .., ..} per axis

  struct LevelTable {
    std::vector<double> t;  // kBasis^d weighted sums
    double at(const IVec& j, int d) const {
      int idx = 0;
      for (int i = 0; i < d; ++i) idx = idx * kBasis + j[i];
      return t[idx];
    }
  };

  // basis values on the level's nodes: 1, z, and the family pair
  // (cos(pi f eps z), sin(pi f eps z)) or (z^2, z^3)
  void basis_values(int axis, double z, double* b) const {
    b[0] = 1.0;
    b[1] = z;
    if (y_.family_ == ManufacturedDeformation::Family::trigonometric) {
      const double t = kPi * y_.freq_[axis] * eps_ * z;
      b[2] = std::cos(t);
      b[3] = std::sin(t);
    } else {
      b[2] = z * z;
      b[3] = z * z * z;
    }
  }

  const LevelTable& level_tables(int level, int n) {
    if (level < static_cast<int>(tables_.size())) return tables_[level];
    LevelTable tab;
    int combos = 1;
    for (int i = 0; i < d_; ++i) combos *= kBasis;
    tab.t.assign(combos, 0.0);

    const double h = 2.0 / n;
    std::vector<double> basis(std::size_t(d_) * n * kBasis);
    for (int i = 0; i < d_; ++i)
      for (int k = 0; k < n; ++k)
        basis_values(i, -1.0 + (k + 0.5) * h, &basis[(std::size_t(i) * n + k) * kBasis]);

    IVec idx{};
    while (true) {
      Vec z{};
      for (int i = 0; i < d_; ++i) z[i] = -1.0 + (idx[i] + 0.5) * h;
      const double w = eta_.value(z);
      if (w > 0.0) {
        IVec j{};
        for (int c = 0; c < combos; ++c) {
          double p = w;
          int rem = c;
          for (int i = d_ - 1; i >= 0; --i) {
            p *= basis[(std::size_t(i) * n + idx[i]) * kBasis + rem % kBasis];
            rem /= kBasis;
          }
          tab.t[c] += p;
        }
        (void)j;
      }
      int axis = d_ - 1;
      while (axis >= 0 && ++idx[axis] >= n) idx[axis--] = 0;
      if (axis < 0) break;
    }
    double vol = 1.0;
    for (int i = 0; i < d_; ++i) vol *= h;
    for (double& v : tab.t) v *= vol;
    tables_.push_back(std::move(tab));
    return tables_.back();
  }

  Vec evaluate(const LevelTable& tab, const Vec& x) const {
    Vec acc{};
    IVec j{};
    const double mass = tab.at(j, d_);

    // affine part: A0 (x - eps z) integrated against eta
    for (int jj = 0; jj < d_; ++jj) {
      double s = 0.0;
      for (int k = 0; k < d_; ++k) {
        IVec jm{};
        jm[k] = 1;
        s += y_.A0_[jj * d_ + k] * (x[k] * mass - eps_ * tab.at(jm, d_));
      }
      acc[jj] = s;
    }

    if (y_.family_ == ManufacturedDeformation::Family::trigonometric) {
      // prod_i sin(pi f_i (x_i - eps z_i)) expanded by angle addition
      double s[3], c[3];
      for (int i = 0; i < d_; ++i) {
        const double t = kPi * y_.freq_[i] * x[i];
        s[i] = std::sin(t);
        c[i] = std::cos(t);
      }
      double total = 0.0;
      for (int mask = 0; mask < (1 << d_); ++mask) {
        double coef = 1.0;
        IVec jj{};
        for (int i = 0; i < d_; ++i) {
          if (mask & (1 << i)) {
            coef *= -c[i];
            jj[i] = 3;
          } else {
            coef *= s[i];
            jj[i] = 2;
          }
        }
        total += coef * tab.at(jj, d_);
      }
      for (int jj = 0; jj < d_; ++jj) acc[jj] += y_.delta_ * y_.coef_[jj] * total;
    } else {
      static const double binom[4][4] = {
          {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
      for (const auto& mono : y_.terms_) {
        double total = 0.0;
        IVec q{};
        while (true) {
          bool valid = true;
          double coef = 1.0;
          for (int i = 0; i < d_ && valid; ++i) {
            const int p = mono.powers[i];
            if (q[i] > p) {
              valid = false;
              break;
            }
            coef *= binom[p][q[i]] * std::pow(x[i], p - q[i]) * std::pow(-eps_, q[i]);
          }
          if (valid) total += coef * tab.at(q, d_);
          int axis = d_ - 1;
          while (axis >= 0 && ++q[axis] >= kBasis) q[axis--] = 0;
          if (axis < 0) break;
        }
        acc[mono.component] += y_.delta_ * mono.coef * total;
      }
    }
    return acc;
  }

  const ManufacturedDeformation& y_;
  const Mollifier& eta_;
  double eps_;
  int d_;
  std::vector<LevelTable> tables_;
};

Vec mollified_sample(const ManufacturedDeformation& y, const Mollifier& eta, double eps,
                     const Vec& x) {
  SeparableSampler sampler(y, eta, eps);
  return sampler.sample(x);
}

Vec body_force(const SitePotential& w, const ManufacturedDeformation& y, const Vec& x) {
  const int d = y.dim();
  double F[9], hess[27];
  y.eval(x, 1, F);
  y.eval(x, 2, hess);
  const LinearizationTensor K = linearize(w, F, /*with_operator_norm=*/false);
  const ContinuumTensor L = cauchy_born_tensor(K, w.stencil());
  Vec f{};
  for (int j = 0; j < d; ++j) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int l = 0; l < d; ++l)
        for (int m = 0; m < d; ++m)
          s += L.at(j, i, l, m) * hess[l * d * d + i * d + m];
    f[j] = -s;
  }
  return f;
}

Vec body_force_cell_average(const SitePotential& w, const ManufacturedDeformation& y,
                            double eps, const Vec& x) {
  static const double nodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                  0.3399810435848563, 0.8611363115940526};
  static const double weights[4] = {0.3478548451374538, 0.6521451548625461,
                                    0.6521451548625461, 0.3478548451374538};
  const int d = y.dim();
  Vec acc{};
  IVec idx{};
  while (true) {
    Vec p = x;
    double wt = 1.0;
    for (int i = 0; i < d; ++i) {
      p[i] += 0.5 * eps * nodes[idx[i]];
      wt *= 0.5 * weights[idx[i]];
    }
    const Vec f = body_force(w, y, p);
    for (int i = 0; i < d; ++i) acc[i] += wt * f[i];
    int axis = d - 1;
    while (axis >= 0 && ++idx[axis] >= 4) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return acc;
}

DiscreteField sample_mollified(const ManufacturedDeformation& y, const Mollifier& eta,
                               const LatticeDomain& dom) {
  DiscreteField f(dom, Support::all_points);
  SeparableSampler sampler(y, eta, dom.spacing());
  for (int idx = 0; idx < dom.num_points(); ++idx) {
    const Vec v = sampler.sample(dom.position(idx));
    for (int j = 0; j < dom.dim(); ++j) f.at(idx)[j] = v[j];
  }
  return f;
}

DiscreteField discrete_residual_field(const SitePotential& w,
                                      const ManufacturedDeformation& y,
                                      const Mollifier& eta, const LatticeDomain& dom) {
  const int d = dom.dim();
  const int m = dom.stencil().size();
  const DiscreteField s = sample_mollified(y, eta, dom);

  BondField M(dom);
  for (std::size_t r = 0; r < dom.semi_interior().size(); ++r) {
    const BondMatrix B = discrete_gradient(s, dom.semi_interior()[r]);
    const std::vector<double> g = w.derivatives(B, 1);
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < d; ++j) M.entry(static_cast<int>(r), a)[j] = g[a * d + j];
  }

  DiscreteField out(dom, Support::interior_only);
  const double eps = dom.spacing();
  for (int idx : dom.interior()) {
    const Vec div = discrete_divergence(M, idx);
    const Vec ftilde = body_force_cell_average(w, y, eps, dom.position(idx));
    for (int j = 0; j < d; ++j) out.at(idx)[j] = -ftilde[j] - div[j];
  }
  return out;
}

}  // namespace latlab
