#include "latlab/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace latlab {

namespace {

// |det| of the Hermite form of the d x m direction matrix; 0 if rank < d.
// Integer column elimination: span_Z of the directions is Z^d iff this is 1.
long long lattice_index(int d, const std::vector<IVec>& dirs) {
  const int m = static_cast<int>(dirs.size());
  std::vector<std::array<long long, 3>> col(m);
  for (int c = 0; c < m; ++c)
    for (int r = 0; r < d; ++r) col[c][r] = dirs[c][r];

  long long det = 1;
  int lead = 0;
  for (int r = 0; r < d; ++r) {
    while (true) {
      int best = -1;
      for (int c = lead; c < m; ++c)
        if (col[c][r] != 0 && (best < 0 || std::llabs(col[c][r]) < std::llabs(col[best][r])))
          best = c;
      if (best < 0) return 0;
      std::swap(col[best], col[lead]);
      bool clean = true;
      for (int c = lead + 1; c < m; ++c) {
        if (col[c][r] == 0) continue;
        const long long q = col[c][r] / col[lead][r];
        for (int i = 0; i < d; ++i) col[c][i] -= q * col[lead][i];
        if (col[c][r] != 0) clean = false;
      }
      if (clean) break;
    }
    det *= col[lead][r];
    ++lead;
  }
  return std::llabs(det);
}

}  // namespace

InteractionStencil::InteractionStencil(int dim, std::vector<IVec> directions)
    : dim_(dim), dirs_(std::move(directions)) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("invalid stencil");
  if (dirs_.empty()) throw std::invalid_argument("invalid stencil");
  for (auto& v : dirs_)
    for (int i = dim; i < 3; ++i) v[i] = 0;

  std::map<IVec, int> index;
  for (int a = 0; a < size(); ++a) {
    bool zero = true;
    for (int i = 0; i < dim; ++i) zero = zero && dirs_[a][i] == 0;
    if (zero) throw std::invalid_argument("invalid stencil");
    if (!index.emplace(dirs_[a], a).second)
      throw std::invalid_argument("invalid stencil");
  }
  neg_.resize(size());
  for (int a = 0; a < size(); ++a) {
    IVec n{};
    for (int i = 0; i < dim; ++i) n[i] = -dirs_[a][i];
    auto it = index.find(n);
    if (it == index.end()) throw std::invalid_argument("invalid stencil");
    neg_[a] = it->second;
  }
  if (lattice_index(dim, dirs_) != 1) throw std::invalid_argument("invalid stencil");

  r_max_ = 0.0;
  for (const auto& v : dirs_) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += double(v[i]) * v[i];
    r_max_ = std::max(r_max_, std::sqrt(s));
  }
  r0_ = std::max(r_max_, std::sqrt(double(dim)) / 4.0);
}

InteractionStencil InteractionStencil::nearest_neighbor(int dim) {
  std::vector<IVec> dirs;
  for (int i = 0; i < dim; ++i) {
    IVec p{}, n{};
    p[i] = 1;
    n[i] = -1;
    dirs.push_back(p);
    dirs.push_back(n);
  }
  return InteractionStencil(dim, dirs);
}

InteractionStencil InteractionStencil::triangular() {
  return InteractionStencil(
      2, {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {-1, 1, 0}, {1, -1, 0}});
}

InteractionStencil InteractionStencil::square_with_diagonals() {
  return InteractionStencil(2, {{1, 0, 0},
                                {-1, 0, 0},
                                {0, 1, 0},
                                {0, -1, 0},
                                {1, 1, 0},
                                {-1, -1, 0},
                                {1, -1, 0},
                                {-1, 1, 0}});
}

}  // namespace latlab
