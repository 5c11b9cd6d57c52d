#pragma once

#include <vector>

#include "latlab/geometry.hpp"

namespace latlab {

// Finite interaction range: a symmetric set of nonzero integer directions
// whose integer span is the whole lattice. Validated on construction;
// violations throw std::invalid_argument("invalid stencil").
class InteractionStencil {
 public:
  InteractionStencil(int dim, std::vector<IVec> directions);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(dirs_.size()); }
  const std::vector<IVec>& directions() const { return dirs_; }
  const IVec& dir(int a) const { return dirs_[a]; }
  // index b with dirs_[b] == -dirs_[a]
  int negation_index(int a) const { return neg_[a]; }

  double r_max() const { return r_max_; }
  double r0() const { return r0_; }

  // Common stencils.
  static InteractionStencil nearest_neighbor(int dim);
  // d=2 triangular interactions in the square-lattice chart: {±e1, ±e2, ±(e2−e1)}
  static InteractionStencil triangular();
  // d=2 nearest + diagonal springs: {±e1, ±e2, ±(e1+e2), ±(e1−e2)}
  static InteractionStencil square_with_diagonals();

 private:
  int dim_;
  std::vector<IVec> dirs_;
  std::vector<int> neg_;
  double r_max_;
  double r0_;
};

}  // namespace latlab
