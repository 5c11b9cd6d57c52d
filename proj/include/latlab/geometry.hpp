#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <vector>

namespace latlab {

// Fixed-capacity coordinate types; only the first `dim` entries are used.
using Vec = std::array<double, 3>;
using IVec = std::array<int, 3>;

inline double dot(const Vec& a, const Vec& b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a, int d) { return std::sqrt(dot(a, a, d)); }

// Geometric predicate for the reference body: inside test plus signed
// distance to the boundary (negative inside).
class DomainShape {
 public:
  explicit DomainShape(int dim) : dim_(dim) {}
  virtual ~DomainShape() = default;

  int dim() const { return dim_; }
  virtual double signed_distance(const Vec& p) const = 0;
  virtual void bounding_box(Vec& lo, Vec& hi) const = 0;
  virtual double diameter() const = 0;

  bool contains(const Vec& p) const { return signed_distance(p) < 0.0; }

 private:
  int dim_;
};

class BoxShape final : public DomainShape {
 public:
  BoxShape(int dim, Vec lo, Vec hi);
  double signed_distance(const Vec& p) const override;
  void bounding_box(Vec& lo, Vec& hi) const override;
  double diameter() const override;

 private:
  Vec lo_{}, hi_{};
};

class BallShape final : public DomainShape {
 public:
  BallShape(int dim, Vec center, double radius);
  double signed_distance(const Vec& p) const override;
  void bounding_box(Vec& lo, Vec& hi) const override;
  double diameter() const override { return 2.0 * radius_; }

 private:
  Vec center_{};
  double radius_;
};

// Simple polygon in the plane, vertices in order (either orientation).
// Sign by even-odd crossing, distance by projection onto edges.
class PolygonShape final : public DomainShape {
 public:
  explicit PolygonShape(std::vector<std::array<double, 2>> vertices);
  double signed_distance(const Vec& p) const override;
  void bounding_box(Vec& lo, Vec& hi) const override;
  double diameter() const override;

 private:
  std::vector<std::array<double, 2>> verts_;
};

}  // namespace latlab
