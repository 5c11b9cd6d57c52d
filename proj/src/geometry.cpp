#include "latlab/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace latlab {

BoxShape::BoxShape(int dim, Vec lo, Vec hi) : DomainShape(dim), lo_(lo), hi_(hi) {
  for (int i = 0; i < dim; ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("box: lo must be < hi");
}

double BoxShape::signed_distance(const Vec& p) const {
  // q_i > 0 measures how far outside p is along axis i.
  double inside = -std::numeric_limits<double>::infinity();
  double out2 = 0.0;
  for (int i = 0; i < dim(); ++i) {
    double q = std::max(lo_[i] - p[i], p[i] - hi_[i]);
    inside = std::max(inside, q);
    if (q > 0.0) out2 += q * q;
  }
  return out2 > 0.0 ? std::sqrt(out2) : inside;
}

void BoxShape::bounding_box(Vec& lo, Vec& hi) const {
  lo = lo_;
  hi = hi_;
}

double BoxShape::diameter() const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s += (hi_[i] - lo_[i]) * (hi_[i] - lo_[i]);
  return std::sqrt(s);
}

BallShape::BallShape(int dim, Vec center, double radius)
    : DomainShape(dim), center_(center), radius_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
}

double BallShape::signed_distance(const Vec& p) const {
  double r2 = 0.0;
  for (int i = 0; i < dim(); ++i) r2 += (p[i] - center_[i]) * (p[i] - center_[i]);
  return std::sqrt(r2) - radius_;
}

void BallShape::bounding_box(Vec& lo, Vec& hi) const {
  for (int i = 0; i < dim(); ++i) {
    lo[i] = center_[i] - radius_;
    hi[i] = center_[i] + radius_;
  }
}

PolygonShape::PolygonShape(std::vector<std::array<double, 2>> vertices)
    : DomainShape(2), verts_(std::move(vertices)) {
  if (verts_.size() < 3) throw std::invalid_argument("polygon: need >= 3 vertices");
}

double PolygonShape::signed_distance(const Vec& p) const {
  const double px = p[0], py = p[1];
  double d2 = std::numeric_limits<double>::infinity();
  bool inside = false;
  const std::size_t n = verts_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double ax = verts_[j][0], ay = verts_[j][1];
    const double bx = verts_[i][0], by = verts_[i][1];
    // distance to segment [a,b]
    const double ex = bx - ax, ey = by - ay;
    const double len2 = ex * ex + ey * ey;
    double t = len2 > 0.0 ? ((px - ax) * ex + (py - ay) * ey) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (ax + t * ex), dy = py - (ay + t * ey);
    d2 = std::min(d2, dx * dx + dy * dy);
    // even-odd crossing test
    if ((ay > py) != (by > py)) {
      const double xint = ax + (py - ay) / (by - ay) * ex;
      if (px < xint) inside = !inside;
    }
  }
  const double d = std::sqrt(d2);
  return inside ? -d : d;
}

void PolygonShape::bounding_box(Vec& lo, Vec& hi) const {
  lo = {verts_[0][0], verts_[0][1], 0.0};
  hi = lo;
  for (const auto& v : verts_) {
    lo[0] = std::min(lo[0], v[0]);
    lo[1] = std::min(lo[1], v[1]);
    hi[0] = std::max(hi[0], v[0]);
    hi[1] = std::max(hi[1], v[1]);
  }
}

double PolygonShape::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < verts_.size(); ++i)
    for (std::size_t j = i + 1; j < verts_.size(); ++j) {
      const double dx = verts_[i][0] - verts_[j][0];
      const double dy = verts_[i][1] - verts_[j][1];
      best = std::max(best, dx * dx + dy * dy);
    }
  return std::sqrt(best);
}

}  // namespace latlab
