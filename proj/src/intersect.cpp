#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "geoforge/annotate.hpp"
#include "geoforge/error.hpp"

namespace geoforge {

namespace {

constexpr double kEndpointTolerance = 1e-6;
constexpr double kParamSlack = 1e-12;
constexpr double kDuplicateTolerance = 1e-3;

// Common parametric form for circles and ellipses.
struct Conic {
  Point center;
  double a;
  double b;
  double cos_t;
  double sin_t;

  Point at(double u) const {
    const double x = a * std::cos(u), y = b * std::sin(u);
    return {center.x + cos_t * x - sin_t * y, center.y + sin_t * x + cos_t * y};
  }
  Point derivative(double u) const {
    const double x = -a * std::sin(u), y = b * std::cos(u);
    return {cos_t * x - sin_t * y, sin_t * x + cos_t * y};
  }
  // Point in the frame where the conic is the unit circle.
  Point to_unit(Point p) const {
    const Point d = p - center;
    return {(cos_t * d.x + sin_t * d.y) / a, (-sin_t * d.x + cos_t * d.y) / b};
  }
  double param_of(Point p) const {
    const Point q = to_unit(p);
    return std::atan2(q.y, q.x);
  }
};

Conic as_conic(const CircleCurve& c) { return {c.center, c.radius, c.radius, 1.0, 0.0}; }
Conic as_conic(const EllipseCurve& e) {
  const double t = deg_to_rad(e.rotation_deg);
  return {e.center, e.a, e.b, std::cos(t), std::sin(t)};
}

std::vector<double> segment_branches(const SegmentCurve& s, Point p) {
  if (distance(p, s.a) <= kEndpointTolerance) return {direction_deg(s.b - s.a)};
  if (distance(p, s.b) <= kEndpointTolerance) return {direction_deg(s.a - s.b)};
  const double d = direction_deg(s.b - s.a);
  return {d, normalize_deg(d + 180.0)};
}

std::vector<double> conic_branches(const Conic& c, Point p) {
  const double d = direction_deg(c.derivative(c.param_of(p)));
  return {d, normalize_deg(d + 180.0)};
}

bool same_conic(const Conic& p, const Conic& q) {
  constexpr double eps = 1e-9;
  if (distance(p.center, q.center) > eps) return false;
  const bool p_round = std::fabs(p.a - p.b) <= eps;
  const bool q_round = std::fabs(q.a - q.b) <= eps;
  if (p_round && q_round) return std::fabs(p.a - q.a) <= eps;
  // Axes must match up to a half turn, possibly with a and b swapped.
  const double cross_pq = p.cos_t * q.sin_t - p.sin_t * q.cos_t;
  const double dot_pq = p.cos_t * q.cos_t + p.sin_t * q.sin_t;
  if (std::fabs(cross_pq) <= eps) return std::fabs(p.a - q.a) <= eps && std::fabs(p.b - q.b) <= eps;
  if (std::fabs(dot_pq) <= eps) return std::fabs(p.a - q.b) <= eps && std::fabs(p.b - q.a) <= eps;
  return false;
}

// Roots of |p0 + t (p1 - p0)| = 1 in the conic's unit frame, t in [0, 1].
std::vector<double> segment_conic_params(const SegmentCurve& s, const Conic& c) {
  const Point p0 = c.to_unit(s.a);
  const Point d = c.to_unit(s.b) - p0;
  const double A = dot(d, d);
  if (A == 0.0) throw DegenerateGeometry("zero-length segment");
  const double B = dot(p0, d);
  const double C = dot(p0, p0) - 1.0;
  // Normalized discriminant: 1 - (distance from the unit circle's center to the line)^2.
  const double disc = (B * B - A * C) / A;
  std::vector<double> ts;
  if (std::fabs(disc) <= kTangencyTolerance) {
    ts.push_back(-B / A);
  } else if (disc > 0.0) {
    const double r = std::sqrt(disc * A);
    // Numerically stable pair of roots.
    const double q = -(B + std::copysign(r, B));
    if (q != 0.0) {
      ts.push_back(q / A);
      ts.push_back(C / q);
    } else {
      ts.push_back(r / A);
      ts.push_back(-r / A);
    }
  }
  std::vector<double> kept;
  for (double t : ts)
    if (t >= -kParamSlack && t <= 1.0 + kParamSlack) kept.push_back(std::clamp(t, 0.0, 1.0));
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<CurveIntersection> segment_segment(const SegmentCurve& s, const SegmentCurve& r) {
  const Point d1 = s.b - s.a, d2 = r.b - r.a;
  const double l1 = norm(d1), l2 = norm(d2);
  if (l1 == 0.0 || l2 == 0.0) throw DegenerateGeometry("zero-length segment");
  const double den = cross(d1, d2);
  const Point w = r.a - s.a;
  if (std::fabs(den) <= 1e-12 * l1 * l2) {
    if (std::fabs(cross(w, d1)) / l1 > 1e-9) return {};  // parallel, disjoint lines
    const double t0 = dot(w, d1) / (l1 * l1);
    const double t1 = dot(r.b - s.a, d1) / (l1 * l1);
    const double lo = std::max(0.0, std::min(t0, t1));
    const double hi = std::min(1.0, std::max(t0, t1));
    if (hi < lo - kEndpointTolerance / l1) return {};
    if ((hi - lo) * l1 > kEndpointTolerance) throw DegenerateGeometry("collinear overlapping segments");
    const Point p = s.a + lo * d1;
    return {{p, segment_branches(s, p), segment_branches(r, p)}};
  }
  const double t = cross(w, d2) / den;
  const double u = cross(w, d1) / den;
  if (t < -kParamSlack || t > 1.0 + kParamSlack || u < -kParamSlack || u > 1.0 + kParamSlack) return {};
  const Point p = s.a + std::clamp(t, 0.0, 1.0) * d1;
  return {{p, segment_branches(s, p), segment_branches(r, p)}};
}

std::vector<CurveIntersection> segment_conic(const SegmentCurve& s, const Conic& c) {
  std::vector<CurveIntersection> out;
  for (double t : segment_conic_params(s, c)) {
    const Point p = s.a + t * (s.b - s.a);
    out.push_back({p, segment_branches(s, p), conic_branches(c, p)});
  }
  return out;
}

std::vector<CurveIntersection> circle_circle(const CircleCurve& c1, const CircleCurve& c2) {
  const Point dc = c2.center - c1.center;
  const double d = norm(dc);
  if (d <= 1e-12) {
    if (std::fabs(c1.radius - c2.radius) <= 1e-12) throw DegenerateGeometry("coincident circles");
    return {};
  }
  const double along = (d * d + c1.radius * c1.radius - c2.radius * c2.radius) / (2.0 * d);
  const double h2 = c1.radius * c1.radius - along * along;
  const Conic k1 = as_conic(c1), k2 = as_conic(c2);
  const Point u = (1.0 / d) * dc;
  const Point base = c1.center + along * u;
  if (std::fabs(h2) <= kTangencyTolerance * c1.radius * c1.radius) {
    return {{base, conic_branches(k1, base), conic_branches(k2, base)}};
  }
  if (h2 < 0.0) return {};
  const double h = std::sqrt(h2);
  const Point n{-u.y, u.x};
  std::vector<CurveIntersection> out;
  for (double sgn : {1.0, -1.0}) {
    const Point p = base + (sgn * h) * n;
    out.push_back({p, conic_branches(k1, p), conic_branches(k2, p)});
  }
  return out;
}

int polyline_pieces(const Conic& c) {
  const double r = std::max(c.a, c.b);
  if (r <= kEllipsePolylineTolerance) return 8;
  const double half_angle = std::acos(1.0 - kEllipsePolylineTolerance / r);
  return std::max(8, static_cast<int>(std::ceil(std::numbers::pi / half_angle)));
}

// Newton iteration on c1(u) - c2(v) = 0.
std::pair<double, double> refine(const Conic& c1, const Conic& c2, double u, double v) {
  double best_u = u, best_v = v, best_res = distance(c1.at(u), c2.at(v));
  for (int it = 0; it < 60 && best_res > 1e-13; ++it) {
    const Point f = c1.at(u) - c2.at(v);
    const Point ju = c1.derivative(u);
    const Point jv = -1.0 * c2.derivative(v);
    const double det = cross(ju, jv);
    if (std::fabs(det) < 1e-300) break;
    u -= cross(f, jv) / det;
    v -= cross(ju, f) / det;
    const double res = distance(c1.at(u), c2.at(v));
    if (res < best_res) {
      best_res = res;
      best_u = u;
      best_v = v;
    }
  }
  return {best_u, best_v};
}

std::vector<CurveIntersection> conic_conic(const Conic& c1, const Conic& c2) {
  if (same_conic(c1, c2)) throw DegenerateGeometry("coincident conics");
  const int n1 = polyline_pieces(c1), n2 = polyline_pieces(c2);
  const double step1 = 2.0 * std::numbers::pi / n1, step2 = 2.0 * std::numbers::pi / n2;
  std::vector<Point> poly1(n1), poly2(n2);
  for (int i = 0; i < n1; ++i) poly1[i] = c1.at(i * step1);
  for (int j = 0; j < n2; ++j) poly2[j] = c2.at(j * step2);

  std::vector<Point> found;
  for (int i = 0; i < n1; ++i) {
    const Point a0 = poly1[i], a1 = poly1[(i + 1) % n1];
    const Point d1 = a1 - a0;
    for (int j = 0; j < n2; ++j) {
      const Point b0 = poly2[j], b1 = poly2[(j + 1) % n2];
      const Point d2 = b1 - b0;
      const double den = cross(d1, d2);
      if (den == 0.0) continue;
      const Point w = b0 - a0;
      const double t = cross(w, d2) / den;
      const double s = cross(w, d1) / den;
      if (t < 0.0 || t > 1.0 || s < 0.0 || s > 1.0) continue;
      const auto [u, v] = refine(c1, c2, (i + t) * step1, (j + s) * step2);
      const Point p = 0.5 * (c1.at(u) + c2.at(v));
      const bool dup = std::any_of(found.begin(), found.end(),
                                   [&](Point q) { return distance(p, q) <= kDuplicateTolerance; });
      if (!dup) found.push_back(p);
    }
  }
  // Canonical order so that (a, b) and (b, a) list points identically.
  std::sort(found.begin(), found.end(), [](Point p, Point q) { return p.x != q.x ? p.x < q.x : p.y < q.y; });
  std::vector<CurveIntersection> out;
  for (Point p : found) out.push_back({p, conic_branches(c1, p), conic_branches(c2, p)});
  return out;
}

std::vector<CurveIntersection> swapped(std::vector<CurveIntersection> v) {
  for (auto& x : v) std::swap(x.branches_a, x.branches_b);
  return v;
}

}  // namespace

std::vector<CurveIntersection> intersect_primitives(const Curve& a, const Curve& b) {
  return std::visit(
      [](const auto& x, const auto& y) -> std::vector<CurveIntersection> {
        using X = std::decay_t<decltype(x)>;
        using Y = std::decay_t<decltype(y)>;
        if constexpr (std::is_same_v<X, SegmentCurve> && std::is_same_v<Y, SegmentCurve>) {
          return segment_segment(x, y);
        } else if constexpr (std::is_same_v<X, SegmentCurve>) {
          return segment_conic(x, as_conic(y));
        } else if constexpr (std::is_same_v<Y, SegmentCurve>) {
          return swapped(segment_conic(y, as_conic(x)));
        } else if constexpr (std::is_same_v<X, CircleCurve> && std::is_same_v<Y, CircleCurve>) {
          return circle_circle(x, y);
        } else {
          return conic_conic(as_conic(x), as_conic(y));
        }
      },
      a, b);
}

ShapeOutline outline_of(const ShapeSpec& shape) {
  return std::visit(
      [](const auto& g) -> ShapeOutline {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, CircleGeom>) {
          return {{CircleCurve{g.center, g.radius}}, {}};
        } else if constexpr (std::is_same_v<G, EllipseGeom>) {
          return {{EllipseCurve{g.center, g.a, g.b, g.rotation_deg}}, {}};
        } else if constexpr (std::is_same_v<G, PolygonGeom>) {
          ShapeOutline out;
          const std::size_t n = g.vertices.size();
          for (std::size_t i = 0; i < n; ++i) {
            const Point prev = g.vertices[(i + n - 1) % n], cur = g.vertices[i], next = g.vertices[(i + 1) % n];
            out.curves.push_back(SegmentCurve{cur, next});
            out.corners.push_back({cur, direction_deg(prev - cur), direction_deg(next - cur)});
          }
          return out;
        } else {
          throw UnsupportedCurve("text elements have no analytic outline");
        }
      },
      shape.geometry);
}

}  // namespace geoforge
