#pragma once

#include <cmath>
#include <numbers>

namespace geoforge {

// Pixel coordinates: x grows right, y grows down. Angles are measured with
// atan2(dy, dx) in these coordinates and expressed in degrees in [0, 360).
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point, Point) = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Axis-aligned box, top-left corner plus extent.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  friend constexpr bool operator==(const BBox&, const BBox&) = default;
};

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Wraps any finite angle into [0, 360).
inline double normalize_deg(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a < 0.0) a += 360.0;
  if (a >= 360.0) a -= 360.0;
  return a;
}

inline double direction_deg(Point v) { return normalize_deg(rad_to_deg(std::atan2(v.y, v.x))); }

// Smallest absolute difference between two angles, in [0, 180].
inline double angular_distance_deg(double a, double b) {
  const double d = std::fabs(normalize_deg(a) - normalize_deg(b));
  return d > 180.0 ? 360.0 - d : d;
}

}  // namespace geoforge
