#pragma once

#include <span>
#include <variant>
#include <vector>

#include "geoforge/geometry.hpp"
#include "geoforge/image.hpp"
#include "geoforge/scene.hpp"

namespace geoforge {

// ---------------------------------------------------------------------------
// Boundary curves

struct SegmentCurve {
  Point a;
  Point b;
};

struct CircleCurve {
  Point center;
  double radius = 0.0;
};

struct EllipseCurve {
  Point center;
  double a = 0.0;
  double b = 0.0;
  double rotation_deg = 0.0;
};

using Curve = std::variant<SegmentCurve, CircleCurve, EllipseCurve>;

/// A point where two curves meet, with the outgoing branch directions (deg)
/// of each curve at that point. A segment touched at one of its endpoints
/// contributes a single direction; every other contact contributes two.
struct CurveIntersection {
  Point point;
  std::vector<double> branches_a;
  std::vector<double> branches_b;
};

inline constexpr double kTangencyTolerance = 1e-9;
inline constexpr double kEllipsePolylineTolerance = 0.25;

/// All intersection points of two curves.
///
/// Segment-segment, segment-circle, segment-ellipse and circle-circle are
/// solved in closed form. Pairs that involve an ellipse on both sides (a circle
/// counts as an ellipse here) are seeded from polyline approximations with
/// sagitta <= 0.25 px and refined by Newton iteration on the two curve
/// parameters, so returned points lie on both curves to rounding accuracy.
/// Throws DegenerateGeometry when the curves coincide or overlap.
std::vector<CurveIntersection> intersect_primitives(const Curve& a, const Curve& b);

/// Outline decomposition of a non-text shape. Throws UnsupportedCurve for text.
struct Corner {
  Point point;
  double branch_prev = 0.0;  // direction toward the previous vertex
  double branch_next = 0.0;  // direction toward the next vertex
};

struct ShapeOutline {
  std::vector<Curve> curves;
  std::vector<Corner> corners;
};

ShapeOutline outline_of(const ShapeSpec& shape);

// ---------------------------------------------------------------------------
// Junctions

struct JunctionLabel {
  double x = 0.0;
  double y = 0.0;
  std::vector<double> branches;  // degrees in [0, 360), ascending, distinct
};

inline constexpr double kJunctionMergeRadius = 1.5;
inline constexpr double kBranchDedupDeg = 1e-6;

// Sorts, wraps into [0, 360) and removes near-duplicate angles.
std::vector<double> canonical_branches(std::vector<double> branches);

/// Junctions of a scene: every polygon corner (two branches along the
/// incident edges) plus every intersection between outlines of different
/// non-text shapes. Junctions closer than 1.5 px are merged, keeping the
/// position of the earliest one and the union of branches.
std::vector<JunctionLabel> extract_junctions(const Scene& scene);

// Same, over explicit outlines. Points outside [0,width) x [0,height) are dropped.
std::vector<JunctionLabel> extract_junctions(std::span<const ShapeOutline> outlines, int width, int height);

// ---------------------------------------------------------------------------
// Boundary heatmap

struct BoundaryMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;  // row-major, each in [0, 1]

  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

inline constexpr int kDefaultStrokePx = 2;
inline constexpr double kDefaultBoundarySigma = 1.0;

/// Outline mask of every non-text shape at `stroke_px`, smoothed with a
/// Gaussian of standard deviation `sigma` (kernel radius ceil(3 sigma), zero
/// padding) and rescaled so its maximum is 1. sigma == 0 skips smoothing.
BoundaryMap boundary_heatmap(const Scene& scene, int stroke_px = kDefaultStrokePx,
                             double sigma = kDefaultBoundarySigma);

// Normalized Gaussian taps for the given sigma; {1} when sigma == 0.
std::vector<float> gaussian_taps(double sigma);

/// Separable Gaussian smoothing with zero padding. Rows are processed in
/// parallel; the output does not depend on the thread count.
void gaussian_blur(std::span<const float> in, std::span<float> out, int width, int height, double sigma);

// 8-bit encoding: value = round(255 * h).
GrayImage to_gray(const BoundaryMap& map);
BoundaryMap from_gray(const GrayImage& image);

}  // namespace geoforge
