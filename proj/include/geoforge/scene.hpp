#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geoforge/geometry.hpp"

namespace geoforge {

enum class ShapeKind : int {
  circle = 0,
  ellipse,
  rectangle,
  triangle,
  parallelogram,
  trapezoid,
  text,
};

inline constexpr int kNumClasses = 7;
inline constexpr int kNumGeometricKinds = 6;

std::string_view to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(std::string_view name);

// COCO category ids run 1..7 in enum order.
inline constexpr int category_id(ShapeKind kind) { return static_cast<int>(kind) + 1; }

struct CircleGeom {
  Point center;
  double radius = 0.0;
};

// Semi-axis `a` lies along the rotated x axis. Rotation in degrees, applied
// in pixel coordinates.
struct EllipseGeom {
  Point center;
  double a = 0.0;
  double b = 0.0;
  double rotation_deg = 0.0;
};

// Vertices are simple and ordered with positive signed (shoelace) area in
// the pixel frame.
struct PolygonGeom {
  std::vector<Point> vertices;
};

// Anchor is the left end of the text baseline, in whole pixels.
struct TextGeom {
  int anchor_x = 0;
  int anchor_y = 0;
  std::string text;
  double font_px = 0.0;
};

using ShapeGeometry = std::variant<CircleGeom, EllipseGeom, PolygonGeom, TextGeom>;

struct ShapeSpec {
  ShapeKind kind = ShapeKind::circle;
  ShapeGeometry geometry;
  int id = 0;

  bool is_text() const { return kind == ShapeKind::text; }
};

struct Scene {
  int width = 1000;
  int height = 1000;
  std::vector<ShapeSpec> shapes;
  std::uint64_t seed = 0;
};

struct GenConfig {
  long count = 1;
  int canvas_width = 1000;
  int canvas_height = 1000;
  int shapes_min = 2;
  int shapes_max = 8;
  double text_prob = 0.7;
  // Relative sampling weights for the six geometric kinds, in enum order.
  std::array<double, kNumGeometricKinds> class_weights{1, 1, 1, 1, 1, 1};
  std::uint64_t master_seed = 0;
  int stroke_px = 2;
  double boundary_sigma = 1.0;
};

// Throws geoforge::Error describing the first violated constraint.
void validate(const GenConfig& config);

inline constexpr int kPlacementRetries = 100;
inline constexpr double kBaseFontPx = 28.0;

/// Font size for a text element: 28 px shrunk by min(1, 6 / length).
double font_size_for(std::size_t text_length);

/// Samples one scene. The per-image stream is Rng(master_seed).split(image_index),
/// so the result does not depend on which other images were generated.
/// Throws PlacementError when a shape cannot be placed within the retry budget.
Scene sample_scene(const GenConfig& config, long image_index);

/// Tight axis-aligned box of a shape. Text boxes are the extent of the
/// rendered glyph pixels. Throws DegenerateGeometry for zero-area shapes.
BBox shape_bbox(const ShapeSpec& shape);

double signed_area(const std::vector<Point>& polygon);

// Non-text geometry must lie inside [margin, size - margin] on both axes.
bool inside_canvas(const BBox& box, int width, int height, double margin);

}  // namespace geoforge
