#include "geoforge/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "geoforge/error.hpp"
#include "geoforge/render.hpp"
#include "geoforge/rng.hpp"

namespace geoforge {

namespace {

constexpr std::array<std::string_view, kNumClasses> kKindNames = {
    "circle", "ellipse", "rectangle", "triangle", "parallelogram", "trapezoid", "text"};

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

struct SizeRange {
  double lo;
  double hi;
};

// Extent limits for one geometric shape, in pixels.
SizeRange size_range(const GenConfig& config) {
  const double side = std::min(config.canvas_width, config.canvas_height);
  const double lo = std::max(8.0, 0.05 * side);
  const double hi = std::max(lo, 0.3 * side);
  return {lo, hi};
}

double placement_margin(const GenConfig& config) { return config.stroke_px + 1.0; }

std::vector<Point> ensure_positive_orientation(std::vector<Point> v) {
  if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());
  return v;
}

ShapeGeometry propose_geometry(ShapeKind kind, const GenConfig& config, Rng& rng) {
  const auto [lo, hi] = size_range(config);
  const Point c{rng.uniform(0.0, config.canvas_width), rng.uniform(0.0, config.canvas_height)};
  switch (kind) {
    case ShapeKind::circle:
      return CircleGeom{c, rng.uniform(lo / 2, hi / 2)};
    case ShapeKind::ellipse: {
      const double a = rng.uniform(lo / 2, hi / 2);
      const double b = std::max(3.0, a * rng.uniform(0.35, 0.85));
      return EllipseGeom{c, a, b, rng.uniform(0.0, 180.0)};
    }
    case ShapeKind::rectangle: {
      const double w = rng.uniform(lo, hi);
      const double h = rng.uniform(lo, hi);
      return PolygonGeom{ensure_positive_orientation(
          {{c.x - w / 2, c.y - h / 2}, {c.x + w / 2, c.y - h / 2}, {c.x + w / 2, c.y + h / 2}, {c.x - w / 2, c.y + h / 2}})};
    }
    case ShapeKind::triangle: {
      // Points on a circle with every arc >= 60 deg keep all interior angles >= 30 deg.
      const double r = rng.uniform(lo / 2, hi / 2);
      std::array<double, 3> t{};
      for (int attempt = 0;; ++attempt) {
        for (auto& v : t) v = rng.uniform(0.0, 360.0);
        std::sort(t.begin(), t.end());
        const double g0 = t[1] - t[0], g1 = t[2] - t[1], g2 = 360.0 - t[2] + t[0];
        if (std::min({g0, g1, g2}) >= 60.0 || attempt > 64) break;
      }
      std::vector<Point> v;
      for (double deg : t) v.push_back({c.x + r * std::cos(deg_to_rad(deg)), c.y + r * std::sin(deg_to_rad(deg))});
      return PolygonGeom{ensure_positive_orientation(std::move(v))};
    }
    case ShapeKind::parallelogram: {
      const double w = rng.uniform(lo, hi);
      const double h = rng.uniform(lo, hi);
      const double skew = (rng.bernoulli(0.5) ? 1.0 : -1.0) * w * rng.uniform(0.15, 0.5);
      const double x0 = c.x - (w + std::fabs(skew)) / 2 + (skew < 0 ? -skew : 0.0);
      const double y0 = c.y + h / 2;
      return PolygonGeom{ensure_positive_orientation(
          {{x0, y0}, {x0 + w, y0}, {x0 + w + skew, y0 - h}, {x0 + skew, y0 - h}})};
    }
    case ShapeKind::trapezoid: {
      const double w = rng.uniform(lo, hi);
      const double h = rng.uniform(lo, hi);
      const double top = w * rng.uniform(0.3, 0.8);
      const double shift = rng.uniform(0.0, w - top);
      const double x0 = c.x - w / 2;
      const double y0 = c.y + h / 2;
      return PolygonGeom{ensure_positive_orientation(
          {{x0, y0}, {x0 + w, y0}, {x0 + shift + top, y0 - h}, {x0 + shift, y0 - h}})};
    }
    case ShapeKind::text:
      break;
  }
  throw Error("propose_geometry: text is not a geometric kind");
}

ShapeKind sample_kind(const GenConfig& config, Rng& rng) {
  const double total = std::accumulate(config.class_weights.begin(), config.class_weights.end(), 0.0);
  double u = rng.uniform() * total;
  for (int k = 0; k < kNumGeometricKinds; ++k) {
    const double w = config.class_weights[k];
    if (w <= 0.0) continue;
    if (u < w) return static_cast<ShapeKind>(k);
    u -= w;
  }
  // Rounding fell off the end: take the last kind with positive weight.
  for (int k = kNumGeometricKinds - 1; k >= 0; --k)
    if (config.class_weights[k] > 0.0) return static_cast<ShapeKind>(k);
  return ShapeKind::circle;
}

std::string random_text(Rng& rng) {
  const auto len = static_cast<std::size_t>(rng.uniform_int(1, 10));
  std::string s(len, ' ');
  for (auto& ch : s) ch = kAlphabet[static_cast<std::size_t>(rng.uniform_int(0, kAlphabet.size() - 1))];
  return s;
}

// Text goes inside the host shape's box or next to one of its sides.
bool try_place_text(const BBox& host, const GenConfig& config, Rng& rng, TextGeom& out) {
  out.text = random_text(rng);
  out.font_px = font_size_for(out.text.size());
  const BBox ext = text_extent(TextGeom{0, 0, out.text, out.font_px});
  const double gap = 4.0;
  for (int attempt = 0; attempt < kPlacementRetries; ++attempt) {
    const int where = static_cast<int>(rng.uniform_int(0, 4));
    double left = 0.0, top = 0.0;
    switch (where) {
      case 0:  // inside, jittered around the center
        left = host.x + host.w / 2 - ext.w / 2 + rng.uniform(-0.25, 0.25) * host.w;
        top = host.y + host.h / 2 - ext.h / 2 + rng.uniform(-0.25, 0.25) * host.h;
        break;
      case 1:  // right
        left = host.right() + gap;
        top = host.y + rng.uniform(0.0, std::max(0.0, host.h - ext.h));
        break;
      case 2:  // left
        left = host.x - gap - ext.w;
        top = host.y + rng.uniform(0.0, std::max(0.0, host.h - ext.h));
        break;
      case 3:  // above
        left = host.x + rng.uniform(0.0, std::max(0.0, host.w - ext.w));
        top = host.y - gap - ext.h;
        break;
      default:  // below
        left = host.x + rng.uniform(0.0, std::max(0.0, host.w - ext.w));
        top = host.bottom() + gap;
        break;
    }
    out.anchor_x = static_cast<int>(std::lround(left - ext.x));
    out.anchor_y = static_cast<int>(std::lround(top - ext.y));
    const BBox placed{ext.x + out.anchor_x, ext.y + out.anchor_y, ext.w, ext.h};
    if (inside_canvas(placed, config.canvas_width, config.canvas_height, 0.0)) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(ShapeKind kind) { return kKindNames.at(static_cast<std::size_t>(kind)); }

ShapeKind shape_kind_from_string(std::string_view name) {
  for (std::size_t k = 0; k < kKindNames.size(); ++k)
    if (kKindNames[k] == name) return static_cast<ShapeKind>(k);
  throw Error("unknown shape kind: " + std::string(name));
}

void validate(const GenConfig& config) {
  if (config.count < 0) throw Error("count must be >= 0");
  if (config.canvas_width < 1 || config.canvas_height < 1) throw Error("canvas must be at least 1x1");
  if (config.shapes_min < 1) throw Error("shapes_min must be >= 1");
  if (config.shapes_max < config.shapes_min) throw Error("shapes_max must be >= shapes_min");
  if (!(config.text_prob >= 0.0 && config.text_prob <= 1.0)) throw Error("text_prob must lie in [0, 1]");
  double total = 0.0;
  for (double w : config.class_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("class weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0) throw Error("at least one class weight must be positive");
  if (config.stroke_px < 1) throw Error("stroke must be >= 1 px");
  if (!(config.boundary_sigma >= 0.0)) throw Error("boundary sigma must be >= 0");
}

double font_size_for(std::size_t text_length) {
  return kBaseFontPx * std::min(1.0, 6.0 / static_cast<double>(std::max<std::size_t>(text_length, 1)));
}

double signed_area(const std::vector<Point>& polygon) {
  double s = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) s += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  return 0.5 * s;
}

bool inside_canvas(const BBox& box, int width, int height, double margin) {
  return box.x >= margin && box.y >= margin && box.right() <= width - margin && box.bottom() <= height - margin;
}

BBox shape_bbox(const ShapeSpec& shape) {
  return std::visit(
      [](const auto& g) -> BBox {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, CircleGeom>) {
          if (!(g.radius > 0.0)) throw DegenerateGeometry("circle with non-positive radius");
          return {g.center.x - g.radius, g.center.y - g.radius, 2 * g.radius, 2 * g.radius};
        } else if constexpr (std::is_same_v<G, EllipseGeom>) {
          if (!(g.a > 0.0 && g.b > 0.0)) throw DegenerateGeometry("ellipse with non-positive semi-axis");
          const double t = deg_to_rad(g.rotation_deg);
          const double c = std::cos(t), s = std::sin(t);
          const double hx = std::sqrt(g.a * g.a * c * c + g.b * g.b * s * s);
          const double hy = std::sqrt(g.a * g.a * s * s + g.b * g.b * c * c);
          return {g.center.x - hx, g.center.y - hy, 2 * hx, 2 * hy};
        } else if constexpr (std::is_same_v<G, PolygonGeom>) {
          if (g.vertices.size() < 3 || std::fabs(signed_area(g.vertices)) <= 1e-9)
            throw DegenerateGeometry("polygon with zero area");
          double x0 = g.vertices[0].x, x1 = x0, y0 = g.vertices[0].y, y1 = y0;
          for (const Point& p : g.vertices) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
          }
          return {x0, y0, x1 - x0, y1 - y0};
        } else {
          if (g.text.empty() || !(g.font_px > 0.0)) throw DegenerateGeometry("empty text element");
          const BBox e = text_extent(g);
          if (e.w <= 0.0 || e.h <= 0.0) throw DegenerateGeometry("text renders no pixels");
          return {e.x + g.anchor_x, e.y + g.anchor_y, e.w, e.h};
        }
      },
      shape.geometry);
}

Scene sample_scene(const GenConfig& config, long image_index) {
  validate(config);
  if (image_index < 0 || image_index >= config.count) throw Error("image_index out of range");

  Rng rng = Rng(config.master_seed).split(static_cast<std::uint64_t>(image_index));
  Scene scene;
  scene.width = config.canvas_width;
  scene.height = config.canvas_height;
  scene.seed = rng.state();

  const double margin = placement_margin(config);
  const int n = static_cast<int>(rng.uniform_int(config.shapes_min, config.shapes_max));
  for (int s = 0; s < n; ++s) {
    const ShapeKind kind = sample_kind(config, rng);
    ShapeSpec shape{kind, {}, 0};
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
      shape.geometry = propose_geometry(kind, config, rng);
      placed = inside_canvas(shape_bbox(shape), scene.width, scene.height, margin);
    }
    if (!placed)
      throw PlacementError("could not place a " + std::string(to_string(kind)) + " on a " +
                               std::to_string(scene.width) + "x" + std::to_string(scene.height) + " canvas after " +
                               std::to_string(kPlacementRetries) + " retries",
                           image_index);
    shape.id = static_cast<int>(scene.shapes.size());
    const BBox host = shape_bbox(shape);
    scene.shapes.push_back(std::move(shape));

    if (config.text_prob > 0.0 && rng.bernoulli(config.text_prob)) {
      TextGeom text;
      if (try_place_text(host, config, rng, text))
        scene.shapes.push_back({ShapeKind::text, std::move(text), static_cast<int>(scene.shapes.size())});
    }
  }
  return scene;
}

}  // namespace geoforge
