#include "geoforge/render.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>

#include "geoforge/error.hpp"

namespace geoforge {

namespace {

constexpr int kShift = 4;  // sub-pixel bits for cv drawing calls
constexpr double kScale = 1 << kShift;
constexpr int kFontFace = cv::FONT_HERSHEY_SIMPLEX;

cv::Point fixed(Point p) {
  return {static_cast<int>(std::lround(p.x * kScale)), static_cast<int>(std::lround(p.y * kScale))};
}

int fixed_len(double v) { return static_cast<int>(std::lround(v * kScale)); }

cv::Mat wrap(GrayImage& img) { return cv::Mat(img.height, img.width, CV_8UC1, img.pixels.data()); }

double font_scale(double font_px) {
  return cv::getFontScaleFromHeight(kFontFace, static_cast<int>(std::lround(font_px)), text_thickness(font_px));
}

void stroke_shape(cv::Mat& canvas, const ShapeSpec& shape, int stroke_px, std::uint8_t value) {
  const cv::Scalar color(value);
  std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, CircleGeom>) {
          cv::circle(canvas, fixed(g.center), fixed_len(g.radius), color, stroke_px, cv::LINE_8, kShift);
        } else if constexpr (std::is_same_v<G, EllipseGeom>) {
          cv::ellipse(canvas, fixed(g.center), cv::Size(fixed_len(g.a), fixed_len(g.b)), g.rotation_deg, 0.0, 360.0,
                      color, stroke_px, cv::LINE_8, kShift);
        } else if constexpr (std::is_same_v<G, PolygonGeom>) {
          std::vector<cv::Point> pts;
          pts.reserve(g.vertices.size());
          for (const Point& p : g.vertices) pts.push_back(fixed(p));
          cv::polylines(canvas, pts, true, color, stroke_px, cv::LINE_8, kShift);
        } else {
          cv::putText(canvas, g.text, cv::Point(g.anchor_x, g.anchor_y), kFontFace, font_scale(g.font_px), color,
                      text_thickness(g.font_px), cv::LINE_8);
        }
      },
      shape.geometry);
}

}  // namespace

int text_thickness(double font_px) { return font_px >= 14.0 ? 2 : 1; }

BBox text_extent(const TextGeom& text) {
  if (text.text.empty()) return {};
  const double scale = font_scale(text.font_px);
  const int thick = text_thickness(text.font_px);
  int baseline = 0;
  const cv::Size sz = cv::getTextSize(text.text, kFontFace, scale, thick, &baseline);
  // Hershey glyphs can overhang the nominal box, so render with generous padding.
  const int pad = 4 * thick + 8;
  cv::Mat scratch = cv::Mat::zeros(sz.height + baseline + 2 * pad, sz.width + 2 * pad, CV_8UC1);
  const cv::Point origin(pad, pad + sz.height);
  cv::putText(scratch, text.text, origin, kFontFace, scale, cv::Scalar(255), thick, cv::LINE_8);
  const cv::Rect r = cv::boundingRect(scratch);
  if (r.area() == 0) return {};
  return {static_cast<double>(r.x - origin.x), static_cast<double>(r.y - origin.y), static_cast<double>(r.width),
          static_cast<double>(r.height)};
}

GrayImage render_scene(const Scene& scene, int stroke_px) {
  GrayImage img(scene.width, scene.height, kBackground);
  cv::Mat canvas = wrap(img);
  for (const ShapeSpec& shape : scene.shapes) stroke_shape(canvas, shape, stroke_px, kInk);
  return img;
}

GrayImage outline_mask(const Scene& scene, int stroke_px) {
  if (stroke_px < 1) throw Error("stroke must be >= 1 px");
  GrayImage img(scene.width, scene.height, 0);
  cv::Mat canvas = wrap(img);
  for (const ShapeSpec& shape : scene.shapes)
    if (!shape.is_text()) stroke_shape(canvas, shape, stroke_px, 1);
  return img;
}

}  // namespace geoforge
