#pragma once

#include <cstdint>

#include "geoforge/image.hpp"
#include "geoforge/scene.hpp"

namespace geoforge {

inline constexpr std::uint8_t kBackground = 255;
inline constexpr std::uint8_t kInk = 0;

/// Rasterizes a scene: white background, shape outlines stroked in black at
/// `stroke_px`, text drawn with the built-in stroke font. No anti-aliasing.
GrayImage render_scene(const Scene& scene, int stroke_px = 2);

/// Binary outline mask (1 on the stroke, 0 elsewhere) of every non-text
/// shape. Uses the same rasterizer as render_scene.
GrayImage outline_mask(const Scene& scene, int stroke_px);

/// Pixel extent of a text element as it would be drawn on an unbounded
/// canvas. Pixel (i, j) covers [i, i+1) x [j, j+1).
BBox text_extent(const TextGeom& text);

int text_thickness(double font_px);

}  // namespace geoforge
