#include <algorithm>
#include <cmath>

#include "geoforge/annotate.hpp"
#include "geoforge/error.hpp"
#include "geoforge/render.hpp"

namespace geoforge {

std::vector<float> gaussian_taps(double sigma) {
  if (!(sigma >= 0.0)) throw Error("sigma must be >= 0");
  if (sigma == 0.0) return {1.0f};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) sum += w[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  std::vector<float> taps(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) taps[i] = static_cast<float>(w[i] / sum);
  return taps;
}

void gaussian_blur(std::span<const float> in, std::span<float> out, int width, int height, double sigma) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (in.size() != n || out.size() != n) throw ShapeMismatch("gaussian_blur: buffer size does not match image");
  const std::vector<float> taps = gaussian_taps(sigma);
  const int radius = static_cast<int>(taps.size() / 2);
  std::vector<float> tmp(n, 0.0f);

  // Horizontal pass. All-zero rows are common on outline masks and are skipped.
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    const float* src = in.data() + static_cast<std::size_t>(y) * width;
    if (std::all_of(src, src + width, [](float v) { return v == 0.0f; })) continue;
    float* dst = tmp.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      float acc = 0.0f;
      const int k0 = std::max(-radius, -x), k1 = std::min(radius, width - 1 - x);
      for (int k = k0; k <= k1; ++k) acc += taps[k + radius] * src[x + k];
      dst[x] = acc;
    }
  }

  // Vertical pass.
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    float* dst = out.data() + static_cast<std::size_t>(y) * width;
    std::fill(dst, dst + width, 0.0f);
    const int k0 = std::max(-radius, -y), k1 = std::min(radius, height - 1 - y);
    for (int k = k0; k <= k1; ++k) {
      const float t = taps[k + radius];
      const float* src = tmp.data() + static_cast<std::size_t>(y + k) * width;
      for (int x = 0; x < width; ++x) dst[x] += t * src[x];
    }
  }
}

BoundaryMap boundary_heatmap(const Scene& scene, int stroke_px, double sigma) {
  if (stroke_px < 1) throw Error("stroke must be >= 1 px");
  if (!(sigma >= 0.0)) throw Error("sigma must be >= 0");
  const GrayImage mask = outline_mask(scene, stroke_px);
  BoundaryMap map{scene.width, scene.height, std::vector<float>(mask.pixels.size())};
  std::transform(mask.pixels.begin(), mask.pixels.end(), map.values.begin(),
                 [](std::uint8_t v) { return v ? 1.0f : 0.0f; });
  if (sigma > 0.0) {
    std::vector<float> smoothed(map.values.size());
    gaussian_blur(map.values, smoothed, map.width, map.height, sigma);
    map.values = std::move(smoothed);
  }
  const float peak = map.values.empty() ? 0.0f : *std::max_element(map.values.begin(), map.values.end());
  if (peak > 0.0f)
    for (float& v : map.values) v = std::min(1.0f, v / peak);
  return map;
}

GrayImage to_gray(const BoundaryMap& map) {
  GrayImage img(map.width, map.height);
  std::transform(map.values.begin(), map.values.end(), img.pixels.begin(), [](float v) {
    return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0f, 1.0f)));
  });
  return img;
}

BoundaryMap from_gray(const GrayImage& image) {
  BoundaryMap map{image.width, image.height, std::vector<float>(image.pixels.size())};
  std::transform(image.pixels.begin(), image.pixels.end(), map.values.begin(),
                 [](std::uint8_t v) { return static_cast<float>(v) / 255.0f; });
  return map;
}

}  // namespace geoforge
