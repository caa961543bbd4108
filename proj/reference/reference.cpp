#include "reference.hpp"

#include <cmath>
#include <limits>

namespace geoforge::reference {

double bce(double p, double t) {
  const double eps = 1e-7;
  if (p < eps) p = eps;
  if (p > 1.0 - eps) p = 1.0 - eps;
  return -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
}

double smooth_l1(double x) {
  const double a = x < 0 ? -x : x;
  if (a < 1.0) return 0.5 * x * x;
  return a - 0.5;
}

double elementwise(loss::Elementwise kind, std::span<const float> pred, std::span<const float> target,
                   std::span<const std::uint8_t> mask) {
  double sum = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!mask.empty() && mask[i] == 0) continue;
    const double p = pred[i], t = target[i];
    double v = 0.0;
    if (kind == loss::Elementwise::bce) v = bce(p, t);
    if (kind == loss::Elementwise::smooth_l1) v = smooth_l1(p - t);
    if (kind == loss::Elementwise::l2) v = (p - t) * (p - t);
    sum += v;
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

loss::LossReport junction_loss(const Tensor& pred, const Tensor& target) {
  const std::size_t cells = 60 * 60, ch = 33, bins = 15;
  std::vector<float> p_cell, t_cell, p_bin, t_bin, p_loc, t_loc, p_res, t_res;
  std::vector<std::uint8_t> bin_mask, loc_mask, res_mask;
  for (std::size_t c = 0; c < cells; ++c) {
    const float* p = &pred.data[c * ch];
    const float* t = &target.data[c * ch];
    p_cell.push_back(p[0]);
    t_cell.push_back(t[0]);
    const bool positive = t[0] > 0.5f;
    for (int k = 1; k <= 2; ++k) {
      p_loc.push_back(p[k]);
      t_loc.push_back(t[k]);
      loc_mask.push_back(positive);
    }
    for (std::size_t k = 0; k < bins; ++k) {
      p_bin.push_back(p[3 + k]);
      t_bin.push_back(t[3 + k]);
      bin_mask.push_back(positive);
      p_res.push_back(p[18 + k]);
      t_res.push_back(t[18 + k]);
      res_mask.push_back(positive && t[3 + k] > 0.5f);
    }
  }
  loss::LossReport r;
  const double c_conf = reference::elementwise(loss::Elementwise::bce, p_cell, t_cell, {});
  const double b_conf = reference::elementwise(loss::Elementwise::bce, p_bin, t_bin, bin_mask);
  const double c_loc = reference::elementwise(loss::Elementwise::l2, p_loc, t_loc, loc_mask);
  const double b_loc = reference::elementwise(loss::Elementwise::l2, p_res, t_res, res_mask);
  r.total = 0.1 * (c_loc + b_loc) + 1.0 * (c_conf + b_conf);
  r.components = {{"l_c_conf", c_conf}, {"l_b_conf", b_conf}, {"l_c_loc", c_loc},
                  {"l_b_loc", b_loc},   {"l_junc", r.total}};
  return r;
}

namespace {

std::vector<std::uint8_t> row_mask(std::span<const float> labels, std::size_t width) {
  std::vector<std::uint8_t> m;
  for (float l : labels)
    for (std::size_t k = 0; k < width; ++k) m.push_back(l > 0.5f);
  return m;
}

std::vector<std::uint8_t> not_ignored(std::span<const float> labels) {
  std::vector<std::uint8_t> m;
  for (float l : labels) m.push_back(l >= 0.0f);
  return m;
}

}  // namespace

loss::LossReport detection_loss(const loss::DetectionInputs& in) {
  const double obj = reference::elementwise(loss::Elementwise::bce, in.rpn_scores, in.rpn_labels, not_ignored(in.rpn_labels));
  const double anchors =
      reference::elementwise(loss::Elementwise::smooth_l1, in.rpn_deltas, in.rpn_delta_targets, row_mask(in.rpn_labels, 4));
  const double cls = reference::elementwise(loss::Elementwise::bce, in.cls_scores, in.cls_labels, not_ignored(in.cls_labels));
  const double reg =
      reference::elementwise(loss::Elementwise::smooth_l1, in.box_deltas, in.box_targets, row_mask(in.cls_labels, 4));
  loss::LossReport r;
  r.total = (obj + anchors) + cls + reg;
  r.components = {{"l_rpn", obj + anchors}, {"l_cls", cls}, {"l_reg", reg}, {"l_det", r.total}};
  return r;
}

double boundary_loss(std::span<const float> pred, std::span<const float> gt) {
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (double(pred[i]) - gt[i]) * (double(pred[i]) - gt[i]);
  return pred.empty() ? 0.0 : s / pred.size();
}

std::vector<float> gaussian_blur(std::span<const float> in, int width, int height, double sigma) {
  if (sigma == 0.0) return {in.begin(), in.end()};
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> g(2 * r + 1);
  double total = 0.0;
  for (int i = -r; i <= r; ++i) total += g[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  for (double& v : g) v /= total;
  std::vector<float> out(in.size(), 0.0f);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int sx = x + dx, sy = y + dy;
          if (sx < 0 || sy < 0 || sx >= width || sy >= height) continue;
          acc += g[dx + r] * g[dy + r] * in[static_cast<std::size_t>(sy) * width + sx];
        }
      out[static_cast<std::size_t>(y) * width + x] = static_cast<float>(acc);
    }
  return out;
}

std::vector<double> squared_distance_brute(std::span<const std::uint8_t> mask, int width, int height) {
  std::vector<double> out(mask.size(), std::numeric_limits<double>::infinity());
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int v = 0; v < height; ++v)
        for (int u = 0; u < width; ++u)
          if (mask[static_cast<std::size_t>(v) * width + u]) {
            const double d = double(x - u) * (x - u) + double(y - v) * (y - v);
            double& o = out[static_cast<std::size_t>(y) * width + x];
            if (d < o) o = d;
          }
  return out;
}

BBox ellipse_bbox_sampled(const EllipseCurve& e, int samples) {
  const double t = e.rotation_deg * 3.14159265358979323846 / 180.0;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (int i = 0; i < samples; ++i) {
    const double u = 2.0 * 3.14159265358979323846 * i / samples;
    const double px = e.center.x + e.a * std::cos(u) * std::cos(t) - e.b * std::sin(u) * std::sin(t);
    const double py = e.center.y + e.a * std::cos(u) * std::sin(t) + e.b * std::sin(u) * std::cos(t);
    x0 = std::min(x0, px);
    x1 = std::max(x1, px);
    y0 = std::min(y0, py);
    y1 = std::max(y1, py);
  }
  return {x0, y0, x1 - x0, y1 - y0};
}

std::vector<float> linear(const router::Linear& l, std::span<const float> x) {
  std::vector<float> y(l.out);
  for (int o = 0; o < l.out; ++o) {
    double acc = l.bias[o];
    for (int i = 0; i < l.in; ++i) acc += double(l.weight[static_cast<std::size_t>(o) * l.in + i]) * x[i];
    y[o] = static_cast<float>(acc);
  }
  return y;
}

std::vector<float> mlp2(const router::Mlp2& m, std::span<const float> x) {
  std::vector<float> h = linear(m.first, x);
  for (float& v : h) v = static_cast<float>(0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0))));
  return linear(m.second, h);
}

}  // namespace geoforge::reference
