#include "geoforge/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geoforge/error.hpp"
#include "geoforge/junction_codec.hpp"
#include "parallel.hpp"

namespace geoforge::loss {

namespace {

double term(Elementwise kind, double p, double t) {
  switch (kind) {
    case Elementwise::bce:
      return bce_term(p, t);
    case Elementwise::smooth_l1:
      return smooth_l1_term(p - t);
    case Elementwise::l2:
      return (p - t) * (p - t);
  }
  return 0.0;
}

void require_len(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw ShapeMismatch(std::string(what) + ": length " + std::to_string(a) + " vs " + std::to_string(b));
}

// Mean over rows whose label is positive, applied to 4-wide delta rows.
double positive_row_smooth_l1(std::span<const float> deltas, std::span<const float> targets,
                              std::span<const float> labels, const char* what) {
  require_len(deltas.size(), targets.size(), what);
  require_len(deltas.size(), 4 * labels.size(), what);
  const auto s = detail::chunked_reduce<2>(labels.size(), [&](std::size_t r, std::array<double, 2>& acc) {
    if (!(labels[r] > 0.5f)) return;
    for (std::size_t k = 4 * r; k < 4 * r + 4; ++k) acc[0] += smooth_l1_term(double(deltas[k]) - targets[k]);
    acc[1] += 4.0;
  });
  return s[1] > 0.0 ? s[0] / s[1] : 0.0;
}

// bce over entries whose label is not negative.
double labelled_bce(std::span<const float> scores, std::span<const float> labels, const char* what) {
  require_len(scores.size(), labels.size(), what);
  const auto s = detail::chunked_reduce<2>(scores.size(), [&](std::size_t i, std::array<double, 2>& acc) {
    if (labels[i] < 0.0f) return;
    acc[0] += bce_term(scores[i], labels[i]);
    acc[1] += 1.0;
  });
  return s[1] > 0.0 ? s[0] / s[1] : 0.0;
}

}  // namespace

double bce_term(double pred, double target) {
  const double p = std::clamp(pred, kBceEpsilon, 1.0 - kBceEpsilon);
  return -(target * std::log(p) + (1.0 - target) * std::log1p(-p));
}

double smooth_l1_term(double diff) {
  const double a = std::fabs(diff);
  return a < kSmoothL1Beta ? 0.5 * a * a / kSmoothL1Beta : a - 0.5 * kSmoothL1Beta;
}

double elementwise(Elementwise kind, std::span<const float> pred, std::span<const float> target,
                   std::optional<std::span<const std::uint8_t>> mask) {
  require_len(pred.size(), target.size(), "elementwise loss");
  if (mask) require_len(pred.size(), mask->size(), "elementwise loss mask");
  const auto s = detail::chunked_reduce<2>(pred.size(), [&](std::size_t i, std::array<double, 2>& acc) {
    if (mask && (*mask)[i] == 0) return;
    acc[0] += term(kind, pred[i], target[i]);
    acc[1] += 1.0;
  });
  return s[1] > 0.0 ? s[0] / s[1] : 0.0;
}

double junction_total(double c_loc, double b_loc, double c_conf, double b_conf, const JunctionWeights& w) {
  return w.lambda_loc * (c_loc + b_loc) + w.lambda_conf * (c_conf + b_conf);
}

LossReport junction_loss(const Tensor& pred, const Tensor& target, const JunctionWeights& w) {
  codec::require_grid_shape(pred);
  codec::require_grid_shape(target);
  using namespace codec;
  const float* p = pred.data.data();
  const float* t = target.data.data();

  // [c_conf sum, b_conf sum, b_conf n, c_loc sum, c_loc n, b_loc sum, b_loc n]
  const auto s = detail::chunked_reduce<7>(kGridRows * kGridCols, [&](std::size_t cell, std::array<double, 7>& acc) {
    const float* pc = p + cell * kChannels;
    const float* tc = t + cell * kChannels;
    acc[0] += bce_term(pc[kCellConf], tc[kCellConf]);
    if (!(tc[kCellConf] > 0.5f)) return;
    for (std::size_t k = 0; k < kBins; ++k) {
      acc[1] += bce_term(pc[kBinConf + k], tc[kBinConf + k]);
      if (tc[kBinConf + k] > 0.5f) {
        const double r = double(pc[kBinResidual + k]) - tc[kBinResidual + k];
        acc[5] += r * r;
        acc[6] += 1.0;
      }
    }
    acc[2] += kBins;
    const double dx = double(pc[kDx]) - tc[kDx], dy = double(pc[kDy]) - tc[kDy];
    acc[3] += dx * dx + dy * dy;
    acc[4] += 2.0;
  });

  LossReport r;
  const double c_conf = s[0] / double(kGridRows * kGridCols);
  const double b_conf = s[2] > 0.0 ? s[1] / s[2] : 0.0;
  const double c_loc = s[4] > 0.0 ? s[3] / s[4] : 0.0;
  const double b_loc = s[6] > 0.0 ? s[5] / s[6] : 0.0;
  r.components = {{"l_c_conf", c_conf}, {"l_b_conf", b_conf}, {"l_c_loc", c_loc}, {"l_b_loc", b_loc}};
  r.total = junction_total(c_loc, b_loc, c_conf, b_conf, w);
  r.components["l_junc"] = r.total;
  return r;
}

LossReport detection_loss(const DetectionInputs& in) {
  const double objectness = labelled_bce(in.rpn_scores, in.rpn_labels, "rpn objectness");
  const double anchor_reg = positive_row_smooth_l1(in.rpn_deltas, in.rpn_delta_targets, in.rpn_labels, "rpn deltas");
  const double l_cls = labelled_bce(in.cls_scores, in.cls_labels, "alignment scores");
  const double l_reg = positive_row_smooth_l1(in.box_deltas, in.box_targets, in.cls_labels, "box deltas");
  LossReport r;
  const double l_rpn = objectness + anchor_reg;
  r.total = l_rpn + l_cls + l_reg;
  r.components = {{"l_rpn", l_rpn}, {"l_cls", l_cls}, {"l_reg", l_reg}, {"l_det", r.total}};
  return r;
}

double boundary_loss(std::span<const float> pred, std::span<const float> gt) {
  return elementwise(Elementwise::l2, pred, gt);
}

double total_visual_loss(double l_det, double l_junc, double l_bodr) {
  for (double v : {l_det, l_junc, l_bodr})
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("total_visual_loss: inputs must be finite and >= 0");
  return l_det + l_junc + kBoundaryWeight * l_bodr;
}

}  // namespace geoforge::loss
