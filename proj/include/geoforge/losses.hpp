#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "geoforge/tensor.hpp"

namespace geoforge::loss {

inline constexpr double kBceEpsilon = 1e-7;
inline constexpr double kSmoothL1Beta = 1.0;

enum class Elementwise { bce, smooth_l1, l2 };

/// Component values by name plus their weighted total. Component names:
/// l_rpn, l_cls, l_reg, l_det, l_c_conf, l_b_conf, l_c_loc, l_b_loc, l_junc,
/// l_bodr, l_vis.
struct LossReport {
  double total = 0.0;
  std::map<std::string, double> components;
};

// Per-element terms. bce clamps pred into [1e-7, 1 - 1e-7].
double bce_term(double pred, double target);
double smooth_l1_term(double diff);

/// Mean of the per-element loss over elements whose mask byte is nonzero
/// (all elements when no mask is given). An empty selection yields 0.
/// Throws ShapeMismatch when lengths differ.
double elementwise(Elementwise kind, std::span<const float> pred, std::span<const float> target,
                   std::optional<std::span<const std::uint8_t>> mask = std::nullopt);

struct JunctionWeights {
  double lambda_loc = 0.1;
  double lambda_conf = 1.0;
};

// lambda_loc * (c_loc + b_loc) + lambda_conf * (c_conf + b_conf)
double junction_total(double c_loc, double b_loc, double c_conf, double b_conf, const JunctionWeights& w = {});

/// Junction loss over 60x60x33 grids.
///
///   l_c_conf: bce on cell confidence over all cells
///   l_b_conf: bce on bin confidence over cells whose target is positive
///   l_c_loc:  l2 on (dx, dy) over positive cells
///   l_b_loc:  l2 on bin residuals over positive bins of positive cells
LossReport junction_loss(const Tensor& pred, const Tensor& target, const JunctionWeights& w = {});

/// Inputs of the detection loss. Box arrays hold 4 values per row.
/// Labels are 1 (positive), 0 (negative) or negative (ignored by the bce term).
struct DetectionInputs {
  std::span<const float> rpn_scores;
  std::span<const float> rpn_labels;
  std::span<const float> rpn_deltas;
  std::span<const float> rpn_delta_targets;
  std::span<const float> cls_scores;
  std::span<const float> cls_labels;
  std::span<const float> box_deltas;
  std::span<const float> box_targets;
};

/// l_rpn = bce(objectness) + smooth_l1(anchor deltas on positive anchors)
/// l_cls = bce(alignment scores vs match labels)
/// l_reg = smooth_l1(box deltas on rows whose cls_label is positive)
/// l_det = l_rpn + l_cls + l_reg
LossReport detection_loss(const DetectionInputs& in);

double boundary_loss(std::span<const float> pred, std::span<const float> gt);

inline constexpr double kBoundaryWeight = 5.0;

/// l_det + l_junc + 5 * l_bodr. Throws Error on a negative or non-finite input.
double total_visual_loss(double l_det, double l_junc, double l_bodr);

}  // namespace geoforge::loss
