#pragma once

#include <map>
#include <span>
#include <vector>

#include "geoforge/annotate.hpp"
#include "geoforge/geometry.hpp"

namespace geoforge::metrics {

/// Intersection over union of two xywh boxes. Throws DegenerateGeometry when
/// either box has w <= 0 or h <= 0.
double iou(const BBox& a, const BBox& b);

struct Detection {
  long image_id = 0;
  int category_id = 0;
  BBox box;
  double score = 1.0;  // ignored for ground truth
};

struct ApReport {
  std::map<int, double> per_class;  // only classes present in ground truth
  double map = 0.0;
};

inline constexpr int kRecallPoints = 101;

/// Per-class average precision at one IoU threshold, 101-point interpolated.
///
/// Predictions are visited by descending score (input order breaks ties);
/// each one claims the unclaimed ground truth box of the same image and class
/// with the highest IoU, provided that IoU >= iou_thr. Classes without ground
/// truth are left out of the mean.
ApReport mean_average_precision(std::span<const Detection> preds, std::span<const Detection> gts,
                                double iou_thr = 0.5);

struct ScoredJunction {
  JunctionLabel label;
  double confidence = 1.0;
};

struct JunctionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double branch_accuracy = 0.0;
  std::size_t matched = 0;
  std::size_t matched_branches = 0;  // gt branches with a predicted branch within tolerance
  std::size_t gt_branches = 0;       // gt branches of matched junctions
};

inline constexpr double kDefaultAngleTolDeg = 12.0;
inline double default_distance_tol(int width, int height) { return 0.01 * std::hypot(width, height); }

/// One-to-one matching: candidate pairs within d_tol are taken greedily by
/// descending prediction confidence, then ascending distance. Branch accuracy
/// is the fraction of branches of matched ground-truth junctions that have a
/// predicted branch within ang_tol (0 when nothing matched).
JunctionScore junction_score(std::span<const ScoredJunction> pred, std::span<const JunctionLabel> gt, double d_tol,
                             double ang_tol = kDefaultAngleTolDeg);

double f1_score(double precision, double recall);

struct BoundaryScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t pred_pixels = 0;
  std::size_t gt_pixels = 0;
  std::size_t pred_matched = 0;
  std::size_t gt_matched = 0;
};

/// Binarizes both maps at bin_thr (value >= thr), then counts predicted pixels
/// within Euclidean distance match_tol of a ground-truth pixel (precision) and
/// the reverse (recall). Two empty maps score 1.
BoundaryScore boundary_score(const BoundaryMap& pred, const BoundaryMap& gt, double bin_thr = 0.5,
                             double match_tol = 2.0);

inline double boundary_f1(const BoundaryMap& pred, const BoundaryMap& gt, double bin_thr = 0.5, double match_tol = 2.0) {
  return boundary_score(pred, gt, bin_thr, match_tol).f1;
}

/// Exact squared Euclidean distance from every pixel to the nearest pixel
/// with mask != 0 (infinity when the mask is empty). Separable two-pass
/// lower-envelope transform; columns and rows run in parallel.
std::vector<double> squared_distance_transform(std::span<const std::uint8_t> mask, int width, int height);

}  // namespace geoforge::metrics
