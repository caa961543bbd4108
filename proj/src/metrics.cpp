#include "geoforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "geoforge/error.hpp"

namespace geoforge::metrics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D squared distance transform of f (lower envelope of parabolas rooted
// at the finite samples). v and z are scratch of size n and n + 1.
void dt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;  // z[0] is -inf, so k stays >= 0
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d, d + n, kInf);
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  if (!(a.w > 0.0 && a.h > 0.0 && b.w > 0.0 && b.h > 0.0)) throw DegenerateGeometry("iou: box with zero extent");
  const double iw = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

ApReport mean_average_precision(std::span<const Detection> preds, std::span<const Detection> gts, double iou_thr) {
  std::map<int, std::vector<std::size_t>> gt_by_class, pred_by_class;
  for (std::size_t i = 0; i < gts.size(); ++i) gt_by_class[gts[i].category_id].push_back(i);
  for (std::size_t i = 0; i < preds.size(); ++i) pred_by_class[preds[i].category_id].push_back(i);

  ApReport report;
  for (const auto& [cls, gt_idx] : gt_by_class) {
    std::vector<std::size_t> order = pred_by_class[cls];
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
    std::vector<bool> claimed(gts.size(), false);
    std::vector<double> precision, recall;
    std::size_t tp = 0, fp = 0;
    for (std::size_t pi : order) {
      const Detection& p = preds[pi];
      double best = iou_thr;
      std::ptrdiff_t hit = -1;
      for (std::size_t gi : gt_idx) {
        if (claimed[gi] || gts[gi].image_id != p.image_id) continue;
        const double o = iou(p.box, gts[gi].box);
        if (o >= best) {
          if (hit < 0 || o > best) {
            best = o;
            hit = static_cast<std::ptrdiff_t>(gi);
          }
        }
      }
      if (hit >= 0) {
        claimed[static_cast<std::size_t>(hit)] = true;
        ++tp;
      } else {
        ++fp;
      }
      precision.push_back(double(tp) / double(tp + fp));
      recall.push_back(double(tp) / double(gt_idx.size()));
    }
    // Precision envelope, then sample at recall thresholds 0, 0.01, ..., 1.
    for (std::size_t i = precision.size(); i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
    double sum = 0.0;
    for (int r = 0; r < kRecallPoints; ++r) {
      const double thr = r / double(kRecallPoints - 1);
      const auto it = std::lower_bound(recall.begin(), recall.end(), thr - 1e-12);
      if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
    }
    report.per_class[cls] = sum / kRecallPoints;
  }
  if (!report.per_class.empty()) {
    double s = 0.0;
    for (const auto& [cls, ap] : report.per_class) s += ap;
    report.map = s / report.per_class.size();
  }
  return report;
}

double f1_score(double precision, double recall) {
  return precision > 0.0 && recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

JunctionScore junction_score(std::span<const ScoredJunction> pred, std::span<const JunctionLabel> gt, double d_tol,
                             double ang_tol) {
  if (!(d_tol > 0.0)) throw Error("junction_score: distance tolerance must be > 0");
  struct Pair {
    double conf, dist;
    std::size_t p, g;
  };
  std::vector<Pair> pairs;
  for (std::size_t p = 0; p < pred.size(); ++p)
    for (std::size_t g = 0; g < gt.size(); ++g) {
      const double d = std::hypot(pred[p].label.x - gt[g].x, pred[p].label.y - gt[g].y);
      if (d <= d_tol) pairs.push_back({pred[p].confidence, d, p, g});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(b.conf, a.dist, a.p, a.g) < std::tie(a.conf, b.dist, b.p, b.g);
  });

  JunctionScore s;
  std::vector<bool> p_used(pred.size(), false), g_used(gt.size(), false);
  for (const Pair& pr : pairs) {
    if (p_used[pr.p] || g_used[pr.g]) continue;
    p_used[pr.p] = g_used[pr.g] = true;
    ++s.matched;
    for (double gb : gt[pr.g].branches) {
      ++s.gt_branches;
      const auto& pb = pred[pr.p].label.branches;
      if (std::any_of(pb.begin(), pb.end(), [&](double b) { return angular_distance_deg(b, gb) <= ang_tol; }))
        ++s.matched_branches;
    }
  }
  s.precision = pred.empty() ? 0.0 : double(s.matched) / pred.size();
  s.recall = gt.empty() ? 0.0 : double(s.matched) / gt.size();
  if (pred.empty() && gt.empty()) s.precision = s.recall = 1.0;
  s.f1 = f1_score(s.precision, s.recall);
  s.branch_accuracy = s.gt_branches ? double(s.matched_branches) / s.gt_branches : 0.0;
  if (pred.empty() && gt.empty()) s.branch_accuracy = 1.0;
  return s;
}

std::vector<double> squared_distance_transform(std::span<const std::uint8_t> mask, int width, int height) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (mask.size() != n) throw ShapeMismatch("distance transform: mask size does not match dimensions");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = mask[i] ? 0.0 : kInf;

#pragma omp parallel
  {
    const int len = std::max(width, height);
    std::vector<double> f(len), d(len), z(len + 1);
    std::vector<int> v(len);
#pragma omp for schedule(static)
    for (int x = 0; x < width; ++x) {
      for (int y = 0; y < height; ++y) f[y] = grid[static_cast<std::size_t>(y) * width + x];
      dt_1d(f.data(), d.data(), height, v, z);
      for (int y = 0; y < height; ++y) grid[static_cast<std::size_t>(y) * width + x] = d[y];
    }
#pragma omp for schedule(static)
    for (int y = 0; y < height; ++y) {
      double* row = grid.data() + static_cast<std::size_t>(y) * width;
      std::copy(row, row + width, f.begin());
      dt_1d(f.data(), d.data(), width, v, z);
      std::copy(d.begin(), d.begin() + width, row);
    }
  }
  return grid;
}

BoundaryScore boundary_score(const BoundaryMap& pred, const BoundaryMap& gt, double bin_thr, double match_tol) {
  if (pred.width != gt.width || pred.height != gt.height || pred.values.size() != gt.values.size())
    throw ShapeMismatch("boundary_f1: map sizes differ");
  const std::size_t n = pred.values.size();
  std::vector<std::uint8_t> pb(n), gb(n);
  for (std::size_t i = 0; i < n; ++i) {
    pb[i] = pred.values[i] >= bin_thr;
    gb[i] = gt.values[i] >= bin_thr;
  }
  const std::vector<double> to_gt = squared_distance_transform(gb, gt.width, gt.height);
  const std::vector<double> to_pred = squared_distance_transform(pb, pred.width, pred.height);
  const double tol2 = match_tol * match_tol;

  BoundaryScore s;
  for (std::size_t i = 0; i < n; ++i) {
    if (pb[i]) {
      ++s.pred_pixels;
      if (to_gt[i] <= tol2) ++s.pred_matched;
    }
    if (gb[i]) {
      ++s.gt_pixels;
      if (to_pred[i] <= tol2) ++s.gt_matched;
    }
  }
  if (s.pred_pixels == 0 && s.gt_pixels == 0) {
    s.precision = s.recall = s.f1 = 1.0;
    return s;
  }
  s.precision = s.pred_pixels ? double(s.pred_matched) / s.pred_pixels : 0.0;
  s.recall = s.gt_pixels ? double(s.gt_matched) / s.gt_pixels : 0.0;
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

}  // namespace geoforge::metrics
